#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wold2d/diagram.hpp"
#include "wold2d/field.hpp"
#include "wold2d/operators.hpp"

namespace wold2d {

using Json = nlohmann::json;

/// Malformed or out-of-bounds configuration; `pointer` is a JSON pointer to
/// the offending field.
struct ConfigError : std::runtime_error {
    ConfigError(std::string pointer_, const std::string& what)
        : std::runtime_error(pointer_ + ": " + what), pointer(std::move(pointer_)) {}
    std::string pointer;
};

/// Sorted keys, two-space indent, doubles as %.12g, trailing newline.
std::string canonical_dump(const Json& j);

// Readers. `at` is the JSON pointer of `j`, used in error messages.
std::int64_t read_int(const Json& j, const std::string& at);
double read_double(const Json& j, const std::string& at);
cd read_complex(const Json& j, const std::string& at);  // number, [re, im] or {"re","im"}
Point read_point(const Json& j, const std::string& at);
std::map<Point, cd> read_point_map(const Json& j, const std::string& at);  // [{"point":[i,j],"value":v}]
HalfPlane read_halfplane(const Json& j, const std::string& at);
CovarianceModel read_covariance(const Json& j, const std::string& at);
Diagram read_diagram(const Json& j, const std::string& at);
Mat read_matrix(const Json& j, const std::string& at);

// Writers.
Json to_json(Point p);
Json to_json(cd z);
Json to_json(const std::map<Point, cd>& m);
Json to_json(const LatticeVector& v);
Json to_json(const HalfPlane& hp);
Json to_json(const Diagram& d);
Json to_json(const Mat& m);
Json to_json(const CheckReport& r);
Json to_json(const Classification& c);

/// One row per t, one column per s, cells "re+imi".
void write_grid_csv(std::ostream& os, const SampleGrid& g);
SampleGrid read_grid_csv(std::istream& is);
std::string format_complex(cd z);
cd parse_complex(const std::string& s);

}  // namespace wold2d
