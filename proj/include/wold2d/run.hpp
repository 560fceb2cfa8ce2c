#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wold2d/io.hpp"

namespace wold2d {

struct Report {
    Json config;
    Json results = Json::object();
    std::vector<CheckReport> checks;
    std::optional<SampleGrid> grid;  // set by field/simulate
    std::string error;               // library error raised while running a valid config
    double wall_time = 0.0;          // seconds; kept out of the JSON so reports stay byte-stable

    int passed() const;
    int failed() const;
    int exit_code() const { return failed() > 0 ? 1 : 0; }
};

/// Runs one configuration {"command": ..., "parameters": {...}}.
/// Throws ConfigError for schema or bound violations.
Report run(const Json& config, std::uint64_t seed = 1);

enum class Format { Json, Csv, Text };
Format parse_format(const std::string& s);

Json report_json(const Report& r);
/// Writes the report; returns the number of bytes written.
std::size_t emit(const Report& r, std::ostream& os, Format f);

struct SuiteOptions {
    std::uint64_t seed = 1;
    // replaceable so the harness itself can be mutation-tested
    std::function<PsiMap(std::int64_t, std::int64_t)> psi = psi_coefficients;
};

/// Invariant battery of one module ("lattice_halfplane", "diagram_algebra",
/// "operator_models", "field_engine", "cli_reporting") or of all of them.
Report verify_suite(const std::string& scope, const SuiteOptions& options = {});

const std::vector<std::string>& suite_scopes();

// Batteries shared with the tests and the acceptance binary.

/// Bezout identity, determinant, psi(L) in S, psi^-1(S) in L and the
/// round trip on the box of the given radius.
std::vector<CheckReport> psi_battery(const PsiMap& psi, std::int64_t window);

/// Unitary U and projection P with P U^n P = 0 for 1 <= n <= 2*radius+1:
/// a permutation whose P-cycles have length 2*radius+2 and carry one
/// P-vector each, plus P-free cycles, with random phases and conjugated by
/// a Haar unitary.
BCLData random_bcl_data(std::mt19937_64& rng, int depth, int radius, int p_cycles, int free_dim);

}  // namespace wold2d
