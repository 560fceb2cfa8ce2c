#include "wold2d/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace wold2d {

namespace {

std::string format_double(double x) {
    if (std::isnan(x)) return "null";
    if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    std::string s = buf;
    if (s == "-0") s = "0";
    return s;
}

void dump_rec(const Json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string end_pad(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // std::map keeps keys sorted
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                dump_rec(it.value(), out, depth + 1);
            }
            out += "\n" + end_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            bool scalar = true;
            for (const auto& e : j)
                if (e.is_structured()) scalar = false;
            if (scalar) {
                out += "[";
                for (std::size_t k = 0; k < j.size(); ++k) {
                    if (k) out += ", ";
                    dump_rec(j[k], out, depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) out += ",\n";
                out += pad;
                dump_rec(j[k], out, depth + 1);
            }
            out += "\n" + end_pad + "]";
            return;
        }
        case Json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

const Json& field(const Json& j, const std::string& key, const std::string& at) {
    if (!j.is_object()) throw ConfigError(at, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(at + "/" + key, "missing field");
    return *it;
}

std::string read_string(const Json& j, const std::string& at) {
    if (!j.is_string()) throw ConfigError(at, "expected a string");
    return j.get<std::string>();
}

Rational read_rational(const Json& j, const std::string& at) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError(at, std::string("bad rational: ") + e.what());
        }
    }
    throw ConfigError(at, "expected an integer or a \"p/q\" string");
}

Json diag_value(const ExtInt& e) {
    if (e.is_finite()) return e.value;
    return e.to_string();
}

}  // namespace

std::string canonical_dump(const Json& j) {
    std::string out;
    dump_rec(j, out, 0);
    out += "\n";
    return out;
}

std::int64_t read_int(const Json& j, const std::string& at) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) {
        double d = j.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    throw ConfigError(at, "expected an integer");
}

double read_double(const Json& j, const std::string& at) {
    if (!j.is_number()) throw ConfigError(at, "expected a number");
    return j.get<double>();
}

cd read_complex(const Json& j, const std::string& at) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2) return {read_double(j[0], at + "/0"), read_double(j[1], at + "/1")};
    if (j.is_object()) {
        double re = j.contains("re") ? read_double(j["re"], at + "/re") : 0.0;
        double im = j.contains("im") ? read_double(j["im"], at + "/im") : 0.0;
        return {re, im};
    }
    if (j.is_string()) {
        try {
            return parse_complex(j.get<std::string>());
        } catch (const std::exception&) {
            throw ConfigError(at, "bad complex literal");
        }
    }
    throw ConfigError(at, "expected a number, [re, im] or {\"re\",\"im\"}");
}

Point read_point(const Json& j, const std::string& at) {
    if (j.is_array() && j.size() == 2) return {read_int(j[0], at + "/0"), read_int(j[1], at + "/1")};
    throw ConfigError(at, "expected a lattice point [i, j]");
}

std::map<Point, cd> read_point_map(const Json& j, const std::string& at) {
    if (!j.is_array()) throw ConfigError(at, "expected an array of {\"point\", \"value\"} entries");
    std::map<Point, cd> m;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string here = at + "/" + std::to_string(k);
        const Point p = read_point(field(j[k], "point", here), here + "/point");
        if (m.count(p)) throw ConfigError(here + "/point", "duplicate point");
        m[p] = read_complex(field(j[k], "value", here), here + "/value");
    }
    return m;
}

HalfPlane read_halfplane(const Json& j, const std::string& at) {
    if (j.is_string() && j.get<std::string>() == "L") return HalfPlane::L();
    if (!j.is_object()) throw ConfigError(at, "expected a half-plane object or \"L\"");
    HalfPlane hp;
    const Json& v = field(j, "vector", at);
    const std::string vat = at + "/vector";
    try {
        if (v.is_array()) {
            const Point p = read_point(v, vat);
            hp.vector = LatticeVector::rational(p.i, p.j);
        } else if (v.is_object()) {
            const std::string mode = v.contains("mode") ? read_string(v["mode"], vat + "/mode") : "Rational";
            if (mode == "Rational") {
                hp.vector = LatticeVector::rational(read_int(field(v, "v1", vat), vat + "/v1"),
                                                    read_int(field(v, "v2", vat), vat + "/v2"));
            } else if (mode == "IrrationalApprox") {
                hp.vector = LatticeVector::irrational_approx(
                    read_rational(field(v, "v1", vat), vat + "/v1"), read_rational(field(v, "v2", vat), vat + "/v2"),
                    read_int(field(v, "window_bound", vat), vat + "/window_bound"));
            } else {
                throw ConfigError(vat + "/mode", "unknown mode \"" + mode + "\"");
            }
        } else {
            throw ConfigError(vat, "expected [v1, v2] or {\"mode\", \"v1\", \"v2\"}");
        }
    } catch (const DomainError& e) {
        throw ConfigError(vat, e.what());
    }
    if (j.contains("variant")) {
        const std::string var = read_string(j["variant"], at + "/variant");
        if (var == "Sv")
            hp.variant = Variant::Sv;
        else if (var == "SvHat")
            hp.variant = Variant::SvHat;
        else
            throw ConfigError(at + "/variant", "expected \"Sv\" or \"SvHat\"");
    }
    return hp;
}

CovarianceModel read_covariance(const Json& j, const std::string& at) {
    const std::string kind = read_string(field(j, "kind", at), at + "/kind");
    try {
        if (kind == "WhiteNoise") return CovarianceModel::white_noise(read_double(field(j, "variance", at), at + "/variance"));
        if (kind == "LineField") {
            std::int64_t period = j.contains("period") ? read_int(j["period"], at + "/period") : 1;
            return CovarianceModel::line_field(read_int(field(j, "c", at), at + "/c"),
                                               read_int(field(j, "d", at), at + "/d"),
                                               read_double(field(j, "variance", at), at + "/variance"), period);
        }
        if (kind == "MovingAverage") {
            double nv = j.contains("noise_variance") ? read_double(j["noise_variance"], at + "/noise_variance") : 1.0;
            return CovarianceModel::moving_average(read_point_map(field(j, "coeffs", at), at + "/coeffs"), nv);
        }
        if (kind == "Table") return CovarianceModel::table(read_point_map(field(j, "entries", at), at + "/entries"));
        if (kind == "Sum") {
            const Json& parts = field(j, "components", at);
            if (!parts.is_array() || parts.empty()) throw ConfigError(at + "/components", "expected a nonempty array");
            std::vector<CovarianceModel> v;
            for (std::size_t k = 0; k < parts.size(); ++k)
                v.push_back(read_covariance(parts[k], at + "/components/" + std::to_string(k)));
            return CovarianceModel::sum(std::move(v));
        }
        if (kind == "Filtered")
            return CovarianceModel::filtered(read_covariance(field(j, "base", at), at + "/base"),
                                             read_point_map(field(j, "beta", at), at + "/beta"));
        if (kind == "Rotated") {
            const Json& m = field(j, "matrix", at);
            if (!m.is_array() || m.size() != 2) throw ConfigError(at + "/matrix", "expected a 2x2 integer matrix");
            std::array<std::array<std::int64_t, 2>, 2> A{};
            for (int r = 0; r < 2; ++r) {
                const Point row = read_point(m[r], at + "/matrix/" + std::to_string(r));
                A[r] = {row.i, row.j};
            }
            return CovarianceModel::rotated(read_covariance(field(j, "base", at), at + "/base"), A);
        }
    } catch (const DomainError& e) {
        throw ConfigError(at, e.what());
    }
    throw ConfigError(at + "/kind", "unknown covariance kind \"" + kind + "\"");
}

Diagram read_diagram(const Json& j, const std::string& at) {
    const Json& range = field(j, "column_range", at);
    if (!range.is_array() || range.size() != 2) throw ConfigError(at + "/column_range", "expected [lo, hi]");
    const std::int64_t lo = read_int(range[0], at + "/column_range/0"), hi = read_int(range[1], at + "/column_range/1");
    if (hi < lo) throw ConfigError(at + "/column_range", "hi < lo");
    const Json& b = field(j, "boundary", at);
    if (!b.is_array() || static_cast<std::int64_t>(b.size()) != hi - lo + 1)
        throw ConfigError(at + "/boundary", "expected one entry per column");
    std::vector<ExtInt> vals(b.size());
    std::vector<bool> seen(b.size(), false);
    for (std::size_t k = 0; k < b.size(); ++k) {
        const std::string here = at + "/boundary/" + std::to_string(k);
        const std::int64_t i = read_int(field(b[k], "i", here), here + "/i");
        if (i < lo || i > hi || seen[static_cast<std::size_t>(i - lo)]) throw ConfigError(here + "/i", "bad column");
        seen[static_cast<std::size_t>(i - lo)] = true;
        const Json& bv = field(b[k], "b", here);
        ExtInt e;
        if (bv.is_string()) {
            try {
                e = ExtInt::parse(bv.get<std::string>());
            } catch (const std::exception& ex) {
                throw ConfigError(here + "/b", ex.what());
            }
        } else {
            e = ExtInt::finite(read_int(bv, here + "/b"));
        }
        vals[static_cast<std::size_t>(i - lo)] = e;
    }
    try {
        return Diagram(lo, std::move(vals));
    } catch (const DomainError& e) {
        throw ConfigError(at + "/boundary", e.what());
    }
}

Mat read_matrix(const Json& j, const std::string& at) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError(at, "expected an array of rows");
    const std::size_t n = j.size(), m = j[0].size();
    Mat A(static_cast<int>(n), static_cast<int>(m));
    for (std::size_t r = 0; r < n; ++r) {
        if (!j[r].is_array() || j[r].size() != m) throw ConfigError(at + "/" + std::to_string(r), "ragged row");
        for (std::size_t c = 0; c < m; ++c)
            A(static_cast<int>(r), static_cast<int>(c)) =
                read_complex(j[r][c], at + "/" + std::to_string(r) + "/" + std::to_string(c));
    }
    return A;
}

Json to_json(Point p) { return Json::array({p.i, p.j}); }

Json to_json(cd z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const std::map<Point, cd>& m) {
    Json a = Json::array();
    for (const auto& [p, v] : m) a.push_back({{"point", to_json(p)}, {"value", to_json(v)}});
    return a;
}

Json to_json(const LatticeVector& v) {
    if (v.is_rational()) return {{"mode", "Rational"}, {"v1", v.int1()}, {"v2", v.int2()}};
    return {{"mode", "IrrationalApprox"},
            {"v1", to_string(v.v1())},
            {"v2", to_string(v.v2())},
            {"window_bound", v.window_bound()}};
}

Json to_json(const HalfPlane& hp) {
    return {{"vector", to_json(hp.vector)}, {"variant", hp.variant == Variant::Sv ? "Sv" : "SvHat"}};
}

Json to_json(const Diagram& d) {
    Json b = Json::array();
    for (std::int64_t i = d.lo(); i <= d.hi(); ++i) b.push_back({{"i", i}, {"b", diag_value(d.b(i))}});
    return {{"column_range", Json::array({d.lo(), d.hi()})}, {"boundary", b}};
}

Json to_json(const Mat& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const CheckReport& r) {
    return {{"check", r.check}, {"max_residual", r.max_residual}, {"pass", r.pass}};
}

Json to_json(const Classification& c) {
    Json ma = to_json(c.ma);
    return {{"label", to_string(c.label)},
            {"R", c.radius},
            {"sigma2", c.sigma2},
            {"ma", ma},
            {"energies", {{"total", c.energies.total}, {"ma", c.energies.ma}, {"det", c.energies.det}, {"evan", c.energies.evan}}},
            {"remote_past_energy", c.remote},
            {"epsilon", c.epsilon},
            {"residual_gram_cond", c.residual_gram_cond},
            {"predicted_evanescent_pair_type", c.predicted_pair_type}};
}

std::string format_complex(cd z) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

cd parse_complex(const std::string& s) {
    const char* p = s.c_str();
    char* end = nullptr;
    const double re = std::strtod(p, &end);
    if (end == p) throw std::invalid_argument("bad complex \"" + s + "\"");
    if (*end == '\0') return {re, 0.0};
    const char* q = end;
    const double im = std::strtod(q, &end);
    if (end == q || *end != 'i' || *(end + 1) != '\0') throw std::invalid_argument("bad complex \"" + s + "\"");
    return {re, im};
}

void write_grid_csv(std::ostream& os, const SampleGrid& g) {
    for (std::int64_t t = 0; t < g.height; ++t) {
        for (std::int64_t s = 0; s < g.width; ++s) {
            if (s) os << ',';
            os << format_complex(g.values[static_cast<std::size_t>(t * g.width + s)]);
        }
        os << '\n';
    }
}

SampleGrid read_grid_csv(std::istream& is) {
    SampleGrid g;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::int64_t w = 0;
        while (std::getline(ss, cell, ',')) {
            g.values.push_back(parse_complex(cell));
            ++w;
        }
        if (g.height == 0)
            g.width = w;
        else if (w != g.width)
            throw std::invalid_argument("CSV grid rows have different lengths");
        ++g.height;
    }
    return g;
}

}  // namespace wold2d
