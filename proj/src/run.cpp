#include "wold2d/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace wold2d {

int Report::passed() const {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckReport& c) { return c.pass; }));
}
int Report::failed() const { return static_cast<int>(checks.size()) - passed(); }

namespace {

CheckReport bool_check(std::string name, bool ok) {
    CheckReport c;
    c.check = std::move(name);
    c.pass = ok;
    c.max_residual = ok ? 0.0 : 1.0;
    return c;
}

CheckReport tol_check(std::string name, double residual, double tol) {
    CheckReport c;
    c.check = std::move(name);
    c.max_residual = residual;
    c.pass = residual <= tol;
    return c;
}

CheckReport prefixed(const std::string& prefix, CheckReport c) {
    c.check = prefix + c.check;
    return c;
}

const Json& req(const Json& obj, const std::string& key, const std::string& at) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(at + "/" + key, "missing field");
    return *it;
}

std::int64_t opt_int(const Json& obj, const std::string& key, const std::string& at, std::int64_t def,
                     std::int64_t lo, std::int64_t hi) {
    std::int64_t v = obj.contains(key) ? read_int(obj[key], at + "/" + key) : def;
    if (v < lo || v > hi)
        throw ConfigError(at + "/" + key,
                          "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

std::string opt_string(const Json& obj, const std::string& key, const std::string& at, const std::string& def) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_string()) throw ConfigError(at + "/" + key, "expected a string");
    return obj[key].get<std::string>();
}

// Columns i < 0 of -S u {0} that lose a boundary point of S; the staircase is
// shifted by one there and the period relation skips them.
std::set<std::int64_t> boundary_mask(const HalfPlane& hp, std::int64_t window) {
    std::set<std::int64_t> mask;
    const LatticeVector& v = hp.vector;
    if (!v.is_rational() || v.int2() == 0) return mask;
    for (std::int64_t i = -window; i < 0; ++i)
        if ((v.int1() * i) % v.int2() == 0) mask.insert(i);
    return mask;
}

Json ext_json(const ExtInt& e) {
    if (e.is_finite()) return e.value;
    return e.to_string();
}

// ---- halfplane --------------------------------------------------------------

std::vector<CheckReport> corner_battery(const HalfPlane& hp, std::int64_t window, std::int64_t j_max, Json* out) {
    std::vector<CheckReport> checks;
    const std::int64_t W = std::max(window, j_max);
    const CornerSequence cs = corner_sequence(hp, -W, W);
    const CornerRelations rel = check_corner_relations(cs);
    checks.push_back(bool_check("corner_mirror", rel.mirror_ok));
    checks.push_back(bool_check("corner_increment", rel.increment_ok));
    checks.push_back(bool_check("corner_gap", rel.gap_ok));
    checks.push_back(bool_check("corner_monotone", rel.monotone_ok));

    bool member_ok = true;
    for (std::int64_t i = -window; i <= window; ++i)
        for (std::int64_t j = -window; j <= window; ++j)
            if (corner_membership(cs, {i, j}) != contains(hp, {i, j})) member_ok = false;
    checks.push_back(bool_check("membership_roundtrip", member_ok));

    Json rec = nullptr;
    const LatticeVector& v = hp.vector;
    const bool axis = v.v1().numerator() == 0 || v.v2().numerator() == 0;
    if (!axis) {
        const CornerSequence pos = corner_sequence(hp, -j_max, j_max);
        const VectorEstimate est = recover_vector(pos);
        const Rational slope = v.v2() / v.v1();
        bool bound_ok = true;
        Json deltas = Json::array();
        for (std::size_t t = 0; t < est.delta.size(); ++t) {
            const Rational err = boost::abs(est.delta[t] - slope);
            if (err > Rational(1, static_cast<std::int64_t>(t + 1))) bound_ok = false;
            deltas.push_back(to_string(est.delta[t]));
        }
        checks.push_back(bool_check("slope_recovery_bound", bound_ok));
        rec = {{"delta", deltas},
               {"estimate", to_string(est.estimate)},
               {"error_bound", to_string(est.error_bound)},
               {"vector", Json::array({to_string(est.vector[0]), to_string(est.vector[1])})}};
    }
    if (out) {
        Json seq = Json::array();
        for (std::int64_t j = -j_max; j <= j_max; ++j) seq.push_back({{"j", j}, {"M", ext_json(cs.at(j))}});
        (*out)["corner_sequence"] = seq;
        (*out)["gap"] = rel.gap ? Json(*rel.gap) : Json(nullptr);
        (*out)["recovered"] = rec;
    }
    return checks;
}

void run_halfplane(const Json& p, Report& r) {
    const HalfPlane hp = read_halfplane(p, "/parameters");
    const std::int64_t window = opt_int(p, "window", "/parameters", 20, 1, 64);
    const std::int64_t j_max = opt_int(p, "j_max", "/parameters", 24, 1, 64);
    if (!hp.vector.is_rational() && std::max(window, j_max) > hp.vector.window_bound())
        throw ConfigError("/parameters/window", "exceeds the certified window of the approximant");

    const AxiomReport ax = verify_axioms([&](Point q) { return contains(hp, q); }, window);
    r.checks.push_back(bool_check("axiom_origin", ax.origin_ok));
    r.checks.push_back(bool_check("axiom_semigroup", ax.semigroup_ok));
    r.checks.push_back(bool_check("axiom_antisymmetry", ax.antisymmetry_ok));
    Json cex = Json::object();
    for (const auto& [k, pts] : ax.counterexamples) {
        Json a = Json::array();
        for (const Point& q : pts) a.push_back(to_json(q));
        cex[k] = a;
    }
    r.results["halfplane"] = to_json(hp);
    r.results["axioms"] = {{"origin", ax.origin_ok},
                           {"semigroup", ax.semigroup_ok},
                           {"antisymmetry", ax.antisymmetry_ok},
                           {"counterexamples", cex}};

    if (contains(hp, {-1, 0}) && contains(hp, {0, -1})) {
        Json corner = Json::object();
        for (auto& c : corner_battery(hp, window, j_max, &corner)) r.checks.push_back(c);
        r.results["corner"] = corner;
    } else {
        r.results["corner"] = "skipped: corner analysis needs (-1,0) and (0,-1) in S";
    }
}

// ---- psi --------------------------------------------------------------------

void run_psi(const Json& p, Report& r) {
    const std::int64_t k = opt_int(p, "k", "/parameters", -1, -64, -1);
    const std::int64_t l = opt_int(p, "l", "/parameters", -1, -64, -1);
    if (std::gcd(-k, -l) != 1) throw ConfigError("/parameters", "k and l must be coprime");
    const std::int64_t window = opt_int(p, "window", "/parameters", 15, 1, 64);
    const PsiMap psi = psi_coefficients(k, l);
    r.checks = psi_battery(psi, window);
    Json table = Json::array();
    for (std::int64_t m = -2; m <= 2; ++m)
        for (std::int64_t n = -2; n <= 2; ++n)
            table.push_back({{"in", to_json(Point{m, n})}, {"out", to_json(psi_apply(psi, {m, n}, Direction::Forward))}});
    const auto M = psi.matrix();
    r.results = {{"k", k},
                 {"l", l},
                 {"p", psi.p},
                 {"q", psi.q},
                 {"matrix", Json::array({Json::array({M[0][0], M[0][1]}), Json::array({M[1][0], M[1][1]})})},
                 {"determinant", psi.determinant()},
                 {"forward_table", table}};
}

// ---- diagram ----------------------------------------------------------------

void run_diagram(const Json& p, Report& r) {
    Diagram d;
    std::set<std::int64_t> mask;
    std::int64_t window = 0;
    if (p.contains("diagram")) {
        d = read_diagram(p["diagram"], "/parameters/diagram");
        if (d.width() > 129) throw ConfigError("/parameters/diagram", "more than 129 columns");
        window = std::max(std::abs(d.lo()), std::abs(d.hi()));
    } else {
        const HalfPlane hp = read_halfplane(req(p, "halfplane", "/parameters"), "/parameters/halfplane");
        window = opt_int(p, "window", "/parameters", 20, 1, 64);
        d = halfplane_to_diagram(hp, window);
        mask = boundary_mask(hp, window);
    }
    if (p.contains("mask")) {
        const Json& m = p["mask"];
        if (!m.is_array()) throw ConfigError("/parameters/mask", "expected an array of columns");
        for (std::size_t t = 0; t < m.size(); ++t) mask.insert(read_int(m[t], "/parameters/mask/" + std::to_string(t)));
    }
    const std::int64_t m_max = opt_int(p, "m_max", "/parameters", 8, 1, 64);
    const std::int64_t n_max = opt_int(p, "n_max", "/parameters", 8, 0, 64);
    const std::int64_t rows = opt_int(p, "rows", "/parameters", 2 * window, 1, 256);

    Json masked = Json::array();
    for (auto i : mask) masked.push_back(i);
    r.results["diagram"] = to_json(d);
    r.results["masked_columns"] = masked;
    const auto period = find_period(d, m_max, n_max, mask);
    r.checks.push_back(bool_check("period_found", period.has_value()));
    if (period) {
        Json pb = Json::array();
        for (const auto& e : period->period_boundary) pb.push_back(ext_json(e));
        r.results["period"] = {{"m", period->m}, {"n", period->n}, {"first_column", period->first_column}, {"period_boundary", pb}};
        r.checks.push_back(bool_check("period_decomposition", verify_period_decomposition(d, *period, -rows, rows, mask)));
    } else {
        r.results["period"] = nullptr;
    }
}

// ---- operator ---------------------------------------------------------------

Mat read_unitary_spec(const Json& p, const std::string& at) {
    if (p.contains("U")) return read_matrix(p["U"], at + "/U");
    const Json& perm = req(p, "permutation", at);
    if (!perm.is_array() || perm.empty()) throw ConfigError(at + "/permutation", "expected a nonempty array");
    const int e = static_cast<int>(perm.size());
    Mat U = Mat::Zero(e, e);
    std::vector<bool> hit(static_cast<std::size_t>(e), false);
    for (int a = 0; a < e; ++a) {
        const std::int64_t b = read_int(perm[a], at + "/permutation/" + std::to_string(a));
        if (b < 0 || b >= e || hit[static_cast<std::size_t>(b)])
            throw ConfigError(at + "/permutation/" + std::to_string(a), "not a permutation");
        hit[static_cast<std::size_t>(b)] = true;
        U(static_cast<int>(b), a) = 1.0;
    }
    return U;
}

Mat read_projection_spec(const Json& p, const std::string& at, int e) {
    if (p.contains("P")) return read_matrix(p["P"], at + "/P");
    const Json& diag = req(p, "P_diag", at);
    if (!diag.is_array() || static_cast<int>(diag.size()) != e)
        throw ConfigError(at + "/P_diag", "expected one 0/1 entry per dimension");
    Mat P = Mat::Zero(e, e);
    for (int a = 0; a < e; ++a) {
        const std::int64_t v = read_int(diag[a], at + "/P_diag/" + std::to_string(a));
        if (v != 0 && v != 1) throw ConfigError(at + "/P_diag/" + std::to_string(a), "expected 0 or 1");
        P(a, a) = static_cast<double>(v);
    }
    return P;
}

void run_bcl(const Json& p, Report& r) {
    const std::string at = "/parameters";
    BCLData data;
    data.U = read_unitary_spec(p, at);
    data.P = read_projection_spec(p, at, data.e_dim());
    if (data.U.rows() != data.U.cols() || data.P.rows() != data.U.rows() || data.P.cols() != data.U.rows())
        throw ConfigError(at, "U and P must be square of the same size");
    if (data.e_dim() > 64) throw ConfigError(at + "/U", "dimension above 64");
    data.depth = static_cast<int>(opt_int(p, "depth", at, 4, 2, 32));
    const int radius = static_cast<int>(opt_int(p, "radius", at, std::max(1, data.depth - 2), 0, 64));
    const int m_max = static_cast<int>(opt_int(p, "m_max", at, 3, 0, 16));
    const int n_max = static_cast<int>(opt_int(p, "n_max", at, 3, 0, 16));

    const TruncatedPair pair = build_bcl(data);
    r.results["e_dim"] = data.e_dim();
    r.results["depth"] = data.depth;
    r.results["radius"] = radius;
    r.checks.push_back(check_pair(pair));
    CheckReport pu = check_pUnP(data.U, data.P, std::max(data.depth, 2 * radius + 1));
    r.results["pUnP"] = pu.per_item;
    r.checks.push_back(pu);
    r.checks.push_back(check_compatibility(pair, m_max, n_max));
    try {
        const KernelResult kr = kernel_w1_star(pair, data);
        r.checks.push_back(tol_check("kernel_w1_star", kr.distance, 1e-9));
        r.results["kernel_dim"] = kr.kernel.dim();
    } catch (const DomainError& e) {
        r.checks.push_back(bool_check("kernel_w1_star", false));
        r.results["kernel_error"] = e.what();
    }
    r.checks.push_back(check_w1_power_projection(pair, data, data.depth));
    r.checks.push_back(check_shift_relations(pair, data, data.depth));
    try {
        const HtHeSplit sp = ht_he_split(pair, data, radius);
        for (const auto& c : sp.checks) r.checks.push_back(c);
        r.results["split"] = {{"Ht_dim", sp.Ht.dim()},
                              {"He_dim", sp.He.dim()},
                              {"cyclic_space_dim", sp.cyclic_space.dim()},
                              {"krylov_dim", sp.krylov_dim},
                              {"cells", sp.cells.size()}};
    } catch (const DomainError& e) {
        r.checks.push_back(bool_check("ht_he_split", false));
        r.results["split"] = {{"error", e.what()}};
    }
}

void run_generalized_power(const Json& p, Report& r) {
    const std::string at = "/parameters";
    GeneralizedPowerData gd;
    gd.m = opt_int(p, "m", at, 1, 1, 32);
    gd.n = opt_int(p, "n", at, 0, 0, 32);
    const Json& pb = req(p, "period_boundary", at);
    if (!pb.is_array() || static_cast<std::int64_t>(pb.size()) != gd.m)
        throw ConfigError(at + "/period_boundary", "expected m integers");
    for (std::size_t t = 0; t < pb.size(); ++t)
        gd.period_boundary.push_back(ExtInt::finite(read_int(pb[t], at + "/period_boundary/" + std::to_string(t))));
    const std::int64_t j_hi = opt_int(p, "j_hi", at, gd.period_boundary[0].value + 8, -64, 64);
    int K = 0;
    if (p.contains("unitary")) {
        gd.unitary = read_matrix(p["unitary"], at + "/unitary");
    } else {
        K = static_cast<int>(opt_int(p, "K", at, 3, 2, 16));
        gd.unitary = Mat::Zero(K, K);
        for (int a = 0; a < K; ++a) gd.unitary((a + 1) % K, a) = 1.0;
    }
    const CellPair gp = build_generalized_power(gd, j_hi);
    r.results["dim"] = gp.pair.dim();
    r.results["cells"] = gp.cells.size();
    r.checks.push_back(check_pair(gp.pair));
    r.checks.push_back(check_generalized_unitary(gp, gd));
    if (K >= 2) r.checks.push_back(check_shift_bridge(gd.m, gd.n, gd.period_boundary, K, j_hi));
}

void run_operator(const Json& p, Report& r) {
    const std::string model = opt_string(p, "model", "/parameters", "bcl");
    if (model == "bcl")
        run_bcl(p, r);
    else if (model == "generalized_power")
        run_generalized_power(p, r);
    else
        throw ConfigError("/parameters/model", "expected \"bcl\" or \"generalized_power\"");
}

// ---- field ------------------------------------------------------------------

Json lag_table(const CovarianceModel& cov, std::int64_t w) {
    Json t = Json::array();
    for (std::int64_t i = -w; i <= w; ++i)
        for (std::int64_t j = -w; j <= w; ++j) t.push_back({{"lag", to_json(Point{i, j})}, {"gamma", to_json(cov.gamma({i, j}))}});
    return t;
}

std::vector<CheckReport> classification_checks(const Classification& c) {
    const Energies& e = c.energies;
    std::vector<CheckReport> out;
    out.push_back(tol_check("energy_identity", std::abs(e.ma + e.det + e.evan - e.total), 1e-6 * e.total));
    const double neg = std::max({0.0, -e.ma, -e.det, -e.evan});
    out.push_back(tol_check("energies_nonnegative", neg, 1e-8 * e.total));
    return out;
}

void run_field(const Json& p, Report& r, std::uint64_t seed) {
    const std::string at = "/parameters";
    const std::string action = opt_string(p, "action", at, "classify");
    const std::int64_t R = opt_int(p, "R", at, 8, 1, 64);

    if (action == "simulate") {
        const std::map<Point, cd> coeffs = read_point_map(req(p, "coeffs", at), at + "/coeffs");
        const double nv = p.contains("noise_variance") ? read_double(p["noise_variance"], at + "/noise_variance") : 1.0;
        const std::int64_t size = opt_int(p, "size", at, 64, 1, 1024);
        const HalfPlane hp = p.contains("past") ? read_halfplane(p["past"], at + "/past") : HalfPlane::L();
        SampleGrid g = simulate_ma(coeffs, nv, hp, seed, size);
        const CovarianceModel model = CovarianceModel::moving_average(coeffs, nv);
        double worst = 0.0;
        Json lags = Json::array();
        for (std::int64_t i = -2; i <= 2; ++i)
            for (std::int64_t j = -2; j <= 2; ++j) {
                const cd sc = sample_covariance(g, {i, j}), mc = model.gamma({i, j});
                worst = std::max(worst, std::abs(sc - mc));
                lags.push_back({{"lag", to_json(Point{i, j})}, {"sample", to_json(sc)}, {"model", to_json(mc)}});
            }
        const double N = static_cast<double>(size * size);
        r.results = {{"size", size}, {"seed", seed}, {"covariance", lags}, {"max_deviation", worst}};
        r.checks.push_back(tol_check("sample_covariance", worst, 5.0 * model.gamma({0, 0}).real() / std::sqrt(N)));
        r.grid = std::move(g);
        return;
    }

    if (action == "evanescent") {
        const Json& ev = req(p, "evanescent", at);
        const std::string eat = at + "/evanescent";
        EvanescentKind kind;
        const std::string type = opt_string(ev, "type", eat, "HorizontalL");
        if (type == "HorizontalL")
            kind.type = EvanescentKind::Type::HorizontalL;
        else if (type == "Rational")
            kind.type = EvanescentKind::Type::Rational;
        else
            throw ConfigError(eat + "/type", "expected \"HorizontalL\" or \"Rational\"");
        kind.k = opt_int(ev, "k", eat, -1, -64, -1);
        kind.l = opt_int(ev, "l", eat, -1, -64, -1);
        kind.K = opt_int(ev, "K", eat, 1, 1, 64);
        kind.beta = read_point_map(req(ev, "beta", eat), eat + "/beta");
        CovarianceModel model = CovarianceModel::white_noise(1.0);
        try {
            model = evanescent_model(kind);
        } catch (const DomainError& e) {
            throw ConfigError(eat + "/beta", e.what());
        }
        const HalfPlane hp = kind.type == EvanescentKind::Type::HorizontalL ? HalfPlane::L() : HalfPlane::sv(kind.k, kind.l);
        const Classification c = classify(model, hp, R);
        r.results = {{"past", to_json(hp)}, {"gamma", lag_table(model, 2)}, {"classification", to_json(c)}};
        for (auto& ch : classification_checks(c)) r.checks.push_back(ch);
        r.checks.push_back(bool_check("label_evanescent", c.label == Label::Evanescent));
        return;
    }

    const CovarianceModel cov = read_covariance(req(p, "cov", at), at + "/cov");
    const HalfPlane hp = p.contains("past") ? read_halfplane(p["past"], at + "/past") : HalfPlane::L();
    r.results["past"] = to_json(hp);
    r.results["R"] = R;

    if (action == "classify") {
        const Classification c = classify(cov, hp, R);
        r.results["sigma2"] = c.sigma2;
        r.results["ma"] = to_json(c.ma);
        r.results["energies"] = to_json(c)["energies"];
        r.results["label"] = to_string(c.label);
        r.results["predicted_evanescent_pair_type"] = c.predicted_pair_type;
        r.results["remote_past_energy"] = c.remote;
        r.results["epsilon"] = c.epsilon;
        r.results["residual_gram_cond"] = c.residual_gram_cond;
        for (auto& ch : classification_checks(c)) r.checks.push_back(ch);
        if (p.contains("expect_label")) {
            const std::string want = opt_string(p, "expect_label", at, "");
            r.checks.push_back(bool_check("expected_label", to_string(c.label) == want));
        }
        return;
    }

    PastSpec ps;
    ps.hp = hp;
    ps.radius = R;
    const std::string trunc = opt_string(p, "truncation", at, "Box");
    if (trunc == "Box")
        ps.truncation = PastSpec::Truncation::Box;
    else if (trunc == "RotatedBox")
        ps.truncation = PastSpec::Truncation::RotatedBox;
    else
        throw ConfigError(at + "/truncation", "expected \"Box\" or \"RotatedBox\"");

    if (action == "innovate") {
        const InnovationResult in = innovate(cov, ps);
        r.results["sigma2"] = in.sigma2;
        r.results["residual_gram_cond"] = in.residual_gram_cond;
        r.results["coeffs"] = to_json(in.coeffs);
        r.checks.push_back(tol_check("sigma2_nonnegative", std::max(0.0, -in.sigma2), 1e-8 * cov.gamma({0, 0}).real()));
    } else if (action == "ma") {
        const std::int64_t W = opt_int(p, "support_radius", at, std::min<std::int64_t>(R, 4), 0, 64);
        const auto a = ma_coefficients(cov, ps, W);
        r.results["ma"] = to_json(a);
        r.checks.push_back(bool_check("a00_is_one", a.at({0, 0}) == cd(1.0)));
    } else if (action == "remote") {
        const int steps = static_cast<int>(opt_int(p, "steps", at, std::max<std::int64_t>(1, R / 2), 1, 64));
        const auto e = remote_past_energy(cov, hp, R, steps);
        r.results["remote_past_energy"] = e;
        double rise = 0.0;
        for (std::size_t t = 1; t < e.size(); ++t) rise = std::max(rise, e[t] - e[t - 1]);
        r.checks.push_back(tol_check("remote_nonincreasing", rise, 1e-8 * cov.gamma({0, 0}).real()));
    } else {
        throw ConfigError(at + "/action", "unknown action \"" + action + "\"");
    }
}

}  // namespace

Report run(const Json& config, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!config.is_object()) throw ConfigError("", "configuration must be a JSON object");
    auto it = config.find("command");
    if (it == config.end() || !it->is_string()) throw ConfigError("/command", "missing or not a string");
    const std::string cmd = it->get<std::string>();
    Json params = config.contains("parameters") ? config["parameters"] : Json::object();
    if (!params.is_object()) throw ConfigError("/parameters", "expected an object");

    Report r;
    r.config = config;
    try {
        if (cmd == "halfplane")
            run_halfplane(params, r);
        else if (cmd == "psi")
            run_psi(params, r);
        else if (cmd == "diagram")
            run_diagram(params, r);
        else if (cmd == "operator")
            run_operator(params, r);
        else if (cmd == "field")
            run_field(params, r, seed);
        else
            throw ConfigError("/command", "unknown command \"" + cmd + "\"");
    } catch (const ConfigError&) {
        throw;
    } catch (const WindowTooSmall& e) {
        r.error = e.what();
        r.results["suggested_R"] = e.suggested_radius;
        r.checks.push_back(bool_check("run", false));
    } catch (const std::domain_error& e) {
        r.error = e.what();
        r.checks.push_back(bool_check("run", false));
    } catch (const std::out_of_range& e) {
        r.error = e.what();
        r.checks.push_back(bool_check("run", false));
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

Format parse_format(const std::string& s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    if (s == "text") return Format::Text;
    throw ConfigError("--format", "expected json, csv or text");
}

Json report_json(const Report& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    Json j = {{"config", r.config},
              {"results", r.results},
              {"checks", checks},
              {"summary", {{"passed", r.passed()}, {"failed", r.failed()}}}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

namespace {

std::string g12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string report_text(const Report& r) {
    std::ostringstream os;
    if (r.config.contains("command")) os << "command " << r.config["command"].get<std::string>() << "\n";
    const Json* energies = nullptr;
    if (r.results.contains("energies"))
        energies = &r.results["energies"];
    else if (r.results.contains("classification"))
        energies = &r.results["classification"]["energies"];
    if (energies) {
        os << "total ma det evan\n";
        os << g12((*energies)["total"].get<double>()) << " " << g12((*energies)["ma"].get<double>()) << " "
           << g12((*energies)["det"].get<double>()) << " " << g12((*energies)["evan"].get<double>()) << "\n";
    }
    if (r.results.contains("label")) os << "label " << r.results["label"].get<std::string>() << "\n";
    for (const auto& c : r.checks) os << (c.pass ? "PASS " : "FAIL ") << c.check << " " << g12(c.max_residual) << "\n";
    if (!r.error.empty()) os << "error " << r.error << "\n";
    os << "passed " << r.passed() << " failed " << r.failed() << "\n";
    return os.str();
}

}  // namespace

std::size_t emit(const Report& r, std::ostream& os, Format f) {
    std::string out;
    if (f == Format::Json) {
        out = canonical_dump(report_json(r));
    } else if (f == Format::Text) {
        out = report_text(r);
    } else if (r.grid) {
        std::ostringstream ss;
        write_grid_csv(ss, *r.grid);
        out = ss.str();
    } else {
        std::ostringstream ss;
        ss << "check,max_residual,pass\n";
        for (const auto& c : r.checks) ss << c.check << "," << g12(c.max_residual) << "," << (c.pass ? 1 : 0) << "\n";
        out = ss.str();
    }
    os << out;
    os.flush();
    if (!os) throw std::runtime_error("write failed");
    return out.size();
}

std::vector<CheckReport> psi_battery(const PsiMap& psi, std::int64_t window) {
    std::vector<CheckReport> out;
    const std::string tag = "psi(" + std::to_string(psi.k) + "," + std::to_string(psi.l) + ")/";
    out.push_back(bool_check(tag + "bezout", psi.p * psi.k + psi.q * psi.l == -1));
    out.push_back(bool_check(tag + "determinant", psi.determinant() == 1));
    const HalfPlane L = HalfPlane::L(), S = HalfPlane::sv(psi.k, psi.l);
    bool fwd = true, inv = true, round = true;
    for (std::int64_t i = -window; i <= window; ++i)
        for (std::int64_t j = -window; j <= window; ++j) {
            const Point x{i, j};
            if (contains(L, x) && !contains(S, psi_apply(psi, x, Direction::Forward))) fwd = false;
            if (contains(S, x) && !contains(L, psi_apply(psi, x, Direction::Inverse))) inv = false;
            if (psi_apply(psi, psi_apply(psi, x, Direction::Forward), Direction::Inverse) != x ||
                psi_apply(psi, psi_apply(psi, x, Direction::Inverse), Direction::Forward) != x)
                round = false;
        }
    out.push_back(bool_check(tag + "forward_into_S", fwd));
    out.push_back(bool_check(tag + "inverse_into_L", inv));
    out.push_back(bool_check(tag + "roundtrip", round));
    return out;
}

BCLData random_bcl_data(std::mt19937_64& rng, int depth, int radius, int p_cycles, int free_dim) {
    const int len = 2 * radius + 2;
    const int e = p_cycles * len + free_dim;
    if (e < 1) throw DomainError("random_bcl_data: empty model");
    std::vector<int> order(static_cast<std::size_t>(e));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<int> perm(static_cast<std::size_t>(e));
    std::vector<int> p_members;
    int pos = 0;
    auto make_cycle = [&](int start, int n) {
        for (int t = 0; t < n; ++t) perm[order[start + t]] = order[start + (t + 1) % n];
    };
    for (int c = 0; c < p_cycles; ++c) {
        make_cycle(pos, len);
        p_members.push_back(order[pos]);
        pos += len;
    }
    // P-free part: random cycle lengths
    std::uniform_int_distribution<int> cl(1, 3);
    while (pos < e) {
        const int n = std::min(cl(rng), e - pos);
        make_cycle(pos, n);
        pos += n;
    }
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    Mat U = Mat::Zero(e, e), P = Mat::Zero(e, e);
    for (int a = 0; a < e; ++a) U(perm[a], a) = std::polar(1.0, ph(rng));
    for (int a : p_members) P(a, a) = 1.0;
    const Mat W = random_unitary(e, rng);
    BCLData d;
    d.U = W * U * W.adjoint();
    d.P = W * P * W.adjoint();
    d.P = 0.5 * (d.P + d.P.adjoint());
    d.depth = depth;
    return d;
}

const std::vector<std::string>& suite_scopes() {
    static const std::vector<std::string> s = {"lattice_halfplane", "diagram_algebra", "operator_models", "field_engine",
                                               "cli_reporting"};
    return s;
}

// ---- verify_suite -----------------------------------------------------------

namespace {

void lattice_suite(const SuiteOptions& opt, std::vector<CheckReport>& out) {
    const std::string pre = "lattice_halfplane/";
    bool axioms = true, transforms = true, transpose = true;
    int hp_count = 0;
    std::vector<HalfPlane> family;
    for (std::int64_t a = -5; a <= 5; ++a)
        for (std::int64_t b = -5; b <= 5; ++b) {
            if (std::gcd(a, b) != 1) continue;
            for (Variant var : {Variant::Sv, Variant::SvHat}) {
                const HalfPlane hp{LatticeVector::rational(a, b), var};
                family.push_back(hp);
                ++hp_count;
                if (!verify_axioms([&](Point q) { return contains(hp, q); }, 10).all_ok()) axioms = false;
                const HalfPlane ng = transform(hp, Transform::Negate), rf = transform(hp, Transform::ReflectX);
                for (std::int64_t i = -6; i <= 6; ++i)
                    for (std::int64_t j = -6; j <= 6; ++j) {
                        if (contains(ng, {i, j}) != contains(hp, {-i, -j})) transforms = false;
                        if (contains(rf, {i, j}) != contains(hp, {i, -j})) transforms = false;
                    }
                if (var == Variant::SvHat && a * b > 0) {
                    const HalfPlane sw = HalfPlane::sv(b, a);
                    for (std::int64_t i = -6; i <= 6; ++i)
                        for (std::int64_t j = -6; j <= 6; ++j)
                            if (contains(hp, {i, j}) != contains(sw, {j, i})) transpose = false;
                }
            }
        }
    const HalfPlane irr{LatticeVector::irrational_approx(Rational(-1), Rational(-14142, 10000), 40), Variant::Sv};
    if (!verify_axioms([&](Point q) { return contains(irr, q); }, 12).all_ok()) axioms = false;
    out.push_back(bool_check(pre + "axioms(" + std::to_string(hp_count + 1) + " half-planes)", axioms));
    out.push_back(bool_check(pre + "negate_reflect", transforms));
    out.push_back(bool_check(pre + "transpose_identity", transpose));

    bool corner_ok = true;
    for (std::int64_t a = -5; a <= -1; ++a)
        for (std::int64_t b = -5; b <= -1; ++b) {
            if (std::gcd(a, b) != 1) continue;
            for (const auto& c : corner_battery(HalfPlane::sv(a, b), 12, 24, nullptr))
                if (!c.pass) corner_ok = false;
        }
    for (const auto& c : corner_battery(HalfPlane::L(), 12, 24, nullptr))
        if (!c.pass) corner_ok = false;
    out.push_back(bool_check(pre + "corner_relations_and_recovery", corner_ok));

    for (std::int64_t k = -6; k <= -1; ++k)
        for (std::int64_t l = -6; l <= -1; ++l) {
            if (std::gcd(k, l) != 1) continue;
            for (auto& c : psi_battery(opt.psi(k, l), 10)) out.push_back(prefixed(pre, c));
        }
}

void diagram_suite(std::vector<CheckReport>& out) {
    const std::string pre = "diagram_algebra/";
    bool period_ok = true, decomp_ok = true, translate_ok = true;
    for (std::int64_t k = -5; k <= -1; ++k)
        for (std::int64_t l = -5; l <= -1; ++l) {
            if (std::gcd(k, l) != 1) continue;
            const HalfPlane hp = HalfPlane::sv(k, l);
            const Diagram d = halfplane_to_diagram(hp, 20);
            const auto mask = boundary_mask(hp, 20);
            const auto per = find_period(d, 8, 8, mask);
            if (!per || per->m != -l || per->n != -k) {
                period_ok = false;
                continue;
            }
            if (!verify_period_decomposition(d, *per, -40, 40, mask)) decomp_ok = false;
            const auto off = translation_equivalent(d, translate(d, {3, -2}));
            if (!off || *off != Point{3, -2}) translate_ok = false;
        }
    out.push_back(bool_check(pre + "period_of_rational_halfplanes", period_ok));
    out.push_back(bool_check(pre + "period_decomposition", decomp_ok));
    out.push_back(bool_check(pre + "translation_equivalence", translate_ok));
}

void operator_suite(const SuiteOptions& opt, std::vector<CheckReport>& out) {
    const std::string pre = "operator_models/";
    std::mt19937_64 rng(opt.seed);
    for (int t = 0; t < 3; ++t) {
        const int depth = 3 + t;
        const int radius = std::max(1, depth - 2);
        const BCLData data = random_bcl_data(rng, depth, radius, 1 + t % 2, 2 + t);
        const TruncatedPair pair = build_bcl(data);
        const std::string tag = pre + "bcl" + std::to_string(t) + "/";
        out.push_back(prefixed(tag, check_pair(pair)));
        out.push_back(prefixed(tag, check_pUnP(data.U, data.P, 2 * radius + 1)));
        out.push_back(prefixed(tag, check_compatibility(pair, 2, 2)));
        out.push_back(prefixed(tag, check_w1_power_projection(pair, data, depth)));
        out.push_back(prefixed(tag, check_shift_relations(pair, data, depth)));
        try {
            out.push_back(tol_check(tag + "kernel_w1_star", kernel_w1_star(pair, data).distance, 1e-9));
            const HtHeSplit sp = ht_he_split(pair, data, radius);
            for (const auto& c : sp.checks) out.push_back(prefixed(tag, c));
        } catch (const DomainError&) {
            out.push_back(bool_check(tag + "ht_he_split", false));
        }
    }
    // generalized powers and the shift bridge
    std::uniform_int_distribution<int> small(1, 3);
    for (int t = 0; t < 3; ++t) {
        GeneralizedPowerData gd;
        gd.m = small(rng);
        gd.n = small(rng) - 1;
        std::int64_t b = 2;
        for (std::int64_t i = 0; i < gd.m; ++i) {
            gd.period_boundary.push_back(ExtInt::finite(b));
            if (i + 1 < gd.m && b > 2 - gd.n) b -= small(rng) % 2;
        }
        const int K = 2 + t;
        gd.unitary = random_unitary(K, rng);
        const CellPair gp = build_generalized_power(gd, 8);
        const std::string tag = pre + "genpow" + std::to_string(t) + "/";
        out.push_back(prefixed(tag, check_pair(gp.pair)));
        out.push_back(prefixed(tag, check_generalized_unitary(gp, gd)));
        out.push_back(prefixed(tag, check_shift_bridge(gd.m, gd.n, gd.period_boundary, K, 8)));
    }
}

void field_suite(const SuiteOptions& opt, std::vector<CheckReport>& out) {
    const std::string pre = "field_engine/";
    const CovarianceModel ma = CovarianceModel::moving_average({{{0, 0}, 1.0}, {{0, -1}, 0.3}, {{-1, -1}, 0.2}}, 1.0);
    const CovarianceModel ma_row = CovarianceModel::moving_average({{{0, 0}, 1.0}, {{-1, 0}, 0.5}}, 1.0);
    const CovarianceModel at = CovarianceModel::line_field(0, 1, 1.0);
    const CovarianceModel ast = CovarianceModel::line_field(1, 1, 1.0);
    const CovarianceModel mixed = CovarianceModel::sum({CovarianceModel::white_noise(1.0), at});
    const std::vector<CovarianceModel> models = {ma, ma_row, at, ast, mixed,
                                                 CovarianceModel::rotated(ma, psi_coefficients(-2, -3).matrix())};

    double herm = 0.0;
    bool psd = true;
    std::vector<Point> box;
    for (std::int64_t i = -2; i <= 2; ++i)
        for (std::int64_t j = -2; j <= 2; ++j) box.push_back({i, j});
    for (const auto& m : models) {
        for (const Point& h : box) herm = std::max(herm, std::abs(m.gamma(-h) - std::conj(m.gamma(h))));
        try {
            gram(m, box);
        } catch (const InvalidCovariance&) {
            psd = false;
        }
    }
    out.push_back(tol_check(pre + "hermitian_symmetry", herm, 1e-14));
    out.push_back(bool_check(pre + "gram_psd", psd));

    double rise = 0.0;
    for (const auto& m : {ma_row, mixed}) {
        double prev = 1e300;
        for (std::int64_t R : {2, 4, 6}) {
            PastSpec ps;
            ps.radius = R;
            const double s2 = innovate(m, ps).sigma2;
            rise = std::max(rise, s2 - prev);
            prev = s2;
        }
    }
    out.push_back(tol_check(pre + "sigma2_monotone_in_R", std::max(0.0, rise), 1e-10));

    double rot = 0.0;
    for (auto [k, l] : {std::pair<std::int64_t, std::int64_t>{-1, -1}, {-1, -2}, {-2, -3}}) {
        PastSpec a, b;
        a.radius = b.radius = 6;
        b.hp = HalfPlane::sv(k, l);
        b.truncation = PastSpec::Truncation::RotatedBox;
        const CovarianceModel rc = CovarianceModel::rotated(ma, psi_coefficients(k, l).matrix());
        rot = std::max(rot, std::abs(innovate(rc, a).sigma2 - innovate(ma, b).sigma2));
    }
    out.push_back(tol_check(pre + "rotation_covariance", rot, 1e-9));

    {
        PastSpec ps;
        ps.hp = HalfPlane::sv(-1, -1);
        ps.radius = 8;
        const auto a = ma_coefficients(ma, ps, 3);
        out.push_back(bool_check(pre + "a00_exact", a.at({0, 0}) == cd(1.0)));
    }

    bool stable = true;
    const std::vector<std::pair<CovarianceModel, HalfPlane>> examples = {
        {at, HalfPlane::L()}, {ast, HalfPlane::sv(-1, -1)}, {ast, HalfPlane::L()}};
    const std::vector<Label> want = {Label::Evanescent, Label::Evanescent, Label::Deterministic};
    for (std::size_t e = 0; e < examples.size(); ++e)
        for (std::int64_t R : {8, 12, 16})
            if (classify(examples[e].first, examples[e].second, R).label != want[e]) stable = false;
    out.push_back(bool_check(pre + "example_labels_stable_in_R", stable));

    {
        const SampleGrid g1 = simulate_ma(ma_row.points(), 1.0, HalfPlane::L(), opt.seed, 64);
        const SampleGrid g2 = simulate_ma(ma_row.points(), 1.0, HalfPlane::L(), opt.seed, 64);
        out.push_back(bool_check(pre + "simulate_seed_repeatable", g1.values == g2.values));
        double worst = 0.0;
        for (const Point& h : box) worst = std::max(worst, std::abs(sample_covariance(g1, h) - ma_row.gamma(h)));
        out.push_back(tol_check(pre + "simulate_covariance", worst, 5.0 * ma_row.gamma({0, 0}).real() / 64.0));
    }

    {
        EvanescentKind h;
        h.beta = {{{0, 0}, 1.0}};
        EvanescentKind q;
        q.type = EvanescentKind::Type::Rational;
        q.beta = {{{0, 0}, 1.0}};
        const CovarianceModel eh = evanescent_model(h), eq = evanescent_model(q);
        double dev = 0.0;
        for (const Point& x : box) dev = std::max({dev, std::abs(eh.gamma(x) - at.gamma(x)), std::abs(eq.gamma(x) - ast.gamma(x))});
        out.push_back(tol_check(pre + "evanescent_model_collapse", dev, 0.0));
        EvanescentKind h2;
        h2.beta = {{{0, 0}, 1.0}, {{0, 1}, 0.5}};
        out.push_back(bool_check(pre + "evanescent_model_label",
                                 classify(evanescent_model(h2), HalfPlane::L(), 8).label == Label::Evanescent));
    }

    {
        const Classification c = classify(CovarianceModel::white_noise(1.0), HalfPlane::sv(-2, -3), 6);
        for (auto& ch : classification_checks(c)) out.push_back(prefixed(pre, ch));
    }
}

void cli_suite(const SuiteOptions& opt, std::vector<CheckReport>& out) {
    const std::string pre = "cli_reporting/";
    const Json cfg = Json::parse(R"({"command":"field","parameters":{"cov":{"kind":"LineField","c":1,"d":1,"variance":1},"past":{"vector":[-1,-1],"variant":"Sv"},"R":6}})");
    std::ostringstream a, b;
    emit(run(cfg, opt.seed), a, Format::Json);
    emit(run(cfg, opt.seed), b, Format::Json);
    out.push_back(bool_check(pre + "json_deterministic", a.str() == b.str()));

    const Json sim = Json::parse(R"({"command":"field","parameters":{"action":"simulate","coeffs":[{"point":[0,0],"value":1},{"point":[-1,0],"value":[0.5,0.25]}],"size":16}})");
    const Report rs = run(sim, opt.seed);
    std::stringstream csv;
    emit(rs, csv, Format::Csv);
    const SampleGrid back = read_grid_csv(csv);
    out.push_back(bool_check(pre + "csv_roundtrip", rs.grid && back.values == rs.grid->values));

    bool exit2 = false;
    try {
        run(Json::parse(R"({"command":"psi","parameters":{"k":3,"l":-2}})"));
    } catch (const ConfigError&) {
        exit2 = true;
    }
    out.push_back(bool_check(pre + "config_error_detected", exit2));

    std::ostringstream t;
    emit(run(cfg, opt.seed), t, Format::Text);
    out.push_back(bool_check(pre + "text_energy_header", t.str().find("total ma det evan\n") != std::string::npos));
}

}  // namespace

Report verify_suite(const std::string& scope, const SuiteOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& scopes = suite_scopes();
    if (scope != "all" && std::find(scopes.begin(), scopes.end(), scope) == scopes.end())
        throw ConfigError("--verify", "unknown scope \"" + scope + "\"");
    Report r;
    r.config = {{"verify", scope}, {"seed", options.seed}};
    auto want = [&](const std::string& s) { return scope == "all" || scope == s; };
    if (want("lattice_halfplane")) lattice_suite(options, r.checks);
    if (want("diagram_algebra")) diagram_suite(r.checks);
    if (want("operator_models")) operator_suite(options, r.checks);
    if (want("field_engine")) field_suite(options, r.checks);
    if (want("cli_reporting")) cli_suite(options, r.checks);
    r.results = {{"scope", scope}, {"checks_run", r.checks.size()}};
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace wold2d
