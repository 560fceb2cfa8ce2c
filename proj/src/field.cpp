#include "wold2d/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace wold2d {

CovarianceModel CovarianceModel::white_noise(double variance) {
    if (!(variance >= 0.0)) throw InvalidCovariance("WhiteNoise: variance must be >= 0");
    CovarianceModel m;
    m.kind_ = Kind::WhiteNoise;
    m.variance_ = variance;
    return m;
}

CovarianceModel CovarianceModel::line_field(std::int64_t c, std::int64_t d, double variance, std::int64_t period) {
    if (!(variance >= 0.0)) throw InvalidCovariance("LineField: variance must be >= 0");
    if (period < 1) throw InvalidCovariance("LineField: period must be >= 1");
    if (c == 0 && d == 0 && period != 1) throw InvalidCovariance("LineField: c = d = 0 needs period 1");
    CovarianceModel m;
    m.kind_ = Kind::LineField;
    m.c_ = c;
    m.d_ = d;
    m.variance_ = variance;
    m.period_ = period;
    return m;
}

CovarianceModel CovarianceModel::moving_average(PointMap coeffs, double noise_variance) {
    if (!(noise_variance >= 0.0)) throw InvalidCovariance("MovingAverage: noise variance must be >= 0");
    CovarianceModel m;
    m.kind_ = Kind::MovingAverage;
    m.points_ = std::move(coeffs);
    m.variance_ = noise_variance;
    return m;
}

CovarianceModel CovarianceModel::table(PointMap entries) {
    for (const auto& [h, v] : entries) {
        auto it = entries.find(-h);
        if (it != entries.end() && std::abs(it->second - std::conj(v)) > 1e-12 * (1.0 + std::abs(v)))
            throw InvalidCovariance("Table: gamma(-h) != conj gamma(h) at (" + std::to_string(h.i) + "," +
                                    std::to_string(h.j) + ")");
    }
    if (!entries.count({0, 0})) throw InvalidCovariance("Table: gamma(0,0) missing");
    CovarianceModel m;
    m.kind_ = Kind::Table;
    m.points_ = std::move(entries);
    return m;
}

CovarianceModel CovarianceModel::sum(std::vector<CovarianceModel> parts) {
    CovarianceModel m;
    m.kind_ = Kind::Sum;
    for (auto& p : parts) m.parts_.push_back(std::make_shared<const CovarianceModel>(std::move(p)));
    return m;
}

CovarianceModel CovarianceModel::filtered(CovarianceModel base, PointMap beta) {
    CovarianceModel m;
    m.kind_ = Kind::Filtered;
    m.parts_.push_back(std::make_shared<const CovarianceModel>(std::move(base)));
    m.points_ = std::move(beta);
    return m;
}

CovarianceModel CovarianceModel::rotated(CovarianceModel base, std::array<std::array<std::int64_t, 2>, 2> matrix) {
    CovarianceModel m;
    m.kind_ = Kind::Rotated;
    m.parts_.push_back(std::make_shared<const CovarianceModel>(std::move(base)));
    m.matrix_ = matrix;
    return m;
}

cd CovarianceModel::gamma(Point h) const {
    switch (kind_) {
        case Kind::WhiteNoise:
            return (h.i == 0 && h.j == 0) ? cd(variance_) : cd(0.0);
        case Kind::LineField: {
            if (c_ * h.i + d_ * h.j != 0) return 0.0;
            if (period_ == 1) return variance_;
            // h = kappa * u with u the primitive direction of the line
            const std::int64_t g = std::gcd(c_, d_);
            const std::int64_t ui = d_ / g, uj = -c_ / g;
            const std::int64_t kappa = (ui != 0) ? h.i / ui : h.j / uj;
            return (kappa % period_ == 0) ? cd(variance_) : cd(0.0);
        }
        case Kind::MovingAverage: {
            cd s = 0.0;
            for (const auto& [k, ck] : points_) {
                auto it = points_.find(k - h);
                if (it != points_.end()) s += ck * std::conj(it->second);
            }
            return variance_ * s;
        }
        case Kind::Table: {
            auto it = points_.find(h);
            if (it != points_.end()) return it->second;
            it = points_.find(-h);
            if (it != points_.end()) return std::conj(it->second);
            throw WindowExceeded("Table covariance has no entry for lag (" + std::to_string(h.i) + "," +
                                 std::to_string(h.j) + ")");
        }
        case Kind::Sum: {
            cd s = 0.0;
            for (const auto& p : parts_) s += p->gamma(h);
            return s;
        }
        case Kind::Filtered: {
            cd s = 0.0;
            for (const auto& [a, ba] : points_)
                for (const auto& [b, bb] : points_) s += ba * std::conj(bb) * parts_[0]->gamma(h + b - a);
            return s;
        }
        case Kind::Rotated: {
            const auto& A = matrix_;
            return parts_[0]->gamma({A[0][0] * h.i + A[0][1] * h.j, A[1][0] * h.i + A[1][1] * h.j});
        }
    }
    return 0.0;
}

void check_causal(const CovarianceModel& cov, const HalfPlane& hp) {
    if (cov.kind() == CovarianceModel::Kind::Sum) {
        for (const auto& p : cov.parts()) check_causal(*p, hp);
        return;
    }
    if (cov.kind() != CovarianceModel::Kind::MovingAverage) return;
    for (const auto& [k, v] : cov.points()) {
        if (k == Point{0, 0} || v == cd(0.0)) continue;
        if (!contains(hp, k))
            throw CausalityError("moving-average coefficient at (" + std::to_string(k.i) + "," + std::to_string(k.j) +
                                 ") lies outside S u {0}");
    }
}

namespace {

// Lazily filled dense table of gamma over the difference box of a point set.
class LagTable {
public:
    LagTable(const CovarianceModel& cov, const std::vector<Point>& pts) : cov_(cov) {
        std::int64_t imin = 0, imax = 0, jmin = 0, jmax = 0;
        for (const Point& p : pts) {
            imin = std::min(imin, p.i);
            imax = std::max(imax, p.i);
            jmin = std::min(jmin, p.j);
            jmax = std::max(jmax, p.j);
        }
        ri_ = imax - imin;
        rj_ = jmax - jmin;
        const std::size_t n = static_cast<std::size_t>((2 * ri_ + 1) * (2 * rj_ + 1));
        vals_.assign(n, cd(0.0));
        have_.assign(n, 0);
    }

    cd operator()(Point h) {
        if (std::abs(h.i) > ri_ || std::abs(h.j) > rj_) return cov_.gamma(h);
        const std::size_t idx = static_cast<std::size_t>((h.i + ri_) * (2 * rj_ + 1) + (h.j + rj_));
        if (!have_[idx]) {
            vals_[idx] = cov_.gamma(h);
            have_[idx] = 1;
        }
        return vals_[idx];
    }

private:
    const CovarianceModel& cov_;
    std::int64_t ri_ = 0, rj_ = 0;
    std::vector<cd> vals_;
    std::vector<char> have_;
};

struct Solved {
    std::vector<Point> offsets;
    CVec c;
    double sigma2 = 0.0;
    double gamma0 = 0.0;
    double cond = 0.0;
};

// Eigen-decomposition of a Gram matrix with the PSD check and the
// pseudo-inverse cutoff.
struct GramSolver {
    Eigen::SelfAdjointEigenSolver<CMat> es;
    double lmax = 0.0, lmin_kept = 0.0;

    GramSolver(const CMat& G, double gamma0) : es(G) {
        const auto& ev = es.eigenvalues();
        if (ev.size() == 0) return;
        if (ev(0) < -1e-8 * std::max(gamma0, 1e-300))
            throw InvalidCovariance("Gram matrix is not positive semidefinite (eigenvalue " + std::to_string(ev(0)) +
                                    ")");
        lmax = ev(ev.size() - 1);
        lmin_kept = lmax;
        for (int t = 0; t < ev.size(); ++t)
            if (ev(t) > 1e-10 * lmax) lmin_kept = std::min(lmin_kept, ev(t));
    }

    CVec solve(const CVec& r) const {
        const auto& ev = es.eigenvalues();
        const CMat& V = es.eigenvectors();
        CVec y = V.adjoint() * r;
        for (int t = 0; t < ev.size(); ++t) y(t) = (lmax > 0 && ev(t) > 1e-10 * lmax) ? y(t) / ev(t) : cd(0.0);
        return V * y;
    }

    double cond() const { return lmin_kept > 0 ? lmax / lmin_kept : 0.0; }
};

Solved solve_predictor(const CovarianceModel& cov, const PastSpec& past) {
    Solved s;
    s.offsets = past_offsets(past);
    if (s.offsets.empty()) throw DomainError("truncated past is empty");
    std::vector<Point> with_origin = s.offsets;
    with_origin.push_back({0, 0});
    LagTable g(cov, with_origin);
    s.gamma0 = g({0, 0}).real();
    const int n = static_cast<int>(s.offsets.size());
    CMat G(n, n);
    CVec r(n);
    for (int a = 0; a < n; ++a) {
        r(a) = g(s.offsets[a]);
        for (int b = a; b < n; ++b) {
            G(a, b) = g(s.offsets[a] - s.offsets[b]);
            G(b, a) = std::conj(G(a, b));
        }
    }
    GramSolver gs(G, s.gamma0);
    s.c = gs.solve(r);
    s.cond = gs.cond();
    double sigma2 = s.gamma0 - r.dot(s.c).real();
    if (sigma2 < -1e-8 * s.gamma0) throw InvalidCovariance("negative innovation variance " + std::to_string(sigma2));
    s.sigma2 = std::max(0.0, sigma2);
    return s;
}

}  // namespace

CMat gram(const CovarianceModel& cov, const std::vector<Point>& points) {
    std::vector<Point> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DomainError("gram: points must be distinct");
    const int n = static_cast<int>(points.size());
    CMat G(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) G(a, b) = cov.gamma(points[a] - points[b]);
    if (n > 0) GramSolver check(G, cov.gamma({0, 0}).real());
    return G;
}

std::vector<Point> past_offsets(const PastSpec& past) {
    const std::int64_t R = past.radius;
    if (R < 1) throw DomainError("past radius must be >= 1");
    std::vector<Point> out;
    if (past.truncation == PastSpec::Truncation::Box) {
        for (std::int64_t i = -R; i <= R; ++i)
            for (std::int64_t j = -R; j <= R; ++j)
                if (contains(past.hp, {i, j})) out.push_back({i, j});
    } else {
        const LatticeVector& v = past.hp.vector;
        if (!v.is_rational() || v.int1() >= 0 || v.int2() >= 0 || past.hp.variant != Variant::Sv)
            throw DomainError("rotated truncation needs S_(k,l) with k, l < 0");
        const PsiMap psi = psi_coefficients(v.int1(), v.int2());
        const HalfPlane L = HalfPlane::L();
        for (std::int64_t i = -R; i <= R; ++i)
            for (std::int64_t j = -R; j <= R; ++j)
                if (contains(L, {i, j})) out.push_back(psi_apply(psi, {i, j}, Direction::Forward));
    }
    std::sort(out.begin(), out.end());
    return out;
}

InnovationResult innovate(const CovarianceModel& cov, const PastSpec& past) {
    const Solved s = solve_predictor(cov, past);
    InnovationResult r;
    r.sigma2 = s.sigma2;
    r.residual_gram_cond = s.cond;
    for (std::size_t a = 0; a < s.offsets.size(); ++a) r.coeffs[past.base + s.offsets[a]] = s.c(static_cast<int>(a));
    return r;
}

namespace {

std::map<Point, cd> ma_from_solved(const CovarianceModel& cov, const PastSpec& past, const Solved& s,
                                   std::int64_t W) {
    if (s.sigma2 <= 1e-10 * s.gamma0) throw NoMAPart("innovation is trivial; the field has no moving-average part");
    std::map<Point, cd> a;
    a[{0, 0}] = 1.0;
    for (std::int64_t i = -W; i <= W; ++i)
        for (std::int64_t j = -W; j <= W; ++j) {
            const Point x{i, j};
            if (x == Point{0, 0} || !contains(past.hp, x)) continue;
            cd num = cov.gamma(x);
            for (std::size_t t = 0; t < s.offsets.size(); ++t)
                num -= std::conj(s.c(static_cast<int>(t))) * cov.gamma(x + s.offsets[t]);
            a[x] = num / s.sigma2;
        }
    return a;
}

}  // namespace

std::map<Point, cd> ma_coefficients(const CovarianceModel& cov, const PastSpec& past, std::int64_t support_radius) {
    check_causal(cov, past.hp);
    return ma_from_solved(cov, past, solve_predictor(cov, past), support_radius);
}

std::vector<double> remote_past_energy(const CovarianceModel& cov, const HalfPlane& hp, std::int64_t radius,
                                       int steps) {
    if (steps < 1) throw DomainError("remote_past_energy: steps must be >= 1");
    PastSpec ps;
    ps.hp = hp;
    ps.radius = radius;
    const std::vector<Point> offs = past_offsets(ps);
    const Point d = recession_direction(hp.vector);
    const int n = static_cast<int>(offs.size());

    std::vector<Point> pts = offs;
    pts.push_back({0, 0});
    LagTable g(cov, pts);
    const double gamma0 = g({0, 0}).real();
    CMat G(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            G(a, b) = g(offs[a] - offs[b]);
            G(b, a) = std::conj(G(a, b));
        }
    // the Gram matrix is the same for every base point; only the right-hand side moves
    GramSolver gs(G, gamma0);
    std::vector<double> out;
    for (int s = 1; s <= steps; ++s) {
        const Point b{s * d.i, s * d.j};
        CVec r(n);
        for (int a = 0; a < n; ++a) r(a) = cov.gamma(b + offs[a]);
        out.push_back(std::max(0.0, r.dot(gs.solve(r)).real()));
    }
    return out;
}

std::string to_string(Label l) {
    switch (l) {
        case Label::PurelyNondeterministic:
            return "PurelyNondeterministic";
        case Label::Evanescent:
            return "Evanescent";
        case Label::Deterministic:
            return "Deterministic";
        case Label::Mixed:
            return "Mixed";
    }
    return "Mixed";
}

std::string predicted_pair_type(const HalfPlane& hp) {
    const LatticeVector& v = hp.vector;
    if (!v.is_rational()) return "continuously given";
    if (v.int1() == 0 || v.int2() == 0) return "unitary x unilateral shift";
    return "generalized powers";
}

Classification classify(const CovarianceModel& cov, const HalfPlane& hp, std::int64_t radius) {
    check_causal(cov, hp);
    Classification c;
    c.radius = radius;
    c.predicted_pair_type = predicted_pair_type(hp);
    PastSpec ps;
    ps.hp = hp;
    ps.radius = radius;
    const Solved s = solve_predictor(cov, ps);
    const double total = s.gamma0;
    c.sigma2 = s.sigma2;
    c.residual_gram_cond = s.cond;
    c.energies.total = total;
    if (s.sigma2 > 1e-10 * total) {
        c.ma = ma_from_solved(cov, ps, s, radius);
        double sum = 0.0;
        for (const auto& [x, a] : c.ma) sum += std::norm(a);
        c.energies.ma = s.sigma2 * sum;
    }
    c.remote = remote_past_energy(cov, hp, radius, static_cast<int>(std::max<std::int64_t>(1, radius / 2)));
    c.energies.det = c.remote.back();
    c.energies.evan = total - c.energies.ma - c.energies.det;

    const double tol = 1e-8 * total;
    if (c.energies.ma < -tol || c.energies.det < -tol || c.energies.evan < -tol)
        throw WindowTooSmall("inconsistent energies at R=" + std::to_string(radius) + " (evan " +
                                 std::to_string(c.energies.evan) + "); retry with R=" + std::to_string(2 * radius),
                             2 * radius);

    const double eps = c.epsilon;
    if (c.energies.det > (1 - eps) * total)
        c.label = Label::Deterministic;
    else if (s.sigma2 <= eps * total && c.energies.det <= eps * total)
        c.label = Label::Evanescent;
    else if (c.energies.ma > (1 - eps) * total)
        c.label = Label::PurelyNondeterministic;
    else
        c.label = Label::Mixed;
    return c;
}

SampleGrid simulate_ma(const std::map<Point, cd>& coeffs, double noise_variance, const HalfPlane& hp,
                       std::uint64_t seed, std::int64_t size) {
    if (size < 1) throw DomainError("simulate_ma: window size must be >= 1");
    if (!(noise_variance >= 0.0)) throw DomainError("simulate_ma: noise variance must be >= 0");
    std::int64_t kimin = 0, kimax = 0, kjmin = 0, kjmax = 0;
    for (const auto& [k, v] : coeffs) {
        if (k != Point{0, 0} && v != cd(0.0) && !contains(hp, k))
            throw CausalityError("simulate_ma: coefficient at (" + std::to_string(k.i) + "," + std::to_string(k.j) +
                                 ") lies outside S u {0}");
        kimin = std::min(kimin, k.i);
        kimax = std::max(kimax, k.i);
        kjmin = std::min(kjmin, k.j);
        kjmax = std::max(kjmax, k.j);
    }
    // innovations on the enlarged window [kmin, size - 1 + kmax]
    const std::int64_t ws = size + kimax - kimin, wt = size + kjmax - kjmin;
    std::vector<cd> W(static_cast<std::size_t>(ws * wt));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, std::sqrt(noise_variance / 2.0));
    for (auto& w : W) {
        const double re = nd(rng);
        const double im = nd(rng);
        w = cd(re, im);
    }
    auto wat = [&](std::int64_t s, std::int64_t t) {
        return W[static_cast<std::size_t>((t - kjmin) * ws + (s - kimin))];
    };
    SampleGrid g;
    g.width = size;
    g.height = size;
    g.values.assign(static_cast<std::size_t>(size * size), cd(0.0));
    for (std::int64_t t = 0; t < size; ++t)
        for (std::int64_t s = 0; s < size; ++s) {
            cd x = 0.0;
            for (const auto& [k, v] : coeffs) x += v * wat(s + k.i, t + k.j);
            g.values[static_cast<std::size_t>(t * size + s)] = x;
        }
    return g;
}

cd sample_covariance(const SampleGrid& g, Point h) {
    cd s = 0.0;
    std::int64_t count = 0;
    for (std::int64_t t = g.t0; t < g.t0 + g.height; ++t)
        for (std::int64_t u = g.s0; u < g.s0 + g.width; ++u) {
            const std::int64_t s2 = u + h.i, t2 = t + h.j;
            if (s2 < g.s0 || s2 >= g.s0 + g.width || t2 < g.t0 || t2 >= g.t0 + g.height) continue;
            s += g.at(u, t) * std::conj(g.at(s2, t2));
            ++count;
        }
    if (count == 0) throw WindowExceeded("sample_covariance: lag exceeds the grid");
    return s / static_cast<double>(count);
}

CovarianceModel evanescent_model(const EvanescentKind& kind) {
    if (kind.K < 1) throw DomainError("evanescent_model: K must be a positive integer");
    if (kind.beta.empty()) throw DomainError("evanescent_model: beta is empty");
    CovarianceModel base = CovarianceModel::white_noise(1.0);
    if (kind.type == EvanescentKind::Type::HorizontalL) {
        for (const auto& [p, v] : kind.beta)
            if (p.i < 0 || p.i > kind.K - 1 || p.j < 0)
                throw DomainError("evanescent_model: beta index (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                                  ") outside 0 <= s <= K-1, t >= 0");
        base = CovarianceModel::line_field(0, 1, 1.0, kind.K);
    } else {
        const std::int64_t k = kind.k, l = kind.l;
        if (k >= 0 || l >= 0 || std::gcd(k, l) != 1)
            throw DomainError("evanescent_model: (k,l) must be negative and coprime");
        const HalfPlane S = HalfPlane::sv(k, l);
        for (const auto& [p, v] : kind.beta) {
            const bool in_j = (p == Point{0, 0}) || contains(S, -p);
            if (!in_j || p.i < 0 || p.i > -l * kind.K - 1)
                throw DomainError("evanescent_model: beta index (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                                  ") outside J_{0..K-1}");
        }
        // F is K-periodic along (-l, k), the line k p + l q = 0
        base = CovarianceModel::line_field(k, l, 1.0, kind.K);
    }
    if (kind.beta.size() == 1 && kind.beta.begin()->first == Point{0, 0} && kind.beta.begin()->second == cd(1.0))
        return base;
    return CovarianceModel::filtered(base, kind.beta);
}

}  // namespace wold2d
