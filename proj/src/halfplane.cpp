#include "wold2d/halfplane.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

namespace wold2d {

namespace {

using i128 = __int128;

int sgn(i128 x) { return (x > 0) - (x < 0); }

bool lex_negative(Point p) { return p.i < 0 || (p.i == 0 && p.j < 0); }

std::int64_t iabs(std::int64_t x) { return x < 0 ? -x : x; }

}  // namespace

LatticeVector LatticeVector::rational(std::int64_t v1, std::int64_t v2) {
    if (v1 == 0 && v2 == 0) throw DomainError("half-plane vector must be nonzero");
    std::int64_t g = std::gcd(iabs(v1), iabs(v2));
    LatticeVector v;
    v.mode_ = Mode::Rational;
    v.v1_ = Rational(v1 / g);
    v.v2_ = Rational(v2 / g);
    v.bound_ = 0;
    return v;
}

LatticeVector LatticeVector::irrational_approx(Rational v1, Rational v2, std::int64_t window_bound) {
    if (window_bound < 1) throw DomainError("window_bound must be positive");
    if (v1.numerator() == 0 && v2.numerator() == 0) throw DomainError("half-plane vector must be nonzero");
    LatticeVector v;
    v.mode_ = Mode::IrrationalApprox;
    v.v1_ = v1;
    v.v2_ = v2;
    v.bound_ = window_bound;
    if (!irrational_window_check(v, window_bound))
        throw DomainError("approximant has a lattice point on its boundary line inside the window");
    return v;
}

std::int64_t LatticeVector::int1() const {
    if (!is_rational()) throw DomainError("integer components requested for an irrational approximant");
    return v1_.numerator();
}

std::int64_t LatticeVector::int2() const {
    if (!is_rational()) throw DomainError("integer components requested for an irrational approximant");
    return v2_.numerator();
}

int LatticeVector::sign_dot(Point p) const {
    // i*a/b + j*c/d with b,d > 0 has the sign of i*a*d + j*c*b.
    i128 a = v1_.numerator(), b = v1_.denominator();
    i128 c = v2_.numerator(), d = v2_.denominator();
    return sgn(i128(p.i) * a * d + i128(p.j) * c * b);
}

bool LatticeVector::in_window(Point p) const {
    if (is_rational()) return true;
    return iabs(p.i) <= bound_ && iabs(p.j) <= bound_;
}

LatticeVector LatticeVector::negated() const {
    LatticeVector v = *this;
    v.v1_ = -v1_;
    v.v2_ = -v2_;
    return v;
}

LatticeVector LatticeVector::reflected_x() const {
    LatticeVector v = *this;
    v.v2_ = -v2_;
    return v;
}

bool contains(const HalfPlane& hp, Point p) {
    if (!hp.vector.in_window(p))
        throw WindowExceeded("point (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                             ") outside certified window " + std::to_string(hp.vector.window_bound()));
    if (p.i == 0 && p.j == 0) return false;
    int s = hp.vector.sign_dot(p);
    if (s != 0) return s > 0;
    bool neg = lex_negative(p);
    return hp.variant == Variant::Sv ? neg : !neg;
}

Order compare_order(const HalfPlane& hp, Point a, Point b) {
    if (a == b) return Order::Equal;
    return contains(hp, a - b) ? Order::Less : Order::Greater;
}

AxiomReport verify_axioms(const Predicate& membership, std::int64_t window) {
    if (window < 1) throw DomainError("verify_axioms: window must be >= 1");
    AxiomReport rep;
    const std::int64_t W = window, side = 2 * W + 1;
    std::vector<char> table(static_cast<std::size_t>(side * side));
    auto idx = [&](std::int64_t i, std::int64_t j) { return static_cast<std::size_t>((i + W) * side + (j + W)); };
    std::vector<Point> members;
    for (std::int64_t i = -W; i <= W; ++i)
        for (std::int64_t j = -W; j <= W; ++j) {
            bool in = membership({i, j});
            table[idx(i, j)] = in;
            if (in) members.push_back({i, j});
        }

    if (table[idx(0, 0)]) {
        rep.origin_ok = false;
        rep.counterexamples["origin"] = {{0, 0}};
    }

    for (std::size_t a = 0; a < members.size() && rep.semigroup_ok; ++a)
        for (std::size_t b = a; b < members.size(); ++b) {
            Point s = members[a] + members[b];
            if (iabs(s.i) > W || iabs(s.j) > W) continue;
            if (!table[idx(s.i, s.j)]) {
                rep.semigroup_ok = false;
                rep.counterexamples["semigroup"] = {members[a], members[b]};
                break;
            }
        }

    for (std::int64_t i = -W; i <= W && rep.antisymmetry_ok; ++i)
        for (std::int64_t j = -W; j <= W; ++j) {
            if (i == 0 && j == 0) continue;
            if (table[idx(i, j)] == table[idx(-i, -j)]) {
                rep.antisymmetry_ok = false;
                // report the representative with the smaller lexicographic rank
                Point p{i, j};
                rep.counterexamples["antisymmetry"] = {lex_negative(p) ? -p : p};
                break;
            }
        }
    return rep;
}

const ExtInt& CornerSequence::at(std::int64_t j) const {
    if (!in_range(j)) throw WindowExceeded("corner sequence index " + std::to_string(j) + " out of range");
    return entries[static_cast<std::size_t>(j - j_lo)];
}

namespace {

void require_lower_left(const HalfPlane& hp) {
    if (!contains(hp, {-1, 0}) || !contains(hp, {0, -1}))
        throw DomainError("half-plane must contain (-1,0) and (0,-1); transform it first");
}

// max t with the point (t, fixed) [along_i] or (fixed, t) in S.
ExtInt axis_max(const HalfPlane& hp, std::int64_t fixed, bool along_i) {
    const LatticeVector& v = hp.vector;
    if (!v.is_rational() && iabs(fixed) > v.window_bound())
        throw WindowExceeded("fixed coordinate " + std::to_string(fixed) + " outside certified window");
    auto pt = [&](std::int64_t t) { return along_i ? Point{t, fixed} : Point{fixed, t}; };
    Rational coef = along_i ? v.v1() : v.v2();
    Rational cst = (along_i ? v.v2() : v.v1()) * fixed;

    ExtInt result;
    if (coef.numerator() == 0) {
        if (cst.numerator() > 0) return ExtInt::pos_inf();
        if (cst.numerator() < 0) return ExtInt::neg_inf();
        // the whole line lies on the boundary; it passes through the origin
        result = ExtInt::finite(-1);
        if (!contains(hp, pt(-1)) || contains(hp, pt(0))) throw DomainError("boundary line is not a down-ray");
        return result;
    }
    if (coef.numerator() > 0) throw DomainError("half-plane does not contain the negative unit step");
    Rational t_star = -cst / coef;
    std::int64_t f = floor_div(t_star);
    if (t_star.denominator() == 1) {
        result = ExtInt::finite(contains(hp, pt(f)) ? f : f - 1);
    } else {
        result = ExtInt::finite(f);
    }
    if (!v.is_rational() && iabs(result.value) + 1 > v.window_bound())
        throw WindowExceeded("corner extends past the certified window");
    return result;
}

}  // namespace

ExtInt row_max(const HalfPlane& hp, std::int64_t j) {
    require_lower_left(hp);
    return axis_max(hp, j, true);
}

ExtInt column_max(const HalfPlane& hp, std::int64_t i) {
    require_lower_left(hp);
    return axis_max(hp, i, false);
}

CornerSequence corner_sequence(const HalfPlane& hp, std::int64_t j_lo, std::int64_t j_hi) {
    if (j_hi < j_lo) throw DomainError("corner_sequence: empty j range");
    require_lower_left(hp);
    CornerSequence cs;
    cs.j_lo = j_lo;
    cs.j_hi = j_hi;
    for (std::int64_t j = j_lo; j <= j_hi; ++j) cs.entries.push_back(axis_max(hp, j, true));
    return cs;
}

CornerRelations check_corner_relations(const CornerSequence& cs) {
    CornerRelations r;
    auto fin = [&](std::int64_t j) { return cs.in_range(j) && cs.at(j).is_finite(); };
    auto M = [&](std::int64_t j) { return cs.at(j).value; };

    for (std::int64_t j = cs.j_lo; j < cs.j_hi; ++j)
        if (cs.at(j) < cs.at(j + 1)) r.monotone_ok = false;

    for (std::int64_t j = cs.j_lo; j <= cs.j_hi; ++j) {
        if (j == 0 || !fin(j) || !fin(-j)) continue;
        if (M(j) != -M(-j) - 1) r.mirror_ok = false;
    }

    for (std::int64_t j = cs.j_lo; j <= cs.j_hi; ++j)
        for (std::int64_t p = cs.j_lo; p <= cs.j_hi; ++p) {
            if (!fin(j) || !fin(p) || !fin(j + p)) continue;
            std::int64_t d = M(j + p) - M(j);
            if (d < M(p) || d > M(p) + 1) r.increment_ok = false;
        }

    if (fin(1)) {
        std::int64_t m = -M(1) - 1;
        r.gap = m;
        for (std::int64_t j = cs.j_lo; j < cs.j_hi; ++j) {
            if (!fin(j) || !fin(j + 1)) continue;
            std::int64_t d = M(j) - M(j + 1);
            if (d != m && d != m + 1) r.gap_ok = false;
        }
    }
    return r;
}

bool corner_membership(const CornerSequence& cs, Point p) {
    const ExtInt& m = cs.at(p.j);
    if (m.is_pos_inf()) return true;
    if (m.is_neg_inf()) return false;
    return p.i <= m.value;
}

VectorEstimate recover_vector(const CornerSequence& cs) {
    if (!cs.in_range(0) || cs.at(0) != ExtInt::finite(-1))
        throw DomainError("recover_vector: corner sequence needs M_0 = -1");
    if (cs.j_hi < 1) throw DomainError("recover_vector: needs at least one positive j");
    VectorEstimate out;
    for (std::int64_t j = 1; j <= cs.j_hi; ++j) {
        const ExtInt& m = cs.at(j);
        if (!m.is_finite())
            throw DomainError("recover_vector: infinite corner at j = " + std::to_string(j) +
                              " (degenerate axis; the half-plane is L or L')");
        out.delta.push_back(Rational(-1 - m.value, j));
    }
    out.estimate = out.delta.back();
    out.error_bound = Rational(1, cs.j_hi);
    out.vector = {Rational(-1), -out.estimate};
    return out;
}

PsiMap psi_coefficients(std::int64_t k, std::int64_t l) {
    if (k >= 0 || l >= 0) throw DomainError("psi_coefficients: k and l must be negative");
    if (std::gcd(-k, -l) != 1) throw DomainError("psi_coefficients: k and l must be coprime");
    PsiMap m;
    m.k = k;
    m.l = l;
    if (l == -1) {
        // The strict box -l > p > 0 is empty; (1, k+1) still gives pk + ql = -1.
        m.p = 1;
        m.q = k + 1;
        return m;
    }
    for (std::int64_t p = 1; p < -l; ++p) {
        if ((-p * k) % (-l) == 1) {
            std::int64_t qprime = (-p * k - 1) / (-l);
            m.p = p;
            m.q = -qprime;
            return m;
        }
    }
    throw DomainError("psi_coefficients: no remainder-one multiple found");  // unreachable for coprime input
}

Point psi_apply(const PsiMap& map, Point pt, Direction dir) {
    const std::int64_t k = map.k, l = map.l, p = map.p, q = map.q;
    if (dir == Direction::Forward) return {p * pt.j - l * pt.i, q * pt.j + k * pt.i};
    return {q * pt.i - p * pt.j, -k * pt.i - l * pt.j};
}

HalfPlane transform(const HalfPlane& hp, Transform op) {
    auto swap = [](Variant v) { return v == Variant::Sv ? Variant::SvHat : Variant::Sv; };
    HalfPlane out = hp;
    if (op == Transform::Negate) {
        out.vector = hp.vector.negated();
        if (hp.vector.is_rational()) out.variant = swap(hp.variant);
    } else {
        out.vector = hp.vector.reflected_x();
        // with a vertical boundary the reflection reverses the tie-break on j
        if (hp.vector.is_rational() && hp.vector.v2().numerator() == 0) out.variant = swap(hp.variant);
    }
    return out;
}

bool irrational_window_check(const LatticeVector& v, std::int64_t bound) {
    for (std::int64_t i = -bound; i <= bound; ++i)
        for (std::int64_t j = -bound; j <= bound; ++j) {
            if (i == 0 && j == 0) continue;
            if (v.sign_dot({i, j}) == 0) return false;
        }
    return true;
}

Point recession_direction(const LatticeVector& v) {
    if (v.is_rational()) return {v.int1(), v.int2()};
    const double a = boost::rational_cast<double>(v.v1()), b = boost::rational_cast<double>(v.v2());
    const double norm = std::hypot(a, b);
    const std::int64_t B = v.window_bound();
    Point best{0, 0};
    double best_cos = -2.0;
    for (std::int64_t i = -B; i <= B; ++i)
        for (std::int64_t j = -B; j <= B; ++j) {
            if (std::gcd(iabs(i), iabs(j)) != 1) continue;
            if (v.sign_dot({i, j}) <= 0) continue;
            double c = (a * i + b * j) / (norm * std::hypot(double(i), double(j)));
            if (c > best_cos) {
                best_cos = c;
                best = {i, j};
            }
        }
    return best;
}

}  // namespace wold2d
