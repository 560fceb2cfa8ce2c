#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "wold2d/lattice.hpp"

namespace wold2d {

/// Normal vector of a half-plane boundary.
///
/// Rational vectors are stored primitive (coprime integer components).
/// Irrational slopes are carried as a rational approximant that is certified
/// for a window: no nonzero lattice point with |i|,|j| <= window_bound lies on
/// the approximant's line, so every sign decision inside the window is the
/// same as for the true irrational vector.
class LatticeVector {
public:
    enum class Mode { Rational, IrrationalApprox };

    static LatticeVector rational(std::int64_t v1, std::int64_t v2);
    static LatticeVector irrational_approx(Rational v1, Rational v2, std::int64_t window_bound);

    Mode mode() const { return mode_; }
    const Rational& v1() const { return v1_; }
    const Rational& v2() const { return v2_; }
    std::int64_t window_bound() const { return bound_; }
    bool is_rational() const { return mode_ == Mode::Rational; }

    // Integer components; only valid in Rational mode.
    std::int64_t int1() const;
    std::int64_t int2() const;

    /// Sign of <v, p> computed exactly.
    int sign_dot(Point p) const;
    bool in_window(Point p) const;

    LatticeVector negated() const;
    LatticeVector reflected_x() const;  // (v1, -v2)

    friend bool operator==(const LatticeVector&, const LatticeVector&) = default;

private:
    Mode mode_ = Mode::Rational;
    Rational v1_{0}, v2_{-1};
    std::int64_t bound_ = 0;
};

enum class Variant { Sv, SvHat };

/// Half-plane S_v or its hatted twin. The two variants differ only on the
/// boundary line, which contains lattice points only for rational slopes.
///
/// Boundary rule: S_v takes the lexicographically negative boundary points
/// (i < 0, or i == 0 and j < 0); the hatted variant takes the positive ones.
/// For v2 != 0 this is exactly the sign rule on i; for v2 == 0 the boundary
/// is the vertical axis and the j tie-break is what makes the set a
/// half-plane.
struct HalfPlane {
    LatticeVector vector = LatticeVector::rational(0, -1);
    Variant variant = Variant::Sv;

    static HalfPlane L() { return {LatticeVector::rational(0, -1), Variant::Sv}; }
    static HalfPlane sv(std::int64_t v1, std::int64_t v2) { return {LatticeVector::rational(v1, v2), Variant::Sv}; }
    static HalfPlane sv_hat(std::int64_t v1, std::int64_t v2) {
        return {LatticeVector::rational(v1, v2), Variant::SvHat};
    }

    friend bool operator==(const HalfPlane&, const HalfPlane&) = default;
};

bool contains(const HalfPlane& hp, Point p);

enum class Order { Less, Equal, Greater };
/// a < b iff a - b lies in S.
Order compare_order(const HalfPlane& hp, Point a, Point b);

struct AxiomReport {
    bool origin_ok = true;
    bool semigroup_ok = true;
    bool antisymmetry_ok = true;
    // First counterexample per failing axiom, e.g. {"semigroup": [s, t]}.
    std::map<std::string, std::vector<Point>> counterexamples;

    bool all_ok() const { return origin_ok && semigroup_ok && antisymmetry_ok; }
};

AxiomReport verify_axioms(const Predicate& membership, std::int64_t window);

/// Row maxima M_j = max{i : (i,j) in S} for j in [j_lo, j_hi].
struct CornerSequence {
    std::int64_t j_lo = 0;
    std::int64_t j_hi = -1;
    std::vector<ExtInt> entries;

    const ExtInt& at(std::int64_t j) const;
    bool in_range(std::int64_t j) const { return j >= j_lo && j <= j_hi; }
};

CornerSequence corner_sequence(const HalfPlane& hp, std::int64_t j_lo, std::int64_t j_hi);

/// Column maxima N_i = max{j : (i,j) in S}.
ExtInt column_max(const HalfPlane& hp, std::int64_t i);
ExtInt row_max(const HalfPlane& hp, std::int64_t j);

struct CornerRelations {
    bool mirror_ok = true;     // M_j = -M_{-j} - 1
    bool increment_ok = true;  // M_p <= M_{j+p} - M_j <= M_p + 1
    bool gap_ok = true;        // M_j - M_{j+1} in {m, m+1}
    bool monotone_ok = true;
    std::optional<std::int64_t> gap;  // m = -M_1 - 1 when M_1 is finite
    bool all_ok() const { return mirror_ok && increment_ok && gap_ok && monotone_ok; }
};

CornerRelations check_corner_relations(const CornerSequence& cs);

/// Membership {(i,j) : i <= M_j} reconstructed from a corner sequence.
bool corner_membership(const CornerSequence& cs, Point p);

struct VectorEstimate {
    std::vector<Rational> delta;  // delta[j-1] = (-1 - M_j) / j
    Rational estimate;
    Rational error_bound;
    // (-1, -estimate): the recovered boundary normal up to error_bound.
    std::array<Rational, 2> vector;
};

VectorEstimate recover_vector(const CornerSequence& cs);

/// Rotation taking L onto S_(k,l): (m,n) -> (pn - lm, qn + km).
struct PsiMap {
    std::int64_t k = -1, l = -1, p = 1, q = 0;

    std::array<std::array<std::int64_t, 2>, 2> matrix() const { return {{{-l, p}, {k, q}}}; }
    std::int64_t determinant() const { return -l * q - p * k; }
};

PsiMap psi_coefficients(std::int64_t k, std::int64_t l);

enum class Direction { Forward, Inverse };
Point psi_apply(const PsiMap& map, Point pt, Direction dir);

enum class Transform { Negate, ReflectX };
HalfPlane transform(const HalfPlane& hp, Transform op);

/// True iff no nonzero (i,j) with |i|,|j| <= bound lies on the line <v,p> = 0.
bool irrational_window_check(const LatticeVector& v, std::int64_t bound);

/// Recession direction for remote-past computations: v itself for rational
/// vectors, otherwise the primitive integer vector inside the certified
/// window whose angle is closest to v.
Point recession_direction(const LatticeVector& v);

}  // namespace wold2d
