#pragma once

#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wold2d/diagram.hpp"

namespace wold2d {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Outcome of a numerical identity check.
struct CheckReport {
    std::string check;
    double max_residual = 0.0;
    bool pass = true;
    std::vector<double> per_item;  // e.g. one residual per power n
};

/// Finite window of a pair of commuting isometries. Identities hold exactly
/// (up to rounding) only for basis vectors listed in `interior`; columns
/// outside it lose mass through the truncation edge.
struct TruncatedPair {
    enum class Label { BCL, DiagramShift, GeneralizedPower, Generic };

    Mat V1, V2;
    std::vector<int> interior;
    Label label = Label::Generic;

    int dim() const { return static_cast<int>(V1.rows()); }
};

/// Isometry and commutation residuals of the pair on its interior columns.
CheckReport check_pair(const TruncatedPair& pair, double tol = 1e-12);

struct BCLData {
    Mat U;  // unitary on the wandering space of V1V2
    Mat P;  // orthogonal projection
    int depth = 1;
    int e_dim() const { return static_cast<int>(U.rows()); }
};

/// Block lower-bidiagonal model: W1 has U(I-P) on the diagonal and UP below
/// it, W2 has PU* on the diagonal and (I-P)U* below it. Interior is the first
/// depth-1 block rows.
TruncatedPair build_bcl(const BCLData& data);

struct MixedPower {
    Mat matrix;
    bool outside_semigroup = false;  // m < 0 and n < 0
};

/// V^{(m,n)}: V1^m V2^n, V1^{*|m|} V2^n, V2^{*|n|} V1^m by sign pattern; for
/// m,n both negative V1^{*|m|} V2^{*|n|} with the flag set.
MixedPower mixed_power(const TruncatedPair& pair, int m, int n);

/// ||[V1^m V1^{*m}, V2^n V2^{*n}]|| restricted to interior rows/columns for
/// 0 <= m <= m_max, 0 <= n <= n_max.
CheckReport check_compatibility(const TruncatedPair& pair, int m_max, int n_max, double tol = 1e-9);

/// ||P U^n P|| for n = 1..n_max; passes when every value is <= 1e-10.
CheckReport check_pUnP(const Mat& U, const Mat& P, int n_max);

/// Orthonormal basis stored column-wise.
struct SubspaceBasis {
    Mat columns;
    int dim() const { return static_cast<int>(columns.cols()); }
    Mat projector(int ambient) const;
};

SubspaceBasis orthonormal_range(const Mat& A, double rel_tol = 1e-10);
SubspaceBasis orthonormal_null(const Mat& A, double rel_tol = 1e-10);
/// Complement of `sub` inside span(`within`); both bases live in the same ambient space.
SubspaceBasis orthogonal_complement(const SubspaceBasis& sub, const SubspaceBasis& within);
/// ||P_a - P_b||, the gap between two subspaces.
double subspace_distance(const SubspaceBasis& a, const SubspaceBasis& b);

struct KernelResult {
    SubspaceBasis kernel;    // null space of W1* on interior vectors
    SubspaceBasis embedded;  // E U P (wandering space), block row 0
    double distance = 0.0;
};

/// Computes ker W1* both ways and compares; throws DomainError when they
/// disagree by more than 1e-9.
KernelResult kernel_w1_star(const TruncatedPair& pair, const BCLData& data);

/// Top-left block of W1^n W1^{*n} against I - sum_{i=1..n} U^i P U^{*i}.
CheckReport check_w1_power_projection(const TruncatedPair& pair, const BCLData& data, int n_max);

/// E U^n vs W1^n and E U^{*n} vs W1^{*(n-1)} W2 on E U P(wandering space).
CheckReport check_shift_relations(const TruncatedPair& pair, const BCLData& data, int n_max);

struct HtHeSplit {
    SubspaceBasis Ht, He;
    SubspaceBasis cyclic_space;  // ker V2* inside He
    Vec cyclic_vector;           // normalized projection of the seed (empty when zero)
    int krylov_dim = 0;          // dim of the V1-Krylov space of the cyclic vector
    std::vector<std::pair<Point, int>> cells;  // (k,l) cells used, with their block index
    std::vector<CheckReport> checks;
    bool all_pass() const;
};

/// Splits the interior of a BCL model into the wandering-generated part Ht
/// (spanned by V^{(k,l)} ker V1* over (k,l) in -L u {0}, |k| <= radius) and
/// its complement He. Throws DomainError when P U^n P = 0 fails up to
/// 2*radius + 1, since the cells are then not orthogonal. The cells of block
/// b cover 2*radius + 2 consecutive U-exponents only when b <= radius, so the
/// split is exact for radius >= depth - 2 and P-cycles of length 2*radius + 2.
HtHeSplit ht_he_split(const TruncatedPair& pair, const BCLData& data, int radius, const Vec* seed = nullptr);

/// Pair given by a diagram: V1, V2 shift basis cells by (1,0), (0,1).
/// Cells are the points of J with column in [i_lo,i_hi] and row in
/// [j_lo,j_hi], ordered by (i,j); each carries a coeff_dim-dimensional block.
struct CellWindow {
    std::int64_t i_lo = 0, i_hi = 0, j_lo = 0, j_hi = 0;
};

struct CellPair {
    TruncatedPair pair;
    std::vector<Point> cells;
    int coeff_dim = 1;
    int index_of(Point c, int coeff = 0) const;  // -1 when absent
};

CellPair build_diagram_shift(const Diagram& d, int coeff_dim, const CellWindow& window);

struct GeneralizedPowerData {
    std::int64_t m = 1;
    std::int64_t n = 0;
    std::vector<ExtInt> period_boundary;  // b(0..m-1) of J_0, finite
    Mat unitary;                          // on the per-cell coefficient space
};

/// Generalized powers on the cells of J_0 with j <= j_hi. V1 shifts within the
/// period and wraps column m-1 to column 0 (lifted by n) through the unitary;
/// V2 shifts up.
CellPair build_generalized_power(const GeneralizedPowerData& data, std::int64_t j_hi);

/// V2^{*n} V1^m against the cellwise extension of the unitary, on cells whose
/// V1^m image stays in the window.
CheckReport check_generalized_unitary(const CellPair& gp, const GeneralizedPowerData& data,
                                      double tol = 1e-12);

/// Generalized powers with the cyclic shift on C^K as the unitary, compared
/// with the diagram-shift pair of the periodic diagram generated by J_0 under
/// (i, j, kappa) -> (i + kappa m, j - kappa n). Only cells whose images do
/// not wrap from kappa = K-1 back to 0 are compared.
CheckReport check_shift_bridge(std::int64_t m, std::int64_t n, const std::vector<ExtInt>& period_boundary, int K,
                               std::int64_t j_hi, double tol = 1e-12);

double op_norm(const Mat& A);

/// Haar-distributed unitary from the QR factorization of a complex Gaussian matrix.
Mat random_unitary(int n, std::mt19937_64& rng);

}  // namespace wold2d
