#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wold2d/halfplane.hpp"

namespace wold2d {

using cd = std::complex<double>;

struct InvalidCovariance : DomainError {
    using DomainError::DomainError;
};
struct CausalityError : DomainError {
    using DomainError::DomainError;
};
struct NoMAPart : DomainError {
    using DomainError::DomainError;
};
struct WindowTooSmall : DomainError {
    WindowTooSmall(const std::string& what, std::int64_t suggested) : DomainError(what), suggested_radius(suggested) {}
    std::int64_t suggested_radius;
};

/// Covariance of a weak-stationary field, gamma(h) = E[X_s conj(X_{s+h})].
class CovarianceModel {
public:
    enum class Kind { WhiteNoise, LineField, MovingAverage, Table, Sum, Filtered, Rotated };
    using Ptr = std::shared_ptr<const CovarianceModel>;
    using PointMap = std::map<Point, cd>;

    static CovarianceModel white_noise(double variance);
    /// variance * [c p + d q = 0], optionally thinned to every period-th point
    /// of the line (a cyclic field of dimension `period` along the line).
    static CovarianceModel line_field(std::int64_t c, std::int64_t d, double variance, std::int64_t period = 1);
    /// X_x = sum_k coeffs[k] W_{x+k} with W white of the given variance.
    static CovarianceModel moving_average(PointMap coeffs, double noise_variance);
    /// Explicit lags; -h is filled by conjugation when only h is given.
    static CovarianceModel table(PointMap entries);
    static CovarianceModel sum(std::vector<CovarianceModel> parts);
    /// E_m = sum_a beta[a] F_{m+a} for F with covariance `base`.
    static CovarianceModel filtered(CovarianceModel base, PointMap beta);
    /// Y_m = X_{A m} for an integer matrix A.
    static CovarianceModel rotated(CovarianceModel base, std::array<std::array<std::int64_t, 2>, 2> matrix);

    Kind kind() const { return kind_; }
    cd gamma(Point h) const;
    double variance() const { return variance_; }

    std::int64_t c() const { return c_; }
    std::int64_t d() const { return d_; }
    std::int64_t period() const { return period_; }
    const PointMap& points() const { return points_; }  // MA coeffs, table entries or beta
    const std::vector<Ptr>& parts() const { return parts_; }
    const std::array<std::array<std::int64_t, 2>, 2>& matrix() const { return matrix_; }

private:
    Kind kind_ = Kind::WhiteNoise;
    double variance_ = 1.0;
    std::int64_t c_ = 0, d_ = 0, period_ = 1;
    PointMap points_;
    std::vector<Ptr> parts_;
    std::array<std::array<std::int64_t, 2>, 2> matrix_{{{1, 0}, {0, 1}}};
};

/// Throws CausalityError when a moving-average coefficient (also inside Sum
/// components) falls outside S u {0}.
void check_causal(const CovarianceModel& cov, const HalfPlane& hp);

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// G[a][b] = gamma(points[a] - points[b]); throws InvalidCovariance when an
/// eigenvalue falls below -1e-8 gamma(0).
CMat gram(const CovarianceModel& cov, const std::vector<Point>& points);

struct PastSpec {
    // Box: (base + S) cut to the box of radius R around base.
    // RotatedBox: base + psi(L cut to the box of radius R), for S_(k,l) with
    // k, l < 0 coprime; the image of the box used for L under the rotation.
    enum class Truncation { Box, RotatedBox };

    HalfPlane hp = HalfPlane::L();
    std::int64_t radius = 1;
    Point base{0, 0};
    Truncation truncation = Truncation::Box;
};

/// Offsets p - base of the truncated past, sorted.
std::vector<Point> past_offsets(const PastSpec& past);

struct InnovationResult {
    double sigma2 = 0.0;
    std::map<Point, cd> coeffs;  // predictor on absolute past indices
    double residual_gram_cond = 0.0;
};

InnovationResult innovate(const CovarianceModel& cov, const PastSpec& past);

/// a_x = <X_0, I_x> / <I_0, I_0> for x in box(support_radius) inside S u {0},
/// each I_x against its own truncated past. a_{0,0} is exactly 1.
std::map<Point, cd> ma_coefficients(const CovarianceModel& cov, const PastSpec& past, std::int64_t support_radius);

/// ||P X_0||^2 onto the box-R past of s * d, s = 1..steps, d = recession direction.
std::vector<double> remote_past_energy(const CovarianceModel& cov, const HalfPlane& hp, std::int64_t radius,
                                       int steps);

enum class Label { PurelyNondeterministic, Evanescent, Deterministic, Mixed };
std::string to_string(Label l);

struct Energies {
    double total = 0.0, ma = 0.0, det = 0.0, evan = 0.0;
};

struct Classification {
    Label label = Label::Mixed;
    Energies energies;
    double sigma2 = 0.0;
    std::map<Point, cd> ma;  // empty when the innovation is trivial
    std::vector<double> remote;
    std::string predicted_pair_type;
    double epsilon = 1e-6;
    std::int64_t radius = 0;
    double residual_gram_cond = 0.0;
};

std::string predicted_pair_type(const HalfPlane& hp);

Classification classify(const CovarianceModel& cov, const HalfPlane& hp, std::int64_t radius);

/// Complex sample grid, row index t, column index s.
struct SampleGrid {
    std::int64_t s0 = 0, t0 = 0;
    std::int64_t width = 0, height = 0;
    std::vector<cd> values;  // values[(t - t0) * width + (s - s0)]

    cd at(std::int64_t s, std::int64_t t) const { return values[static_cast<std::size_t>((t - t0) * width + (s - s0))]; }
};

/// Field X_x = sum_k coeffs[k] W_{x+k} on s, t in [0, size), W i.i.d.
/// circular complex Gaussian with E|W|^2 = noise_variance.
SampleGrid simulate_ma(const std::map<Point, cd>& coeffs, double noise_variance, const HalfPlane& hp,
                       std::uint64_t seed, std::int64_t size);

/// Mean of X_x conj(X_{x+h}) over all pairs inside the grid.
cd sample_covariance(const SampleGrid& g, Point h);

struct EvanescentKind {
    enum class Type { HorizontalL, Rational };
    Type type = Type::HorizontalL;
    std::int64_t k = -1, l = -1;
    std::map<Point, cd> beta;
    std::int64_t K = 1;
};

/// Covariance of E_m = sum beta_a F_{m+a}. For HorizontalL, F is white in t and
/// K-periodic along (1,0); for Rational(k,l), F is white off the lattice line
/// through (-l,k) and K-periodic along (-l,k).
CovarianceModel evanescent_model(const EvanescentKind& kind);

}  // namespace wold2d
