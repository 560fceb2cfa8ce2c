#include "wold2d/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace wold2d {

namespace {

Mat selector(int ambient, const std::vector<int>& idx) {
    Mat E = Mat::Zero(ambient, static_cast<int>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) E(idx[c], static_cast<int>(c)) = 1.0;
    return E;
}

Mat restrict(const Mat& A, const std::vector<int>& rows, const std::vector<int>& cols) {
    Mat R(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) R(static_cast<int>(a), static_cast<int>(b)) = A(rows[a], cols[b]);
    return R;
}

double max_abs(const Mat& A) { return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff(); }

Mat mat_pow(const Mat& A, int k) {
    Mat R = Mat::Identity(A.rows(), A.cols());
    for (int t = 0; t < k; ++t) R = A * R;
    return R;
}

std::vector<int> block_indices(int e, int first_block, int last_block) {
    std::vector<int> idx;
    for (int b = first_block; b <= last_block; ++b)
        for (int r = 0; r < e; ++r) idx.push_back(b * e + r);
    return idx;
}

CheckReport make_report(std::string name, double residual, double tol) {
    CheckReport r;
    r.check = std::move(name);
    r.max_residual = residual;
    r.pass = residual <= tol;
    return r;
}

}  // namespace

double op_norm(const Mat& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()(0);
}

Mat random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat Z(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) Z(a, b) = cd(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(Z);
    Mat Q = qr.householderQ();
    Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix the phases so the distribution is Haar
    for (int c = 0; c < n; ++c) {
        cd d = R(c, c);
        if (std::abs(d) > 0) Q.col(c) *= d / std::abs(d);
    }
    return Q;
}

CheckReport check_pair(const TruncatedPair& pair, double tol) {
    const int N = pair.dim();
    const Mat E = selector(N, pair.interior);
    const Mat Id = Mat::Identity(E.cols(), E.cols());
    CheckReport r;
    r.check = "pair_isometry_commutation";
    double iso1 = max_abs(E.adjoint() * pair.V1.adjoint() * pair.V1 * E - Id);
    double iso2 = max_abs(E.adjoint() * pair.V2.adjoint() * pair.V2 * E - Id);
    double comm = max_abs((pair.V1 * pair.V2 - pair.V2 * pair.V1) * E);
    r.per_item = {iso1, iso2, comm};
    r.max_residual = std::max({iso1, iso2, comm});
    r.pass = r.max_residual <= tol;
    return r;
}

TruncatedPair build_bcl(const BCLData& data) {
    const int e = data.e_dim(), N = data.depth;
    if (N < 1) throw DomainError("build_bcl: depth must be >= 1");
    if (data.P.rows() != e || data.P.cols() != e || data.U.cols() != e)
        throw DomainError("build_bcl: U and P must be square of the same size");
    const Mat Id = Mat::Identity(e, e);
    if (max_abs(data.U.adjoint() * data.U - Id) > 1e-12) throw DomainError("build_bcl: U is not unitary");
    if (max_abs(data.P * data.P - data.P) > 1e-12 || max_abs(data.P - data.P.adjoint()) > 1e-12)
        throw DomainError("build_bcl: P is not an orthogonal projection");

    const Mat Us = data.U.adjoint();
    const Mat d1 = data.U * (Id - data.P), s1 = data.U * data.P;
    const Mat d2 = data.P * Us, s2 = (Id - data.P) * Us;
    TruncatedPair pr;
    pr.label = TruncatedPair::Label::BCL;
    pr.V1 = Mat::Zero(e * N, e * N);
    pr.V2 = Mat::Zero(e * N, e * N);
    for (int b = 0; b < N; ++b) {
        pr.V1.block(b * e, b * e, e, e) = d1;
        pr.V2.block(b * e, b * e, e, e) = d2;
        if (b + 1 < N) {
            pr.V1.block((b + 1) * e, b * e, e, e) = s1;
            pr.V2.block((b + 1) * e, b * e, e, e) = s2;
        }
    }
    pr.interior = block_indices(e, 0, N - 2);
    return pr;
}

MixedPower mixed_power(const TruncatedPair& pair, int m, int n) {
    MixedPower out;
    const Mat V1s = pair.V1.adjoint(), V2s = pair.V2.adjoint();
    if (m >= 0 && n >= 0) {
        out.matrix = mat_pow(pair.V1, m) * mat_pow(pair.V2, n);
    } else if (m < 0 && n >= 0) {
        out.matrix = mat_pow(V1s, -m) * mat_pow(pair.V2, n);
    } else if (n < 0 && m >= 0) {
        out.matrix = mat_pow(V2s, -n) * mat_pow(pair.V1, m);
    } else {
        out.matrix = mat_pow(V1s, -m) * mat_pow(V2s, -n);
        out.outside_semigroup = true;
    }
    return out;
}

CheckReport check_compatibility(const TruncatedPair& pair, int m_max, int n_max, double tol) {
    CheckReport r;
    r.check = "compatibility";
    for (int m = 0; m <= m_max; ++m) {
        const Mat A = mat_pow(pair.V1, m);
        const Mat PiA = A * A.adjoint();
        for (int n = 0; n <= n_max; ++n) {
            const Mat B = mat_pow(pair.V2, n);
            const Mat PiB = B * B.adjoint();
            const Mat C = PiA * PiB - PiB * PiA;
            double v = max_abs(restrict(C, pair.interior, pair.interior));
            r.per_item.push_back(v);
            r.max_residual = std::max(r.max_residual, v);
        }
    }
    r.pass = r.max_residual <= tol;
    return r;
}

CheckReport check_pUnP(const Mat& U, const Mat& P, int n_max) {
    CheckReport r;
    r.check = "pUnP";
    Mat Un = Mat::Identity(U.rows(), U.cols());
    for (int n = 1; n <= n_max; ++n) {
        Un = U * Un;
        double v = op_norm(P * Un * P);
        r.per_item.push_back(v);
        r.max_residual = std::max(r.max_residual, v);
    }
    r.pass = r.max_residual <= 1e-10;
    return r;
}

Mat SubspaceBasis::projector(int ambient) const {
    if (columns.cols() == 0) return Mat::Zero(ambient, ambient);
    return columns * columns.adjoint();
}

SubspaceBasis orthonormal_range(const Mat& A, double rel_tol) {
    SubspaceBasis out;
    if (A.cols() == 0 || A.rows() == 0) {
        out.columns = Mat::Zero(A.rows(), 0);
        return out;
    }
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double cut = std::max(rel_tol * s(0), 1e-13);
    int rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    out.columns = svd.matrixU().leftCols(rank);
    return out;
}

SubspaceBasis orthonormal_null(const Mat& A, double rel_tol) {
    SubspaceBasis out;
    const int n = static_cast<int>(A.cols());
    if (A.rows() == 0 || n == 0) {
        out.columns = Mat::Identity(n, n);
        return out;
    }
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cut = std::max(rel_tol * (s.size() ? s(0) : 0.0), 1e-13);
    int rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    out.columns = svd.matrixV().rightCols(n - rank);
    return out;
}

SubspaceBasis orthogonal_complement(const SubspaceBasis& sub, const SubspaceBasis& within) {
    Mat X = within.columns;
    if (sub.dim() > 0) X -= sub.columns * (sub.columns.adjoint() * within.columns);
    return orthonormal_range(X, 1e-8);
}

double subspace_distance(const SubspaceBasis& a, const SubspaceBasis& b) {
    const int amb = static_cast<int>(std::max(a.columns.rows(), b.columns.rows()));
    return op_norm(a.projector(amb) - b.projector(amb));
}

KernelResult kernel_w1_star(const TruncatedPair& pair, const BCLData& data) {
    const int N = pair.dim(), e = data.e_dim();
    const Mat E = selector(N, pair.interior);
    KernelResult kr;
    SubspaceBasis nul = orthonormal_null(pair.V1.adjoint() * E);
    kr.kernel.columns = E * nul.columns;

    SubspaceBasis up = orthonormal_range(data.U * data.P);
    kr.embedded.columns = Mat::Zero(N, up.dim());
    if (up.dim() > 0) kr.embedded.columns.topRows(e) = up.columns;

    kr.distance = (kr.kernel.dim() == kr.embedded.dim()) ? subspace_distance(kr.kernel, kr.embedded) : 1.0;
    if (kr.distance > 1e-9)
        throw DomainError("kernel_w1_star: null space of W1* (dim " + std::to_string(kr.kernel.dim()) +
                          ") does not match E U P (dim " + std::to_string(kr.embedded.dim()) + ")");
    return kr;
}

CheckReport check_w1_power_projection(const TruncatedPair& pair, const BCLData& data, int n_max) {
    const int e = data.e_dim();
    CheckReport r;
    r.check = "w1_power_projection";
    Mat expected = Mat::Identity(e, e);
    Mat Ui = Mat::Identity(e, e);
    Mat W = Mat::Identity(pair.dim(), pair.dim());
    for (int n = 1; n <= n_max; ++n) {
        Ui = data.U * Ui;
        expected -= Ui * data.P * Ui.adjoint();
        W = pair.V1 * W;
        const Mat Pn = W * W.adjoint();
        double v = max_abs(Pn.topLeftCorner(e, e) - expected);
        r.per_item.push_back(v);
        r.max_residual = std::max(r.max_residual, v);
    }
    r.pass = r.max_residual <= 1e-10;
    return r;
}

CheckReport check_shift_relations(const TruncatedPair& pair, const BCLData& data, int n_max) {
    const int N = pair.dim(), e = data.e_dim();
    CheckReport r;
    r.check = "shift_relations";
    SubspaceBasis up = orthonormal_range(data.U * data.P);
    if (up.dim() == 0) return r;
    Mat Eu = Mat::Zero(N, up.dim());
    Eu.topRows(e) = up.columns;
    const Mat W1s = pair.V1.adjoint();
    Mat Un = up.columns, Usn = up.columns;
    Mat W1n = Eu;
    Mat back = pair.V2 * Eu;  // W1^{*(n-1)} W2 E u, starting at n = 1
    for (int n = 1; n <= n_max; ++n) {
        Un = data.U * Un;
        Usn = data.U.adjoint() * Usn;
        W1n = pair.V1 * W1n;
        if (n > 1) back = W1s * back;
        Mat fwd_expected = Mat::Zero(N, up.dim()), bwd_expected = Mat::Zero(N, up.dim());
        fwd_expected.topRows(e) = Un;
        bwd_expected.topRows(e) = Usn;
        double v = std::max(max_abs(W1n - fwd_expected), max_abs(back - bwd_expected));
        r.per_item.push_back(v);
        r.max_residual = std::max(r.max_residual, v);
    }
    r.pass = r.max_residual <= 1e-10;
    return r;
}

bool HtHeSplit::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.pass; });
}

HtHeSplit ht_he_split(const TruncatedPair& pair, const BCLData& data, int radius, const Vec* seed) {
    if (radius < 0) throw DomainError("ht_he_split: negative radius");
    const int N = data.depth, dim = pair.dim();
    if (N < 2) throw DomainError("ht_he_split: depth must be >= 2");
    CheckReport pu = check_pUnP(data.U, data.P, 2 * radius + 1);
    if (!pu.pass)
        throw DomainError("ht_he_split: P U^n P != 0 for some n <= " + std::to_string(2 * radius + 1) +
                          "; the pair violates the half-plane ordering W2W2* <= W1^n W1^{*n}");
    HtHeSplit out;
    const KernelResult kr = kernel_w1_star(pair, data);
    const int r = kr.kernel.dim();

    std::vector<Mat> cell_vectors;
    for (int l = 0; l <= N - 1; ++l)
        for (int k = -radius; k <= radius; ++k) {
            if (l == 0 && k < 0) continue;  // (k,l) outside -L u {0}
            const int block = (k >= l) ? l : l - 1;
            if (block > N - 2) continue;
            out.cells.push_back({{k, l}, block});
            if (r > 0) cell_vectors.push_back(mixed_power(pair, k, l).matrix * kr.kernel.columns);
        }

    Mat X(dim, static_cast<int>(cell_vectors.size()) * r);
    for (std::size_t c = 0; c < cell_vectors.size(); ++c) X.middleCols(static_cast<int>(c) * r, r) = cell_vectors[c];

    {
        CheckReport orth;
        orth.check = "ht_cells_orthogonal";
        CheckReport norm;
        norm.check = "ht_cells_isometric";
        const Mat G = X.adjoint() * X;
        for (std::size_t a = 0; a < cell_vectors.size(); ++a)
            for (std::size_t b = 0; b < cell_vectors.size(); ++b) {
                const Mat blk = G.block(static_cast<int>(a) * r, static_cast<int>(b) * r, r, r);
                if (a == b)
                    norm.max_residual = std::max(norm.max_residual, max_abs(blk - Mat::Identity(r, r)));
                else
                    orth.max_residual = std::max(orth.max_residual, max_abs(blk));
            }
        orth.pass = orth.max_residual <= 1e-9;
        norm.pass = norm.max_residual <= 1e-9;
        if (!orth.pass)
            throw DomainError("ht_he_split: cells V^{(k,l)} ker W1* are not orthogonal (max overlap " +
                              std::to_string(orth.max_residual) + "); half-plane ordering violated");
        out.checks.push_back(orth);
        out.checks.push_back(norm);
    }

    out.Ht = orthonormal_range(X);
    SubspaceBasis interior;
    interior.columns = selector(dim, pair.interior);
    out.He = orthogonal_complement(out.Ht, interior);

    const Mat Q = out.He.columns;
    const int dHe = out.He.dim();
    const Mat PHe = out.He.projector(dim), PHt = out.Ht.projector(dim);
    const Mat Pint = interior.projector(dim);
    const Mat IdHe = Mat::Identity(dHe, dHe);

    out.checks.push_back(make_report("he_v1_invariant", max_abs((Mat::Identity(dim, dim) - PHe) * pair.V1 * Q), 1e-9));
    {
        const Mat M = Q.adjoint() * pair.V1 * Q;
        double v = std::max(max_abs(M.adjoint() * M - IdHe), max_abs(M * M.adjoint() - IdHe));
        out.checks.push_back(make_report("he_v1_unitary", v, 1e-9));
    }
    {
        const Mat V2Q = pair.V2 * Q;
        out.checks.push_back(make_report("he_v2_isometric", max_abs(V2Q.adjoint() * V2Q - IdHe), 1e-9));
        out.checks.push_back(make_report("he_v2_invariant", max_abs((Pint - PHe) * V2Q), 1e-9));
        CheckReport pure;
        pure.check = "he_v2_pure";
        Mat Vn = Q;
        for (int n = 0; n <= N - 1; ++n) {
            pure.per_item.push_back(orthonormal_range(Pint * Vn, 1e-8).dim());
            Vn = pair.V2 * Vn;
        }
        for (std::size_t t = 1; t < pure.per_item.size(); ++t)
            if (pure.per_item[t] > pure.per_item[t - 1] || (pure.per_item[t] == pure.per_item[t - 1] && pure.per_item[t] > 0))
                pure.pass = false;
        if (pure.per_item.back() != 0) pure.pass = false;
        pure.max_residual = pure.per_item.back();
        out.checks.push_back(pure);
    }
    {
        double v = 0.0;
        for (const Mat* Pi : {&PHt, &PHe})
            for (const Mat* V : {&pair.V1, &pair.V2})
                v = std::max(v, max_abs(Pint * ((*Pi) * (*V) - (*V) * (*Pi)) * Pint));
        out.checks.push_back(make_report("projection_commutators", v, 1e-9));
    }

    // ker V2* inside He and a cyclic representative for V1 on it.
    SubspaceBasis nul = orthonormal_null(pair.V2.adjoint() * Q);
    out.cyclic_space.columns = Q * nul.columns;
    const Mat Z = out.cyclic_space.columns;
    const int dz = out.cyclic_space.dim();
    if (dz > 0) {
        out.checks.push_back(make_report("cyclic_space_v1_invariant",
                                         max_abs((Mat::Identity(dim, dim) - Z * Z.adjoint()) * pair.V1 * Z), 1e-9));
        Vec w;
        if (seed != nullptr) {
            w = Z * (Z.adjoint() * (*seed));
        } else {
            for (int t = 0; t < dim; ++t) {
                w = Z * Z.adjoint().col(t);
                if (w.norm() > 1e-8) break;
            }
        }
        if (w.norm() > 1e-12) {
            out.cyclic_vector = w / w.norm();
            Mat K(dim, dz);
            Vec cur = out.cyclic_vector;
            for (int t = 0; t < dz; ++t) {
                K.col(t) = cur;
                cur = pair.V1 * cur;
            }
            out.krylov_dim = orthonormal_range(K, 1e-8).dim();
        }
    }
    return out;
}

int CellPair::index_of(Point c, int coeff) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), c);
    if (it == cells.end() || *it != c) return -1;
    return static_cast<int>(it - cells.begin()) * coeff_dim + coeff;
}

namespace {

CellPair assemble_cells(std::vector<Point> cells, int h) {
    std::sort(cells.begin(), cells.end());
    CellPair cp;
    cp.cells = std::move(cells);
    cp.coeff_dim = h;
    const int dim = static_cast<int>(cp.cells.size()) * h;
    cp.pair.V1 = Mat::Zero(dim, dim);
    cp.pair.V2 = Mat::Zero(dim, dim);
    return cp;
}

}  // namespace

CellPair build_diagram_shift(const Diagram& d, int coeff_dim, const CellWindow& w) {
    if (coeff_dim < 1) throw DomainError("build_diagram_shift: coeff_dim must be >= 1");
    std::vector<Point> cells;
    for (std::int64_t i = std::max(w.i_lo, d.lo()); i <= std::min(w.i_hi, d.hi()); ++i)
        for (std::int64_t j = w.j_lo; j <= w.j_hi; ++j)
            if (diagram_contains(d, {i, j})) cells.push_back({i, j});
    CellPair cp = assemble_cells(std::move(cells), coeff_dim);
    cp.pair.label = TruncatedPair::Label::DiagramShift;
    const int h = coeff_dim;
    for (const Point& c : cp.cells) {
        const int src = cp.index_of(c);
        const int t1 = cp.index_of(c + Point{1, 0}), t2 = cp.index_of(c + Point{0, 1});
        for (int a = 0; a < h; ++a) {
            if (t1 >= 0) cp.pair.V1(t1 + a, src + a) = 1.0;
            if (t2 >= 0) cp.pair.V2(t2 + a, src + a) = 1.0;
        }
        // V1 V2 and V2 V1 both stay in the window
        if (t1 >= 0 && t2 >= 0 && cp.index_of(c + Point{1, 1}) >= 0)
            for (int a = 0; a < h; ++a) cp.pair.interior.push_back(src + a);
    }
    return cp;
}

CellPair build_generalized_power(const GeneralizedPowerData& data, std::int64_t j_hi) {
    const std::int64_t m = data.m, n = data.n;
    if (m < 1 || n < 0) throw DomainError("build_generalized_power: need m >= 1 and n >= 0");
    if (static_cast<std::int64_t>(data.period_boundary.size()) != m)
        throw DomainError("build_generalized_power: period boundary must have m columns");
    const auto& b = data.period_boundary;
    for (const ExtInt& e : b)
        if (!e.is_finite()) throw DomainError("build_generalized_power: period boundary must be finite");
    for (std::int64_t i = 1; i < m; ++i)
        if (b[i].value > b[i - 1].value) throw DomainError("build_generalized_power: boundary must be nonincreasing");
    if (b[m - 1].value < b[0].value - n)
        throw DomainError("build_generalized_power: J_0 is not a period (b(m-1) < b(0) - n)");
    const int h = static_cast<int>(data.unitary.rows());
    if (h < 1 || data.unitary.cols() != h ||
        max_abs(data.unitary.adjoint() * data.unitary - Mat::Identity(h, h)) > 1e-12)
        throw DomainError("build_generalized_power: unitary is not unitary");

    std::vector<Point> cells;
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = b[i].value; j <= j_hi; ++j) cells.push_back({i, j});
    CellPair cp = assemble_cells(std::move(cells), h);
    cp.pair.label = TruncatedPair::Label::GeneralizedPower;
    for (const Point& c : cp.cells) {
        const int src = cp.index_of(c);
        const bool wrap = (c.i == m - 1);
        const Point tgt1 = wrap ? Point{0, c.j + n} : c + Point{1, 0};
        const int t1 = cp.index_of(tgt1), t2 = cp.index_of(c + Point{0, 1});
        if (t1 >= 0) {
            if (wrap)
                cp.pair.V1.block(t1, src, h, h) = data.unitary;
            else
                cp.pair.V1.block(t1, src, h, h) = Mat::Identity(h, h);
        }
        if (t2 >= 0) cp.pair.V2.block(t2, src, h, h) = Mat::Identity(h, h);
        if (t1 >= 0 && t2 >= 0 && cp.index_of(tgt1 + Point{0, 1}) >= 0)
            for (int a = 0; a < h; ++a) cp.pair.interior.push_back(src + a);
    }
    return cp;
}

CheckReport check_generalized_unitary(const CellPair& gp, const GeneralizedPowerData& data, double tol) {
    const int h = gp.coeff_dim;
    const std::int64_t j_hi = gp.cells.empty() ? 0 : std::max_element(gp.cells.begin(), gp.cells.end(),
                                                                      [](Point a, Point b) { return a.j < b.j; })->j;
    const Mat T = mixed_power(gp.pair, static_cast<int>(data.m), -static_cast<int>(data.n)).matrix;
    CheckReport r;
    r.check = "generalized_power_unitary";
    for (const Point& c : gp.cells) {
        if (c.j + data.n > j_hi) continue;
        const int src = gp.index_of(c);
        Mat expected = Mat::Zero(gp.pair.dim(), h);
        expected.middleRows(src, h) = data.unitary;
        r.max_residual = std::max(r.max_residual, max_abs(T.middleCols(src, h) - expected));
    }
    r.pass = r.max_residual <= tol;
    return r;
}

CheckReport check_shift_bridge(std::int64_t m, std::int64_t n, const std::vector<ExtInt>& period_boundary, int K,
                               std::int64_t j_hi, double tol) {
    if (K < 2) throw DomainError("check_shift_bridge: K must be >= 2");
    GeneralizedPowerData gd;
    gd.m = m;
    gd.n = n;
    gd.period_boundary = period_boundary;
    gd.unitary = Mat::Zero(K, K);
    for (int a = 0; a < K; ++a) gd.unitary((a + 1) % K, a) = 1.0;
    const CellPair gp = build_generalized_power(gd, j_hi);

    // periodic diagram on columns 0 .. K m - 1
    std::vector<ExtInt> bj;
    for (int kap = 0; kap < K; ++kap)
        for (std::int64_t i = 0; i < m; ++i) bj.push_back(ExtInt::finite(period_boundary[i].value - kap * n));
    const Diagram J(0, bj);
    std::int64_t j_lo = period_boundary[m - 1].value - (K - 1) * n;
    const CellPair ds = build_diagram_shift(J, 1, {0, K * m - 1, j_lo, j_hi});

    auto image = [&](Point c, int kap) { return Point{c.i + kap * m, c.j - kap * n}; };
    CheckReport r;
    r.check = "shift_bridge";
    std::size_t compared = 0;
    for (const Point& c : gp.cells) {
        const int src = gp.index_of(c);
        const bool v1_ok = gp.index_of(c.i == m - 1 ? Point{0, c.j + n} : c + Point{1, 0}) >= 0;
        const bool v2_ok = gp.index_of(c + Point{0, 1}) >= 0;
        if (!v1_ok || !v2_ok) continue;
        for (int kap = 0; kap < K; ++kap) {
            if (c.i == m - 1 && kap == K - 1) continue;  // wraps through the cyclic seam
            const int dsrc = ds.index_of(image(c, kap));
            if (dsrc < 0) continue;
            for (const Mat* pair_mat : {&gp.pair.V1, &gp.pair.V2}) {
                const Mat& D = (pair_mat == &gp.pair.V1) ? ds.pair.V1 : ds.pair.V2;
                // map the GP column for coefficient kap into diagram coordinates
                Vec mapped = Vec::Zero(ds.pair.dim());
                const Vec col = pair_mat->col(src + kap);
                for (const Point& t : gp.cells)
                    for (int a = 0; a < K; ++a) {
                        cd v = col(gp.index_of(t) + a);
                        if (v == cd(0.0)) continue;
                        int di = ds.index_of(image(t, a));
                        if (di < 0) {
                            r.max_residual = std::max(r.max_residual, std::abs(v));
                            continue;
                        }
                        mapped(di) += v;
                    }
                r.max_residual = std::max(r.max_residual, (mapped - D.col(dsrc)).cwiseAbs().maxCoeff());
            }
            ++compared;
        }
    }
    r.per_item = {static_cast<double>(compared)};
    r.pass = compared > 0 && r.max_residual <= tol;
    return r;
}

}  // namespace wold2d
