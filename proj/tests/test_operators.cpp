#include <doctest.h>

#include "wold2d/operators.hpp"
#include "wold2d/run.hpp"

using namespace wold2d;

namespace {

// Permutation matrix sending e_a to e_{perm[a]}.
Mat permutation(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    Mat U = Mat::Zero(n, n);
    for (int a = 0; a < n; ++a) U(perm[static_cast<std::size_t>(a)], a) = 1.0;
    return U;
}

Mat coordinate_projection(int n, const std::vector<int>& on) {
    Mat P = Mat::Zero(n, n);
    for (int a : on) P(a, a) = 1.0;
    return P;
}

// 4-cycle carrying the P-vector plus one fixed point.
BCLData four_cycle(int depth, bool with_free) {
    std::vector<int> perm{1, 2, 3, 0};
    if (with_free) perm.push_back(4);
    const Mat U = permutation(perm);
    return {U, coordinate_projection(U.rows(), {0}), depth};
}

}  // namespace

TEST_CASE("random unitaries are unitary") {
    std::mt19937_64 rng(3);
    for (int n : {1, 2, 5, 9}) {
        const Mat U = random_unitary(n, rng);
        CHECK((U.adjoint() * U - Mat::Identity(n, n)).norm() < 1e-12);
    }
}

TEST_CASE("operator norm") {
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 3.0;
    A(1, 1) = cd(0, -4);
    CHECK(op_norm(A) == doctest::Approx(4.0));
}

TEST_CASE("P U^n P on a permutation") {
    const BCLData d = four_cycle(3, false);
    const CheckReport r = check_pUnP(d.U, d.P, 3);
    CHECK(r.pass);
    CHECK(r.max_residual == 0.0);
    CHECK_FALSE(check_pUnP(d.U, d.P, 4).pass);
    CHECK(check_pUnP(d.U, d.P, 4).per_item.back() == doctest::Approx(1.0));
}

TEST_CASE("BCL pair on a four-cycle") {
    const BCLData d = four_cycle(3, true);
    const TruncatedPair pr = build_bcl(d);
    CHECK(pr.dim() == 15);
    CHECK(pr.interior.size() == 10u);
    CHECK(check_pair(pr).pass);
    CHECK(check_compatibility(pr, 2, 2).pass);

    const KernelResult ker = kernel_w1_star(pr, d);
    CHECK(ker.kernel.dim() == 1);
    CHECK(ker.distance < 1e-9);
    CHECK(check_w1_power_projection(pr, d, 2).pass);
    CHECK(check_shift_relations(pr, d, 2).pass);

    const HtHeSplit sp = ht_he_split(pr, d, 1);
    CHECK(sp.all_pass());
    // interior is 2 blocks of 5; the 4-cycle fills Ht, the fixed point He
    CHECK(sp.Ht.dim() == 8);
    CHECK(sp.He.dim() == 2);
    CHECK(sp.cyclic_space.dim() == 1);
    CHECK(sp.krylov_dim >= 1);
}

TEST_CASE("BCL construction validates its inputs") {
    BCLData bad = four_cycle(3, false);
    bad.U(0, 3) = 2.0;
    CHECK_THROWS_AS(build_bcl(bad), DomainError);
    BCLData notproj = four_cycle(3, false);
    notproj.P(0, 0) = 0.5;
    CHECK_THROWS_AS(build_bcl(notproj), DomainError);
}

TEST_CASE("split refuses models violating the ordering condition") {
    // P = I, U = I: P U P = P
    const int e = 2;
    const BCLData id{Mat::Identity(e, e), Mat::Identity(e, e), 3};
    CHECK_THROWS_AS(ht_he_split(build_bcl(id), id, 1), DomainError);
    // a 3-cycle only certifies n <= 2 < 2*2+1
    const BCLData three{permutation({1, 2, 0}), coordinate_projection(3, {0}), 4};
    CHECK_THROWS_AS(ht_he_split(build_bcl(three), three, 2), DomainError);
}

TEST_CASE("split dimensions on random models match the cycle count") {
    std::mt19937_64 rng(11);
    for (int depth = 2; depth <= 5; ++depth)
        for (int p = 1; p <= 2; ++p) {
            const int R = std::max(1, depth - 2), free_dim = depth % 3;
            const BCLData d = random_bcl_data(rng, depth, R, p, free_dim);
            CHECK(d.e_dim() == p * (2 * R + 2) + free_dim);
            const TruncatedPair pr = build_bcl(d);
            CHECK(check_pair(pr).pass);
            const HtHeSplit sp = ht_he_split(pr, d, R);
            CHECK(sp.all_pass());
            CHECK(sp.Ht.dim() == p * (2 * R + 2) * (depth - 1));
            CHECK(sp.He.dim() == free_dim * (depth - 1));
        }
}

TEST_CASE("mixed powers by sign pattern") {
    const BCLData d = four_cycle(3, false);
    const TruncatedPair pr = build_bcl(d);
    const MixedPower a = mixed_power(pr, 1, -1);
    CHECK((a.matrix - pr.V2.adjoint() * pr.V1).norm() < 1e-14);
    CHECK_FALSE(a.outside_semigroup);
    const MixedPower b = mixed_power(pr, -2, 1);
    CHECK((b.matrix - pr.V1.adjoint() * pr.V1.adjoint() * pr.V2).norm() < 1e-14);
    CHECK(mixed_power(pr, -1, -1).outside_semigroup);
    CHECK((mixed_power(pr, 0, 0).matrix - Mat::Identity(pr.dim(), pr.dim())).norm() == 0.0);
}

TEST_CASE("subspace helpers") {
    Mat A = Mat::Zero(3, 2);
    A(0, 0) = 1.0;
    A(1, 0) = 1.0;
    A(0, 1) = 2.0;
    A(1, 1) = 2.0;
    const SubspaceBasis r = orthonormal_range(A);
    CHECK(r.dim() == 1);
    CHECK(orthonormal_null(A).dim() == 1);
    const SubspaceBasis all = orthonormal_range(Mat::Identity(3, 3));
    const SubspaceBasis comp = orthogonal_complement(r, all);
    CHECK(comp.dim() == 2);
    CHECK((r.columns.adjoint() * comp.columns).norm() < 1e-12);
    CHECK(subspace_distance(r, r) < 1e-12);
    CHECK(subspace_distance(r, comp) == doctest::Approx(1.0));
}

TEST_CASE("diagram shift pair of L") {
    const Diagram d = halfplane_to_diagram(HalfPlane::L(), 6);
    const CellPair cp = build_diagram_shift(d, 2, {-3, 3, -2, 4});
    CHECK(check_pair(cp.pair).pass);
    CHECK(check_compatibility(cp.pair, 2, 2).pass);
    // (1,0) then (0,1) from (-1,1)
    const int from = cp.index_of({-1, 1}, 1), to = cp.index_of({0, 2}, 1);
    REQUIRE(from >= 0);
    REQUIRE(to >= 0);
    CHECK(std::abs((cp.pair.V2 * cp.pair.V1)(to, from) - 1.0) < 1e-15);
    CHECK(cp.index_of({-1, 0}) == -1);
}

TEST_CASE("generalized power identity against direct products") {
    std::mt19937_64 rng(5);
    for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 0}, {2, 1}, {3, 2}, {2, 3}}) {
        std::vector<ExtInt> b;
        for (int i = 0; i < m; ++i) b.push_back(ExtInt::finite(n - i * n / std::max(1, m)));
        GeneralizedPowerData data{m, n, b, random_unitary(3, rng)};
        const std::int64_t j_hi = 8;
        const CellPair gp = build_generalized_power(data, j_hi);
        CHECK(check_pair(gp.pair).pass);
        CHECK(check_generalized_unitary(gp, data).pass);

        Mat prod = Mat::Identity(gp.pair.dim(), gp.pair.dim());
        for (int t = 0; t < m; ++t) prod = gp.pair.V1 * prod;
        for (int t = 0; t < n; ++t) prod = gp.pair.V2.adjoint() * prod;
        for (const Point& c : gp.cells) {
            if (c.j + n > j_hi) continue;
            for (int t = 0; t < 3; ++t)
                for (int s = 0; s < 3; ++s) CHECK(std::abs(prod(gp.index_of(c, s), gp.index_of(c, t)) - data.unitary(s, t)) < 1e-12);
        }
    }
}

TEST_CASE("generalized powers validate the period") {
    std::mt19937_64 rng(1);
    GeneralizedPowerData rising{2, 1, {ExtInt::finite(0), ExtInt::finite(1)}, random_unitary(2, rng)};
    CHECK_THROWS_AS(build_generalized_power(rising, 5), DomainError);
    GeneralizedPowerData steep{2, 1, {ExtInt::finite(5), ExtInt::finite(1)}, random_unitary(2, rng)};
    CHECK_THROWS_AS(build_generalized_power(steep, 8), DomainError);
    GeneralizedPowerData inf{1, 0, {ExtInt::pos_inf()}, random_unitary(2, rng)};
    CHECK_THROWS_AS(build_generalized_power(inf, 8), DomainError);
}

TEST_CASE("cyclic generalized powers are the periodic diagram shift") {
    CHECK(check_shift_bridge(2, 1, {ExtInt::finite(1), ExtInt::finite(0)}, 3, 6).pass);
    CHECK(check_shift_bridge(3, 2, {ExtInt::finite(2), ExtInt::finite(1), ExtInt::finite(1)}, 4, 7).pass);
    CHECK(check_shift_bridge(1, 0, {ExtInt::finite(0)}, 2, 4).pass);
}
