#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <riglab/spectral.hpp>

#include "helpers.hpp"

using namespace riglab;
using namespace riglab::testing;

TEST_CASE("cat map cluster structure") {
    SpectralSplit s = modulus_clusters(cat2());
    REQUIRE(s.num_clusters() == 2);
    CHECK(s.multiplicities[0] == 1);
    CHECK(s.multiplicities[1] == 1);
    double l1 = (3.0 - std::sqrt(5.0)) / 2.0;
    double l2 = (3.0 + std::sqrt(5.0)) / 2.0;
    CHECK(s.moduli[0].lo <= l1);
    CHECK(l1 <= s.moduli[0].hi);
    CHECK(s.moduli[1].lo <= l2);
    CHECK(l2 <= s.moduli[1].hi);
    CHECK(s.moduli[0].hi - s.moduli[0].lo < 1e-12);
    CHECK(s.moduli[0].hi < s.moduli[1].lo);  // certified disjoint
    CHECK(s.min_contracting);
    CHECK(s.bottom_gap);
    CHECK_FALSE(s.has_unit_cluster);
    CHECK(is_partially_hyperbolic(s) == Ternary::True);
    CHECK(is_semisimple_on_min(cat2(), s) == Ternary::True);
    CHECK(is_r_regular(cat2()) == Ternary::True);
}

TEST_CASE("resolution of identity and invariance of projections") {
    SpectralSplit s = modulus_clusters(cat2());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd md = to_double(cat2());
    for (int i = 0; i < s.num_clusters(); ++i) {
        const Eigen::MatrixXd& p = spectral_projection(s, i);
        sum += p;
        CHECK((p * p - p).norm() < 1e-10);            // idempotent
        CHECK((md * p - p * md).norm() < 1e-10);      // commutes with M
    }
    CHECK((sum - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-10);
    CHECK(s.residual < 1e-8);

    // min_block_basis spans the stable eigenline
    Eigen::VectorXd v = s.min_block_basis.col(0);
    double l1 = (3.0 - std::sqrt(5.0)) / 2.0;
    CHECK((md * v - l1 * v).norm() < 1e-10);
}

TEST_CASE("unit-modulus clusters are certified exactly") {
    SpectralSplit s = modulus_clusters(shear_n());  // unipotent
    REQUIRE(s.num_clusters() == 1);
    CHECK(s.moduli[0].exact_one);
    CHECK(s.has_unit_cluster);
    CHECK(is_partially_hyperbolic(s) == Ternary::False);

    SpectralSplit rot = modulus_clusters(zmat(2, {0, -1, 1, 0}));
    REQUIRE(rot.num_clusters() == 1);
    CHECK(rot.moduli[0].exact_one);
    CHECK(rot.multiplicities[0] == 2);
}

TEST_CASE("3d matrix with two stable moduli") {
    // Companion of x^3 - 9x^2 + 6x - 1: all roots real, two inside the disc.
    ZMat c = zmat(3, {0, 0, 1, 1, 0, -6, 0, 1, 9});
    SpectralSplit s = modulus_clusters(c);
    REQUIRE(s.num_clusters() == 3);
    CHECK(s.lambda(0) == doctest::Approx(0.28312).epsilon(1e-3));
    CHECK(s.lambda(1) == doctest::Approx(0.42602).epsilon(1e-3));
    CHECK(s.lambda(2) == doctest::Approx(8.29086).epsilon(1e-3));
    CHECK(is_partially_hyperbolic(s) == Ternary::True);
    CHECK(is_r_regular(c) == Ternary::True);
}

TEST_CASE("complex pairs share a modulus cluster") {
    // Companion of x^3 - x - 1 (plastic number): complex contracting pair.
    ZMat c = zmat(3, {0, 0, 1, 1, 0, 1, 0, 1, 0});
    SpectralSplit s = modulus_clusters(c);
    REQUIRE(s.num_clusters() == 2);
    CHECK(s.multiplicities[0] == 2);
    CHECK(s.min_contracting);
    CHECK(is_r_regular(c) == Ternary::False);
}

TEST_CASE("non-semisimple minimal block is detected") {
    ZMat j = zmat(4, {2, 1, 1, 0, 1, 1, 0, 1, 0, 0, 2, 1, 0, 0, 1, 1});
    SpectralSplit s = modulus_clusters(j);
    REQUIRE(s.num_clusters() == 2);
    CHECK(s.multiplicities[0] == 2);
    CHECK(is_semisimple_on_min(j, s) == Ternary::False);
}

TEST_CASE("adapted norm sandwich and block additivity") {
    ZMat m = cat2();
    SpectralSplit s = modulus_clusters(m);
    double rho = 0.05;
    AdaptedNorm norm = adapted_norm(m, s, rho);
    Eigen::MatrixXd md = to_double(m);

    CounterRng rng(17);
    for (int trial = 0; trial < 10000; ++trial) {
        Eigen::VectorXd v(2);
        v << rng.next_gaussian(), rng.next_gaussian();
        double total = 0.0;
        for (int i = 0; i < s.num_clusters(); ++i) {
            double bi = norm.block_norm(i, v);
            total += bi;
            double bim = norm.block_norm(i, md * v);
            CHECK(bim >= (s.lambda(i) - rho) * bi - 1e-9);
            CHECK(bim <= (s.lambda(i) + rho) * bi + 1e-9);
        }
        CHECK(norm(v) == doctest::Approx(total).epsilon(1e-12));
    }
    CHECK_THROWS_AS(adapted_norm(m, s, 2.0), RhoTooLarge);
}
