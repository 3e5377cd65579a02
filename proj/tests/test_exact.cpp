#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <riglab/exact.hpp>

#include "helpers.hpp"

using namespace riglab;
using namespace riglab::testing;

// Independent oracle: cofactor expansion along the first row.
static Int brute_det(const ZMat& m) {
    int n = m.rows();
    if (n == 1) return m(0, 0);
    Int d = 0;
    for (int j = 0; j < n; ++j) {
        if (m(0, j) == 0) continue;
        ZMat minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = m(r, c);
            }
        }
        Int term = m(0, j) * brute_det(minor);
        d += (j % 2 == 0) ? term : -term;
    }
    return d;
}

TEST_CASE("determinant matches cofactor expansion on random matrices") {
    CounterRng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        int d = 2 + int(rng.next_u64() % 3);
        ZMat m = random_int_matrix(rng, d, -4, 4);
        CHECK(determinant(m) == brute_det(m));
        CHECK(determinant(to_rational(m)) == Rat(brute_det(m)));
    }
}

TEST_CASE("unimodularity and integral inverse") {
    ZMat m = cat2();
    CHECK(determinant(m) == 1);
    CHECK(is_unimodular(m));
    CHECK(m * unimodular_inverse(m) == ZMat::identity(2));

    CounterRng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        ZMat u = random_unimodular(rng, 3);
        CHECK(is_unimodular(u));
        CHECK(unimodular_inverse(u) * u == ZMat::identity(3));
    }
    CHECK_FALSE(is_unimodular(zmat(2, {2, 0, 0, 1})));
}

TEST_CASE("powers, including negative exponents") {
    ZMat m = cat2();
    CHECK(power(m, 0) == ZMat::identity(2));
    CHECK(power(m, 3) == m * m * m);
    CHECK(power(m, -2) * power(m, 2) == ZMat::identity(2));
    CHECK(power(m, -1) == unimodular_inverse(m));
}

TEST_CASE("rational inverse solves to the identity") {
    CounterRng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        ZMat m = random_int_matrix(rng, 3, -3, 3);
        if (determinant(m) == 0) continue;
        QMat q = to_rational(m);
        QMat qi = inverse(q);
        CHECK(qi * q == QMat::identity(3));
    }
    CHECK_THROWS(inverse(to_rational(zmat(2, {1, 2, 2, 4}))));
}

TEST_CASE("rank") {
    CHECK(rank(ZMat::identity(4)) == 4);
    CHECK(rank(zmat(2, {1, 2, 2, 4})) == 1);
    CHECK(rank(zmat(3, {0, 0, 0, 0, 0, 0, 0, 0, 0})) == 0);
}

TEST_CASE("integer/rational round trips") {
    ZMat m = cat2();
    CHECK(to_integer(to_rational(m)) == m);
    QMat half(1, 1);
    half(0, 0) = Rat(1, 2);
    CHECK_THROWS(to_integer(half));
    Eigen::MatrixXd d = to_double(m);
    CHECK(d(0, 0) == 2.0);
    CHECK(d(1, 1) == 1.0);
}

TEST_CASE("matrix-vector product and trace") {
    ZMat m = cat2();
    std::vector<Int> v{Int(1), Int(2)};
    auto w = m * v;
    CHECK(w[0] == 4);
    CHECK(w[1] == 3);
    CHECK(m.trace() == 3);
    CHECK(m.transpose()(0, 1) == 1);
}
