#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <riglab/polynomial.hpp>

#include "helpers.hpp"

using namespace riglab;
using namespace riglab::testing;

TEST_CASE("char_poly of the cat map") {
    ZPoly p = char_poly(cat2());
    CHECK(p == ZPoly{1, -3, 1});  // x^2 - 3x + 1
}

TEST_CASE("char_poly agrees with det(xI - M) at integer points") {
    CounterRng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        int d = 2 + int(rng.next_u64() % 3);
        ZMat m = random_int_matrix(rng, d, -3, 3);
        ZPoly p = char_poly(m);
        CHECK(p.degree() == d);
        CHECK(p.is_monic());
        for (long x = -3; x <= 3; ++x) {
            ZMat xi = ZMat::identity(d);
            for (int i = 0; i < d; ++i) xi(i, i) = x;
            CHECK(p.eval(Rat(x)) == Rat(determinant(xi - m)));
        }
    }
}

TEST_CASE("minimal polynomial") {
    CHECK(minimal_poly(ZMat::identity(3)) == ZPoly{-1, 1});
    CHECK(minimal_poly(cat2()) == char_poly(cat2()));

    // Non-derogatory 4x4 built from two coupled cat blocks: minimal poly is
    // the square of the cat quadratic.
    ZMat j = zmat(4, {2, 1, 1, 0, 1, 1, 0, 1, 0, 0, 2, 1, 0, 0, 1, 1});
    ZPoly q = ZPoly{1, -3, 1};
    CHECK(minimal_poly(j) == q * q);
}

TEST_CASE("real root counting via Sturm chains") {
    CHECK(count_real_roots(ZPoly{1, -3, 1}) == 2);
    CHECK(count_real_roots(ZPoly{1, 0, 1}) == 0);   // x^2 + 1
    CHECK(count_real_roots(ZPoly{0, -1, 0, 1}) == 3);  // x^3 - x
}

TEST_CASE("factorization over the integers") {
    // x^4 - 1 = (x-1)(x+1)(x^2+1)
    auto factors = factor_over_integers(ZPoly{-1, 0, 0, 0, 1});
    REQUIRE(factors.size() == 3);
    ZPoly prod{1};
    for (const auto& [f, mult] : factors) {
        CHECK(mult == 1);
        for (int k = 0; k < mult; ++k) prod = prod * f;
    }
    CHECK(prod == ZPoly{-1, 0, 0, 0, 1});
}

TEST_CASE("squarefree decomposition") {
    // (x-1)^2 (x+2)
    ZPoly p = ZPoly{-1, 1} * ZPoly{-1, 1} * ZPoly{2, 1};
    auto parts = squarefree_decomposition(p);
    ZPoly prod{1};
    for (const auto& [f, mult] : parts)
        for (int k = 0; k < mult; ++k) prod = prod * f;
    CHECK(prod == p);
    bool has_square = false;
    for (const auto& [f, mult] : parts)
        if (mult == 2) has_square = (f == ZPoly{-1, 1});
    CHECK(has_square);
}

TEST_CASE("gcd and exact division") {
    ZPoly a = ZPoly{-1, 1} * ZPoly{1, 0, 1};
    ZPoly b = ZPoly{-1, 1} * ZPoly{2, 1};
    CHECK(poly_gcd(a, b) == ZPoly{-1, 1});

    ZPoly q;
    CHECK(try_exact_divide(ZPoly{-1, 0, 1}, ZPoly{-1, 1}, &q));
    CHECK(q == ZPoly{1, 1});
    CHECK_FALSE(try_exact_divide(ZPoly{1, 0, 1}, ZPoly{-1, 1}, &q));
}

TEST_CASE("euclidean division remainder invariant") {
    CounterRng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Int> pc, dc;
        for (int i = 0; i < 6; ++i) pc.emplace_back(long(rng.next_u64() % 9) - 4);
        for (int i = 0; i < 3; ++i) dc.emplace_back(long(rng.next_u64() % 9) - 4);
        dc.push_back(1);
        QPoly p{ZPoly(pc)}, d{ZPoly(dc)};
        if (p.is_zero()) continue;
        auto [q, r] = divmod(p, d);
        CHECK(r.degree() < d.degree());
        // p == q*d + r, checked at rational sample points
        for (long x = -2; x <= 2; ++x) {
            Rat px = 0, qx = 0, rx = 0, dx = 0, xp = 1;
            for (const auto& c : p.c) { px += c * xp; xp *= x; }
            xp = 1;
            for (const auto& c : q.c) { qx += c * xp; xp *= x; }
            xp = 1;
            for (const auto& c : r.c) { rx += c * xp; xp *= x; }
            xp = 1;
            for (const auto& c : d.c) { dx += c * xp; xp *= x; }
            CHECK(px == qx * dx + rx);
        }
    }
}

TEST_CASE("cyclotomicity") {
    CHECK(is_cyclotomic(ZPoly{1, 1, 1}));      // x^2 + x + 1
    CHECK(is_cyclotomic(ZPoly{-1, 1}));        // x - 1
    CHECK(is_cyclotomic(ZPoly{1, 0, 1}));      // x^2 + 1
    CHECK_FALSE(is_cyclotomic(ZPoly{1, -3, 1}));
    CHECK_FALSE(is_cyclotomic(ZPoly{-2, 1}));
}

TEST_CASE("certified roots of the cat quadratic") {
    auto roots = certified_roots(ZPoly{1, -3, 1});
    REQUIRE(roots.size() == 2);
    double lo = (3.0 - std::sqrt(5.0)) / 2.0;
    double hi = (3.0 + std::sqrt(5.0)) / 2.0;
    for (const auto& r : roots) {
        CHECK(double(r.radius) < 1e-30);
        CHECK(std::abs(r.value.im.convert_to<double>()) < 1e-30);
        double re = r.value.re.convert_to<double>();
        CHECK((std::abs(re - lo) < 1e-12 || std::abs(re - hi) < 1e-12));
    }
}
