#pragma once

#include <string>
#include <utility>
#include <vector>

#include "riglab/bigfloat.hpp"
#include "riglab/exact.hpp"

namespace riglab {

/// Integer polynomial, coefficients low to high, no trailing zeros; the zero
/// polynomial has an empty coefficient vector.
struct ZPoly {
    std::vector<Int> c;

    ZPoly() = default;
    ZPoly(std::initializer_list<long> coeffs) {
        for (long x : coeffs) c.emplace_back(x);
        trim();
    }
    explicit ZPoly(std::vector<Int> coeffs) : c(std::move(coeffs)) { trim(); }

    static ZPoly x_power(int k);  // x^k

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    int degree() const { return int(c.size()) - 1; }  // -1 for zero
    bool is_monic() const { return !c.empty() && c.back() == 1; }
    const Int& coeff(int k) const { return c[k]; }

    bool operator==(const ZPoly& o) const { return c == o.c; }

    ZPoly operator+(const ZPoly& o) const;
    ZPoly operator-(const ZPoly& o) const;
    ZPoly operator*(const ZPoly& o) const;
    ZPoly operator-() const;

    ZPoly derivative() const;

    Rat eval(const Rat& x) const;
    big eval(const big& x) const;
    CBig eval(const CBig& z) const;
    double eval(double x) const;

    std::string to_string() const;  // human-readable, for reports
};

/// Rational polynomial, used for exact division and Sturm chains.
struct QPoly {
    std::vector<Rat> c;

    QPoly() = default;
    explicit QPoly(const ZPoly& p) {
        for (const Int& x : p.c) c.emplace_back(x);
    }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    int degree() const { return int(c.size()) - 1; }

    QPoly operator*(const Rat& s) const;
    QPoly derivative() const;
};

/// Euclidean division p = q*d + r with deg r < deg d.
std::pair<QPoly, QPoly> divmod(const QPoly& p, const QPoly& d);

/// Exact division of integer polynomials; returns quotient only when the
/// division is exact over the integers.
bool try_exact_divide(const ZPoly& p, const ZPoly& d, ZPoly* quotient);

/// Primitive part of gcd over Q, normalized to positive leading coefficient.
ZPoly poly_gcd(const ZPoly& a, const ZPoly& b);

/// Number of distinct real roots, exact (Sturm chain over Q).
int count_real_roots(const ZPoly& p);

/// Yun's squarefree decomposition: p = prod parts[k].first^(parts[k].second),
/// parts pairwise coprime and squarefree. Requires monic p.
std::vector<std::pair<ZPoly, int>> squarefree_decomposition(const ZPoly& p);

/// Factorization into irreducible monic factors over Z with multiplicities.
/// Deterministic output order (degree, then coefficients). Requires monic p.
std::vector<std::pair<ZPoly, int>> factor_over_integers(const ZPoly& p);

/// Exact cyclotomicity test: true iff all roots are roots of unity.
/// Used to certify eigenvalue modulus exactly 1.
bool is_cyclotomic(const ZPoly& p);

/// One approximated root of a squarefree polynomial with a certified
/// enclosure radius: the disc |z - value| <= radius contains exactly one root.
struct RootEnclosure {
    CBig value;
    big radius;
};

/// All roots of a squarefree polynomial at 256-bit working precision
/// (Durand-Kerner with certified a posteriori radii). Throws
/// UndecidablePrecision if the enclosures cannot be made pairwise disjoint.
std::vector<RootEnclosure> certified_roots(const ZPoly& p);

/// Exact characteristic polynomial of an integer matrix (monic, degree d).
ZPoly char_poly(const ZMat& m);

/// Exact minimal polynomial (monic), via factor multiplicity stabilization.
ZPoly minimal_poly(const ZMat& m);

}  // namespace riglab
