#include "riglab/polynomial.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace riglab {

ZPoly ZPoly::x_power(int k) {
    std::vector<Int> c(k + 1);
    c[k] = 1;
    return ZPoly(std::move(c));
}

ZPoly ZPoly::operator+(const ZPoly& o) const {
    std::vector<Int> r(std::max(c.size(), o.c.size()));
    for (size_t i = 0; i < c.size(); ++i) r[i] += c[i];
    for (size_t i = 0; i < o.c.size(); ++i) r[i] += o.c[i];
    return ZPoly(std::move(r));
}

ZPoly ZPoly::operator-(const ZPoly& o) const { return *this + (-o); }

ZPoly ZPoly::operator-() const {
    std::vector<Int> r(c.size());
    for (size_t i = 0; i < c.size(); ++i) r[i] = -c[i];
    return ZPoly(std::move(r));
}

ZPoly ZPoly::operator*(const ZPoly& o) const {
    if (is_zero() || o.is_zero()) return ZPoly();
    std::vector<Int> r(c.size() + o.c.size() - 1);
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = 0; j < o.c.size(); ++j) r[i + j] += c[i] * o.c[j];
    return ZPoly(std::move(r));
}

ZPoly ZPoly::derivative() const {
    if (c.size() <= 1) return ZPoly();
    std::vector<Int> r(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i) r[i - 1] = Int(long(i)) * c[i];
    return ZPoly(std::move(r));
}

Rat ZPoly::eval(const Rat& x) const {
    Rat v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

big ZPoly::eval(const big& x) const {
    big v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + big(it->get_str());
    return v;
}

CBig ZPoly::eval(const CBig& z) const {
    CBig v;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + CBig(big(it->get_str()));
    return v;
}

double ZPoly::eval(double x) const {
    double v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + it->get_d();
    return v;
}

std::string ZPoly::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const Int& a = c[k];
        if (a == 0) continue;
        Int mag = abs(a);
        if (!first) os << (a < 0 ? " - " : " + ");
        else if (a < 0) os << "-";
        first = false;
        if (mag != 1 || k == 0) os << mag.get_str();
        if (k >= 1) os << "x";
        if (k >= 2) os << "^" << k;
    }
    return os.str();
}

QPoly QPoly::operator*(const Rat& s) const {
    QPoly r = *this;
    for (auto& x : r.c) x *= s;
    r.trim();
    return r;
}

QPoly QPoly::derivative() const {
    QPoly r;
    for (size_t i = 1; i < c.size(); ++i) r.c.push_back(Rat(long(i)) * c[i]);
    r.trim();
    return r;
}

std::pair<QPoly, QPoly> divmod(const QPoly& p, const QPoly& d) {
    if (d.is_zero()) throw std::invalid_argument("division by zero polynomial");
    QPoly r = p, q;
    q.c.assign(std::max(0, p.degree() - d.degree() + 1), Rat(0));
    while (!r.is_zero() && r.degree() >= d.degree()) {
        Rat f = r.c.back() / d.c.back();
        int shift = r.degree() - d.degree();
        q.c[shift] = f;
        for (int i = 0; i <= d.degree(); ++i) r.c[i + shift] -= f * d.c[i];
        r.c.pop_back();
        r.trim();
    }
    q.trim();
    return {q, r};
}

bool try_exact_divide(const ZPoly& p, const ZPoly& d, ZPoly* quotient) {
    auto [q, r] = divmod(QPoly(p), QPoly(d));
    if (!r.is_zero()) return false;
    std::vector<Int> qi(q.c.size());
    for (size_t i = 0; i < q.c.size(); ++i) {
        Rat x = q.c[i];
        x.canonicalize();
        if (x.get_den() != 1) return false;
        qi[i] = x.get_num();
    }
    if (quotient) *quotient = ZPoly(std::move(qi));
    return true;
}

namespace {

/// Primitive integer polynomial from a rational one, positive leading coeff.
ZPoly primitive_part(const QPoly& p) {
    if (p.is_zero()) return ZPoly();
    Int den = 1;
    for (Rat x : p.c) {
        x.canonicalize();
        Int d = x.get_den();
        den = den / gcd(den, d) * d;  // lcm
    }
    std::vector<Int> c(p.c.size());
    Int content = 0;
    for (size_t i = 0; i < p.c.size(); ++i) {
        Rat x = p.c[i] * Rat(den);
        x.canonicalize();
        c[i] = x.get_num();
        content = gcd(content, c[i]);
    }
    if (content == 0) return ZPoly();
    if (c.back() < 0) content = -content;
    for (auto& x : c) x /= content;
    return ZPoly(std::move(c));
}

int sign_of(const Rat& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace

ZPoly poly_gcd(const ZPoly& a, const ZPoly& b) {
    QPoly x(a), y(b);
    while (!y.is_zero()) {
        QPoly r = divmod(x, y).second;
        x = y;
        y = r;
    }
    return primitive_part(x);
}

int count_real_roots(const ZPoly& p) {
    if (p.degree() <= 0) return 0;
    ZPoly sf = p;
    ZPoly g = poly_gcd(p, p.derivative());
    if (g.degree() > 0) {
        ZPoly q;
        try_exact_divide(p, g, &q);
        sf = q;
    }
    // Sturm chain on the squarefree part.
    std::vector<QPoly> chain;
    chain.emplace_back(sf);
    chain.emplace_back(QPoly(sf).derivative());
    while (!chain.back().is_zero()) {
        QPoly r = divmod(chain[chain.size() - 2], chain.back()).second;
        chain.push_back(r * Rat(-1));
    }
    chain.pop_back();
    int var_minf = 0, var_pinf = 0;
    int prev_minf = 0, prev_pinf = 0;
    for (const QPoly& q : chain) {
        if (q.is_zero()) continue;
        int lead = sign_of(q.c.back());
        int at_pinf = lead;
        int at_minf = q.degree() % 2 == 0 ? lead : -lead;
        if (prev_pinf != 0 && at_pinf != prev_pinf) ++var_pinf;
        if (prev_minf != 0 && at_minf != prev_minf) ++var_minf;
        prev_pinf = at_pinf;
        prev_minf = at_minf;
    }
    return var_minf - var_pinf;
}

std::vector<std::pair<ZPoly, int>> squarefree_decomposition(const ZPoly& p) {
    if (!p.is_monic()) throw std::invalid_argument("squarefree decomposition requires monic input");
    std::vector<std::pair<ZPoly, int>> parts;
    // Yun's algorithm (characteristic zero).
    ZPoly a = p, d = p.derivative();
    ZPoly g = poly_gcd(a, d);
    ZPoly b, c;
    try_exact_divide(a, g, &b);
    try_exact_divide(d, g, &c);
    c = c - b.derivative();
    int k = 1;
    while (b.degree() > 0) {
        ZPoly f = poly_gcd(b, c);
        if (f.degree() > 0) parts.emplace_back(f, k);
        ZPoly bn, cn;
        try_exact_divide(b, f, &bn);
        try_exact_divide(c, f, &cn);
        b = bn;
        c = cn - b.derivative();
        ++k;
    }
    return parts;
}

std::vector<RootEnclosure> certified_roots(const ZPoly& p) {
    int n = p.degree();
    if (n <= 0) return {};
    std::vector<big> b(n + 1);
    big lead = big(p.c[n].get_str());
    for (int i = 0; i <= n; ++i) b[i] = big(p.c[i].get_str()) / lead;

    auto eval = [&](const CBig& z, CBig* deriv) {
        CBig v(b[n]), dv;
        for (int i = n - 1; i >= 0; --i) {
            dv = dv * z + v;
            v = v * z + CBig(b[i]);
        }
        if (deriv) *deriv = dv;
        return v;
    };

    // Cauchy-style root bound.
    big bound = 0;
    for (int i = 0; i < n; ++i) bound = std::max(bound, big(boost::multiprecision::abs(b[i])));
    bound += 1;

    // Durand-Kerner from points on a slightly irrational spiral.
    std::vector<CBig> z(n);
    {
        CBig base(big("0.4"), big("0.9"));
        CBig cur(big(1));
        for (int i = 0; i < n; ++i) {
            cur = cur * base;
            z[i] = cur * CBig(bound) + CBig(big("0.0123456789"), big("0.0112233445"));
        }
    }
    const big tol = big("1e-70");
    for (int iter = 0; iter < 600; ++iter) {
        big max_step = 0;
        for (int i = 0; i < n; ++i) {
            CBig num = eval(z[i], nullptr);
            CBig den(big(1));
            for (int j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            if (den.abs2() == 0) {
                z[i] += CBig(big("1e-10"), big("1e-10"));
                max_step = std::max(max_step, big(1));
                continue;
            }
            CBig step = num / den;
            z[i] -= step;
            max_step = std::max(max_step, step.abs());
        }
        if (max_step < tol * bound) break;
    }

    std::vector<RootEnclosure> roots(n);
    for (int i = 0; i < n; ++i) {
        CBig dv;
        CBig v = eval(z[i], &dv);
        big da = dv.abs();
        if (da == 0) throw UndecidablePrecision("vanishing derivative at approximate root");
        roots[i] = {z[i], big(n) * v.abs() / da};
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((roots[i].value - roots[j].value).abs() <= roots[i].radius + roots[j].radius)
                throw UndecidablePrecision("root enclosures overlap at maximum precision");
    // Deterministic order: by real part, then imaginary part.
    std::sort(roots.begin(), roots.end(), [](const RootEnclosure& a, const RootEnclosure& b) {
        if (a.value.re != b.value.re) return a.value.re < b.value.re;
        return a.value.im < b.value.im;
    });
    return roots;
}

namespace {

Int big_to_int_nearest(const big& r) {
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), r.backend().data(), MPFR_RNDN);
    return z;
}

bool coeff_less(const ZPoly& a, const ZPoly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (int k = a.degree(); k >= 0; --k)
        if (a.c[k] != b.c[k]) return a.c[k] < b.c[k];
    return false;
}

/// Factor a squarefree monic integer polynomial by combining certified
/// numerical roots into integer-coefficient divisors (desk-scale degrees).
std::vector<ZPoly> factor_squarefree(const ZPoly& p) {
    std::vector<ZPoly> out;
    ZPoly rem = p;
    while (rem.degree() > 0) {
        auto roots = certified_roots(rem);
        int n = rem.degree();
        bool found = false;
        for (int k = 1; !found && k <= n / 2; ++k) {
            // All k-subsets of root indices, lexicographic.
            std::vector<int> idx(k);
            for (int i = 0; i < k; ++i) idx[i] = i;
            while (true) {
                // Monic polynomial with the selected roots.
                std::vector<CBig> coef(1, CBig(big(1)));
                for (int i : idx) {
                    coef.insert(coef.begin(), CBig(big(0)));
                    for (size_t t = 0; t + 1 < coef.size(); ++t)
                        coef[t] = coef[t] - roots[i].value * coef[t + 1];
                }
                bool integral = true;
                std::vector<Int> ic(coef.size());
                const big eps = big("1e-30");
                for (size_t t = 0; integral && t < coef.size(); ++t) {
                    if (boost::multiprecision::abs(coef[t].im) > eps) integral = false;
                    big r = boost::multiprecision::round(coef[t].re);
                    if (boost::multiprecision::abs(coef[t].re - r) > eps) integral = false;
                    if (integral) ic[t] = big_to_int_nearest(r);
                }
                ZPoly candidate;
                if (integral) candidate = ZPoly(std::move(ic));
                ZPoly q;
                if (integral && candidate.degree() == k && try_exact_divide(rem, candidate, &q)) {
                    out.push_back(candidate);
                    rem = q;
                    found = true;
                    break;
                }
                // Next combination.
                int pos = k - 1;
                while (pos >= 0 && idx[pos] == n - k + pos) --pos;
                if (pos < 0) break;
                ++idx[pos];
                for (int t = pos + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
            }
        }
        if (!found) {
            out.push_back(rem);  // irreducible
            break;
        }
    }
    return out;
}

}  // namespace

std::vector<std::pair<ZPoly, int>> factor_over_integers(const ZPoly& p) {
    if (!p.is_monic()) throw std::invalid_argument("factorization requires a monic polynomial");
    std::vector<std::pair<ZPoly, int>> out;
    for (const auto& [part, mult] : squarefree_decomposition(p))
        for (const ZPoly& f : factor_squarefree(part)) out.emplace_back(f, mult);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return coeff_less(a.first, b.first); });
    return out;
}

bool is_cyclotomic(const ZPoly& p) {
    if (p.degree() <= 0 || !p.is_monic()) return false;
    ZPoly sf = p;
    ZPoly g = poly_gcd(p, p.derivative());
    if (g.degree() > 0) try_exact_divide(p, g, &sf);
    // phi(l) >= sqrt(l/2), so orders are bounded by 2*deg^2.
    int deg = sf.degree();
    for (long l = 1; l <= 2L * deg * deg + 2; ++l) {
        ZPoly xl = ZPoly::x_power(int(l)) - ZPoly{1};
        if (try_exact_divide(xl, sf, nullptr)) return true;
    }
    return false;
}

ZPoly char_poly(const ZMat& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("characteristic polynomial of non-square");
    int d = m.rows();
    // Faddeev-LeVerrier; all divisions are exact.
    QMat A = to_rational(m);
    QMat Mk = A;
    std::vector<Rat> coeff(d + 1);
    coeff[d] = 1;
    Rat ck = -Mk.trace();
    coeff[d - 1] = ck;
    for (int k = 2; k <= d; ++k) {
        QMat shifted = Mk;
        for (int i = 0; i < d; ++i) shifted(i, i) += ck;
        Mk = A * shifted;
        ck = -Mk.trace() / Rat(long(k));
        coeff[d - k] = ck;
    }
    std::vector<Int> ic(d + 1);
    for (int i = 0; i <= d; ++i) {
        Rat x = coeff[i];
        x.canonicalize();
        ic[i] = x.get_num();
    }
    return ZPoly(std::move(ic));
}

namespace {

ZMat eval_at_matrix(const ZPoly& p, const ZMat& m) {
    int d = m.rows();
    ZMat v(d, d);
    for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) {
        v = v * m;
        for (int i = 0; i < d; ++i) v(i, i) += *it;
    }
    return v;
}

}  // namespace

ZPoly minimal_poly(const ZMat& m) {
    ZPoly cp = char_poly(m);
    ZPoly result{1};
    for (const auto& [f, mult] : factor_over_integers(cp)) {
        ZMat F = eval_at_matrix(f, m);
        ZMat Fe = F;
        int prev_rank = rank(Fe);
        int e = 1;
        while (e < mult) {
            ZMat next = Fe * F;
            int r = rank(next);
            if (r == prev_rank) break;
            Fe = next;
            prev_rank = r;
            ++e;
        }
        ZPoly fe = f;
        for (int i = 1; i < e; ++i) fe = fe * f;
        result = result * fe;
    }
    return result;
}

}  // namespace riglab
