#include "riglab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <numeric>

namespace riglab {

namespace {

using CLD = std::complex<long double>;
using MatC = Eigen::Matrix<CLD, Eigen::Dynamic, Eigen::Dynamic>;
using VecC = Eigen::Matrix<CLD, Eigen::Dynamic, 1>;

struct RootInfo {
    CBig value;
    big radius;
    big mod_lo, mod_hi;
    int factor = 0;      // index into the factor list
    int mult = 0;        // multiplicity in the characteristic polynomial
    bool exact_one = false;
    int cluster = -1;
};

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

/// Swap adjacent diagonal entries k, k+1 of upper-triangular T by a unitary
/// similarity; U accumulates the transform.
void swap_schur_entries(MatC& T, MatC& U, int k) {
    CLD a = T(k, k), b = T(k, k + 1), c = T(k + 1, k + 1);
    long double n = std::sqrt(std::norm(b) + std::norm(c - a));
    if (n == 0.0L) return;  // already equal; order irrelevant
    CLD u0 = b / n, u1 = (c - a) / n;
    MatC G(2, 2);
    G << u0, -std::conj(u1), u1, std::conj(u0);
    int d = int(T.rows());
    T.block(0, k, k + 2, 2) = T.block(0, k, k + 2, 2) * G;
    T.block(k, k, 2, d - k) = G.adjoint() * T.block(k, k, 2, d - k);
    U.middleCols(k, 2) = U.middleCols(k, 2) * G;
    T(k + 1, k) = CLD(0);
}

/// Spectral projector onto the invariant subspace of the diagonal entries
/// selected by `in_cluster`, via ordered Schur and a triangular Sylvester
/// solve.
Eigen::MatrixXd projector_for_cluster(MatC T, MatC U, std::vector<int> sel) {
    int d = int(T.rows());
    int m = int(std::count(sel.begin(), sel.end(), 1));
    // Bubble selected entries to the top, preserving relative order.
    for (int target = 0; target < m; ++target) {
        int src = target;
        while (src < d && sel[src] != 1) ++src;
        for (int k = src; k > target; --k) {
            swap_schur_entries(T, U, k - 1);
            std::swap(sel[k - 1], sel[k]);
        }
    }
    if (m == d) return Eigen::MatrixXd::Identity(d, d);
    MatC T11 = T.topLeftCorner(m, m);
    MatC T12 = T.block(0, m, m, d - m);
    MatC T22 = T.block(m, m, d - m, d - m);
    // Solve T11 X - X T22 = -T12 column by column.
    MatC X(m, d - m);
    for (int j = 0; j < d - m; ++j) {
        VecC rhs = -T12.col(j);
        for (int k = 0; k < j; ++k) rhs += T22(k, j) * X.col(k);
        MatC A = T11 - T22(j, j) * MatC::Identity(m, m);
        X.col(j) = A.template triangularView<Eigen::Upper>().solve(rhs);
    }
    MatC W = MatC::Zero(d, d);
    W.topLeftCorner(m, m) = MatC::Identity(m, m);
    W.topRightCorner(m, d - m) = -X;
    MatC P = U * W * U.adjoint();
    Eigen::MatrixXd Pd(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) Pd(i, j) = double(P(i, j).real());
    return Pd;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

SpectralSplit modulus_clusters(const ZMat& m, double target_gap) {
    if (m.rows() != m.cols()) throw DimensionMismatch("modulus_clusters requires square matrix");
    const int d = m.rows();
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");

    ZPoly cp = char_poly(m);
    auto factors = factor_over_integers(cp);

    std::vector<RootInfo> roots;
    for (int fi = 0; fi < int(factors.size()); ++fi) {
        const auto& [f, mult] = factors[fi];
        bool cyclo = is_cyclotomic(f);
        for (const RootEnclosure& r : certified_roots(f)) {
            RootInfo info;
            info.value = r.value;
            info.radius = r.radius;
            info.factor = fi;
            info.mult = mult;
            info.exact_one = cyclo;
            big mod = r.value.abs();
            if (cyclo) {
                info.mod_lo = info.mod_hi = 1;
            } else {
                info.mod_lo = mod - r.radius;
                info.mod_hi = mod + r.radius;
            }
            roots.push_back(info);
        }
    }

    // Merge overlapping modulus intervals (ascending sweep).
    std::sort(roots.begin(), roots.end(),
              [](const RootInfo& a, const RootInfo& b) { return a.mod_lo < b.mod_lo; });
    int n = int(roots.size());
    std::vector<std::vector<int>> groups;
    big group_hi = 0;
    for (int i = 0; i < n; ++i) {
        if (groups.empty() || roots[i].mod_lo > group_hi) {
            groups.push_back({i});
            group_hi = roots[i].mod_hi;
        } else {
            groups.back().push_back(i);
            group_hi = std::max(group_hi, roots[i].mod_hi);
        }
    }

    // Negation-related factor pairs: g(x) = +-f(-x) in the factor list.
    auto negated = [&](const ZPoly& f) {
        std::vector<Int> c = f.c;
        for (size_t k = 0; k < c.size(); ++k)
            if (k % 2 == 1) c[k] = -c[k];
        ZPoly g(std::move(c));
        if (!g.c.empty() && g.c.back() < 0) g = -g;
        return g;
    };
    std::vector<int> neg_partner(factors.size(), -1);
    for (int i = 0; i < int(factors.size()); ++i) {
        ZPoly gi = negated(factors[i].first);
        for (int j = 0; j < int(factors.size()); ++j)
            if (factors[j].first == gi) neg_partner[i] = j;
    }

    // Within each merged group, every pair must be provably of equal modulus
    // (roots of unity, conjugate pairs, or negation pairs); otherwise the
    // separation is undecidable at this precision.
    for (const auto& g : groups) {
        if (g.size() <= 1) continue;
        UnionFind uf(int(g.size()));
        for (size_t a = 0; a < g.size(); ++a)
            for (size_t b = a + 1; b < g.size(); ++b) {
                const RootInfo &ra = roots[g[a]], &rb = roots[g[b]];
                if (ra.exact_one && rb.exact_one) uf.unite(int(a), int(b));
                if (ra.factor == rb.factor &&
                    (ra.value - rb.value.conj()).abs() <= ra.radius + rb.radius)
                    uf.unite(int(a), int(b));
                if (neg_partner[ra.factor] == rb.factor &&
                    (ra.value + rb.value).abs() <= ra.radius + rb.radius)
                    uf.unite(int(a), int(b));
            }
        for (size_t a = 1; a < g.size(); ++a)
            if (uf.find(int(a)) != uf.find(0))
                throw UndecidablePrecision(
                    "cluster separation undecidable at maximum precision");
    }

    // Certified gaps between consecutive groups.
    for (size_t gi = 0; gi + 1 < groups.size(); ++gi) {
        big hi = 0, lo;
        for (int i : groups[gi]) hi = std::max(hi, roots[i].mod_hi);
        lo = roots[groups[gi + 1].front()].mod_lo;
        for (int i : groups[gi + 1]) lo = std::min(lo, roots[i].mod_lo);
        if (lo - hi < big(target_gap))
            throw UndecidablePrecision("cluster gap below the certified target");
    }

    SpectralSplit split;
    split.dim = d;
    for (int gi = 0; gi < int(groups.size()); ++gi) {
        ClusterInterval ci;
        big lo = roots[groups[gi].front()].mod_lo, hi = 0;
        bool exact_one = true;
        int mult = 0;
        for (int i : groups[gi]) {
            lo = std::min(lo, roots[i].mod_lo);
            hi = std::max(hi, roots[i].mod_hi);
            exact_one = exact_one && roots[i].exact_one;
            mult += roots[i].mult;
            roots[i].cluster = gi;
        }
        ci.lo = std::nextafter(lo.convert_to<double>(), -1e300);
        ci.hi = std::nextafter(hi.convert_to<double>(), 1e300);
        ci.exact_one = exact_one;
        split.moduli.push_back(ci);
        split.multiplicities.push_back(mult);
        split.has_unit_cluster = split.has_unit_cluster || ci.contains_one();
    }

    for (int fi = 0; fi < int(factors.size()); ++fi) {
        std::vector<int> hit;
        for (const RootInfo& r : roots)
            if (r.factor == fi && (hit.empty() || hit.back() != r.cluster)) {
                if (std::find(hit.begin(), hit.end(), r.cluster) == hit.end())
                    hit.push_back(r.cluster);
            }
        std::sort(hit.begin(), hit.end());
        split.factor_clusters.emplace_back(factors[fi].first, hit);
    }

    // Projections via ordered complex Schur in extended precision.
    MatC A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = CLD((long double)m(i, j).get_d());
    Eigen::ComplexSchur<MatC> schur(A, true);
    MatC T = schur.matrixT(), U = schur.matrixU();

    // Assign Schur diagonal entries to clusters by nearest modulus.
    std::vector<int> diag_cluster(d);
    for (int k = 0; k < d; ++k) {
        long double mod = std::abs(T(k, k));
        int best = 0;
        double best_dist = 1e300;
        for (int gi = 0; gi < int(split.moduli.size()); ++gi) {
            double mid = split.lambda(gi);
            double dist = std::abs(double(mod) - mid);
            if (dist < best_dist) {
                best_dist = dist;
                best = gi;
            }
        }
        diag_cluster[k] = best;
    }
    for (int gi = 0; gi < int(split.moduli.size()); ++gi) {
        int cnt = int(std::count(diag_cluster.begin(), diag_cluster.end(), gi));
        if (cnt != split.multiplicities[gi])
            throw UndecidablePrecision("Schur diagonal could not be matched to clusters");
    }

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd Md = to_double(m);
    double residual = 0.0;
    for (int gi = 0; gi < int(split.moduli.size()); ++gi) {
        std::vector<int> sel(d);
        for (int k = 0; k < d; ++k) sel[k] = diag_cluster[k] == gi ? 1 : 0;
        Eigen::MatrixXd P = projector_for_cluster(T, U, sel);
        residual = std::max(residual, max_abs(P * P - P));
        residual = std::max(residual, max_abs(Md * P - P * Md));
        sum += P;
        split.projections.push_back(std::move(P));
    }
    residual = std::max(residual, max_abs(sum - Eigen::MatrixXd::Identity(d, d)));
    split.residual = residual;

    // Orthonormal basis of W^min from the leading projection.
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(split.projections[0], Eigen::ComputeFullU);
        split.min_block_basis = svd.matrixU().leftCols(split.multiplicities[0]);
    }

    const ClusterInterval& c0 = split.moduli[0];
    split.min_contracting = !c0.exact_one && c0.hi < 1.0;
    split.bottom_gap = split.num_clusters() >= 2;
    split.semisimple_min = is_semisimple_on_min(m, split);
    return split;
}

Ternary is_partially_hyperbolic(const SpectralSplit& split) {
    if (split.num_clusters() < 2) return Ternary::False;
    const ClusterInterval& c0 = split.moduli[0];
    if (split.min_contracting) return Ternary::True;  // gap certified by disjointness
    if (c0.exact_one || c0.lo >= 1.0) return Ternary::False;
    return Ternary::Undecided;  // interval straddles 1 without exact knowledge
}

Ternary is_semisimple_on_min(const ZMat& m, const SpectralSplit& split) {
    ZPoly mp = minimal_poly(m);
    for (const auto& [f, clusters] : split.factor_clusters) {
        if (std::find(clusters.begin(), clusters.end(), 0) == clusters.end()) continue;
        // Factor touches the minimal cluster: it must divide the minimal
        // polynomial exactly once.
        ZPoly q;
        if (!try_exact_divide(mp, f, &q)) continue;  // cannot happen for true factors
        if (try_exact_divide(q, f, nullptr)) return Ternary::False;
    }
    return Ternary::True;
}

const Eigen::MatrixXd& spectral_projection(const SpectralSplit& split, int i) {
    return split.projections.at(i);
}

Ternary is_r_regular(const ZMat& m) {
    ZPoly cp = char_poly(m);
    ZPoly g = poly_gcd(cp, cp.derivative());
    if (g.degree() > 0) return Ternary::False;  // repeated eigenvalue
    if (count_real_roots(cp) != cp.degree()) return Ternary::False;
    try {
        SpectralSplit split = modulus_clusters(m);
        for (int mult : split.multiplicities)
            if (mult != 1) return Ternary::False;  // +-lambda pair
        return Ternary::True;
    } catch (const UndecidablePrecision&) {
        return Ternary::Undecided;
    }
}

AdaptedNorm adapted_norm(const ZMat& m, const SpectralSplit& split, double rho) {
    if (rho <= 0) throw RhoTooLarge("rho must be positive");
    double min_gap = 1e300;
    for (int i = 0; i + 1 < split.num_clusters(); ++i)
        min_gap = std::min(min_gap, split.moduli[i + 1].lo - split.moduli[i].hi);
    if (split.num_clusters() >= 2 && rho >= 0.5 * min_gap)
        throw RhoTooLarge("rho exceeds half the smallest certified cluster gap");

    AdaptedNorm norm;
    norm.dim = split.dim;
    norm.rho = rho;
    norm.projections = split.projections;
    Eigen::MatrixXd Md = to_double(m);

    for (int i = 0; i < split.num_clusters(); ++i) {
        int mi = split.multiplicities[i];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(split.projections[i], Eigen::ComputeFullU);
        Eigen::MatrixXd B = svd.matrixU().leftCols(mi);  // orthonormal range basis
        Eigen::MatrixXd R = B.transpose() * Md * B;
        Eigen::ComplexSchur<Eigen::MatrixXcd> schur(R, true);
        Eigen::MatrixXcd T = schur.matrixT(), U = schur.matrixU();
        double lam = split.lambda(i);
        // Diagonal scaling kills the strictly-upper part of T.
        double s = 1.0;
        Eigen::MatrixXcd C;
        for (int attempt = 0; attempt < 200; ++attempt) {
            Eigen::VectorXd scale(mi);
            for (int k = 0; k < mi; ++k) scale(k) = std::pow(s, k);
            Eigen::MatrixXcd Ts = scale.cwiseInverse().asDiagonal() * T * scale.asDiagonal();
            double off = 0.0;
            for (int r = 0; r < mi; ++r)
                for (int c = r + 1; c < mi; ++c) off += std::abs(Ts(r, c));
            if (off <= std::max(0.45 * rho, 1e-11)) {
                C = scale.cwiseInverse().asDiagonal() * U.adjoint() * B.transpose();
                break;
            }
            s *= 0.5;
        }
        if (C.rows() == 0) throw RhoTooLarge("could not adapt block norm at this rho");
        norm.lambda.push_back(lam);
        norm.coord_maps.push_back(std::move(C));
    }
    return norm;
}

}  // namespace riglab
