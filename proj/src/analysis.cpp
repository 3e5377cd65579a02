#include "riglab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riglab/bigfloat.hpp"
#include "riglab/common.hpp"

namespace riglab {

namespace {

using BigVec = std::vector<big>;

struct BigMat {
    int rows = 0, cols = 0;
    std::vector<big> a;

    BigMat() = default;
    BigMat(int r, int c) : rows(r), cols(c), a(size_t(r) * c, big(0)) {}
    big& operator()(int i, int j) { return a[size_t(i) * cols + j]; }
    const big& operator()(int i, int j) const { return a[size_t(i) * cols + j]; }
};

BigMat big_from(const ZMat& m) {
    BigMat r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = big(m(i, j).get_str());
    return r;
}

BigMat big_from(const QMat& m) {
    BigMat r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            r(i, j) = big(m(i, j).get_num().get_str()) / big(m(i, j).get_den().get_str());
    return r;
}

BigVec matvec(const BigMat& m, const BigVec& v) {
    BigVec r(m.rows, big(0));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r[i] += m(i, j) * v[j];
    return r;
}

BigVec matvec_t(const BigMat& m, const BigVec& v) {
    BigVec r(m.cols, big(0));
    for (int j = 0; j < m.cols; ++j)
        for (int i = 0; i < m.rows; ++i) r[j] += m(i, j) * v[i];
    return r;
}

big dot(const BigVec& a, const BigVec& b) {
    big s(0);
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

big norm2(const BigVec& v) { return sqrt(dot(v, v)); }

const big& big_pi() {
    static const big pi = atan(big(1)) * 4;
    return pi;
}

// Dominant eigenpair of `it` (applied by power iteration), seeded by `seed`.
void power_iterate(const BigMat& it, BigVec& v, int iters) {
    for (int k = 0; k < iters; ++k) {
        v = matvec(it, v);
        big n = norm2(v);
        for (auto& x : v) x /= n;
    }
}

double lsq_slope(const std::vector<std::pair<double, double>>& xy) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : xy) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = double(xy.size());
    double den = sxx - sx * sx / n;
    return den == 0.0 ? 0.0 : (sxy - sx * sy / n) / den;
}

}  // namespace

LimitMapReport algebraic_limit(const AffineMap& f0, const AffineMap& g0, long n_max) {
    const ZMat& m = f0.derivative();
    SpectralSplit split = modulus_clusters(m);
    if (is_partially_hyperbolic(split) != Ternary::True ||
        is_semisimple_on_min(m, split) != Ternary::True)
        throw PreconditionFailed("base map lacks a certified semisimple contracting block");
    const int d = split.dim;
    const ZMat& g = g0.derivative();
    if (g.rows() != d) throw DimensionMismatch("generator dimension mismatch");

    LimitMapReport rep;
    rep.lambda_ratio = split.lambda(0) / split.lambda(1);

    if (split.min_multiplicity() == 1) {
        // Rank-one contracting block: the limit is reached along n_i = i and
        // everything reduces to one eigen-triple, refined in extended precision.
        BigMat mb = big_from(m);
        BigMat minvb = big_from(inverse(to_rational(m)));
        BigMat gb = big_from(g);
        BigVec v(d, big(0)), w(d, big(0));
        for (int i = 0; i < d; ++i) {
            v[i] = big(split.min_block_basis(i, 0));
            w[i] = big(split.min_block_basis(i, 0));
        }
        power_iterate(minvb, v, 260);
        BigMat minvt(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) minvt(i, j) = minvb(j, i);
        power_iterate(minvt, w, 260);
        big mu = dot(v, matvec(mb, v)) / dot(v, v);
        BigVec gv = matvec(gb, v);
        big a = dot(w, gv) / dot(w, v);

        rep.A = Eigen::MatrixXd::Constant(1, 1, double(a));
        BigVec y = gv;
        big mupow(1);
        std::vector<std::pair<double, double>> fitpts;
        for (long n = 1; n <= n_max; ++n) {
            y = matvec(minvb, y);
            mupow *= mu;
            big s(0);
            for (int i = 0; i < d; ++i) {
                big dev = mupow * y[i] - a * v[i];
                s += dev * dev;
            }
            double decay = double(sqrt(s));
            rep.subsequence.push_back(n);
            rep.decay_samples.emplace_back(n, decay);
            if (decay > 1e-60) fitpts.emplace_back(double(n), std::log(decay));
        }
        rep.fitted_rate = fitpts.size() >= 3 ? lsq_slope(fitpts) : 0.0;
    } else {
        // Higher-dimensional block: follow closest returns of the rotation
        // part in double precision at shallow depth.
        Eigen::MatrixXd md = to_double(m);
        Eigen::MatrixXd gd = to_double(g);
        Eigen::MatrixXd b = split.min_block_basis;
        double lambda1 = split.lambda(0);
        Eigen::MatrixXd omega = (b.transpose() * md * b) / lambda1;
        rep.A = b.transpose() * (split.projections[0] * (gd * b));
        rep.subsequence = closest_returns(omega, 64, 1e-9, 12);
        QMat minv = inverse(to_rational(m));
        std::vector<std::pair<double, double>> fitpts;
        for (long n : rep.subsequence) {
            Eigen::MatrixXd mn = to_double(power(m, n));
            QMat minv_n = QMat::identity(d);
            for (long k = 0; k < n; ++k) minv_n = minv_n * minv;
            Eigen::MatrixXd minvd(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) minvd(i, j) = minv_n(i, j).get_d();
            Eigen::MatrixXd opow = Eigen::MatrixXd::Identity(b.cols(), b.cols());
            for (long k = 0; k < n; ++k) opow = opow * omega;
            double decay =
                (minvd * gd * mn * b - b * opow.inverse() * rep.A * opow).norm();
            rep.decay_samples.emplace_back(n, decay);
            if (decay > 1e-10) fitpts.emplace_back(double(n), std::log(decay));
        }
        rep.fitted_rate = fitpts.size() >= 3 ? lsq_slope(fitpts) : 0.0;
    }

    Eigen::EigenSolver<Eigen::MatrixXd> es(rep.A);
    std::vector<double> mods;
    for (int i = 0; i < rep.A.rows(); ++i) mods.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(mods.begin(), mods.end());
    for (size_t i = 0; i < mods.size();) {
        size_t j = i;
        while (j + 1 < mods.size() && mods[j + 1] - mods[j] < 1e-9) ++j;
        rep.min_block_of_A.push_back({mods[i] - 1e-9, mods[j] + 1e-9, false});
        i = j + 1;
    }
    return rep;
}

std::string decay_csv(const LimitMapReport& report) {
    std::ostringstream os;
    os << "n,value\n";
    for (auto& [n, v] : report.decay_samples) os << n << "," << v << "\n";
    return os.str();
}

std::vector<long> closest_returns(const Eigen::MatrixXd& omega, int count, double tolerance,
                                  long n_limit) {
    const int d = int(omega.rows());
    if ((omega.transpose() * omega - Eigen::MatrixXd::Identity(d, d)).norm() > 1e-6)
        throw PreconditionFailed("closest_returns needs an orthogonal matrix");
    std::vector<long> out;
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d);
    double best = 2.0 * std::sqrt(double(d));  // sup of |Q - I|_F over orthogonal Q
    for (long n = 1; n <= n_limit && int(out.size()) < count; ++n) {
        p = p * omega;
        double v = (p - Eigen::MatrixXd::Identity(d, d)).norm();
        if (v < best || v <= tolerance) {
            out.push_back(n);
            best = std::min(best, v);
        }
    }
    return out;
}

namespace {

// Extended-precision evaluator for a trigonometric perturbation of an
// integer-affine torus map.
struct BigOrbit {
    int d;
    BigMat m, minv;
    BigVec t;
    big eps;
    const PerturbedMap* f;

    explicit BigOrbit(const PerturbedMap& fm)
        : d(fm.dim()),
          m(big_from(fm.base().derivative())),
          minv(big_from(riglab::inverse(to_rational(fm.base().derivative())))),
          t(d, big(0)),
          eps(fm.epsilon()),
          f(&fm) {
        for (int i = 0; i < d; ++i)
            t[i] = big(fm.base().translation()[i].get_num().get_str()) /
                   big(fm.base().translation()[i].get_den().get_str());
    }

    BigVec wrap(BigVec x) const {
        for (auto& c : x) c -= floor(c);
        return x;
    }

    BigVec perturb(const BigVec& x) const {
        BigVec p(d, big(0));
        for (const auto& mode : f->modes()) {
            big ph(0);
            for (int i = 0; i < d; ++i) ph += big(mode.freq[i]) * x[i];
            ph *= 2 * big_pi();
            big s = sin(ph), c = cos(ph);
            for (int i = 0; i < d; ++i) p[i] += s * big(mode.a[i]) + c * big(mode.b[i]);
        }
        return p;
    }

    BigVec eval(const BigVec& x) const {
        BigVec y = matvec(m, x);
        BigVec p = perturb(x);
        for (int i = 0; i < d; ++i) y[i] += t[i] + eps * p[i];
        return wrap(y);
    }

    BigVec inverse(const BigVec& y) const {
        BigVec x(d, big(0));
        {
            BigVec z = y;
            for (int i = 0; i < d; ++i) z[i] -= t[i];
            x = wrap(matvec(minv, z));
        }
        for (int it = 0; it < 300; ++it) {
            BigVec r = eval(x);
            big rn(0);
            for (int i = 0; i < d; ++i) {
                r[i] -= y[i];
                r[i] -= floor(r[i] + big(0.5));  // nearest-integer wrap
                rn += r[i] * r[i];
            }
            if (rn < big("1e-140")) return x;
            Eigen::VectorXd xd(d);
            for (int i = 0; i < d; ++i) xd[i] = double(x[i]);
            Eigen::MatrixXd jinv = f->derivative(xd).inverse();
            for (int i = 0; i < d; ++i) {
                big step(0);
                for (int j = 0; j < d; ++j) step += big(jinv(i, j)) * r[j];
                x[i] -= step;
                x[i] -= floor(x[i]);
            }
        }
        throw Diverged("extended-precision inverse iteration stalled");
    }
};

}  // namespace

RenormalizedReport renormalized_map_sequence(const PerturbedMap& f, const PerturbedMap& g,
                                             const LeafSegment& leaf, long n_max,
                                             std::vector<long> subsequence) {
    if (subsequence.empty())
        for (long n = 1; n <= n_max; ++n) subsequence.push_back(n);
    std::sort(subsequence.begin(), subsequence.end());

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(f.base_matrix());
    double kappa = svd.singularValues().maxCoeff() / svd.singularValues().minCoeff();
    for (long n : subsequence)
        if (-72.0 + 2.0 * n * std::log10(kappa) > std::log10(1e-4 * leaf.step))
            throw UnsafeDepth(n);

    BigOrbit fo(f), go(g);
    const int d = f.dim();
    const size_t k = leaf.nodes.size();
    SpectralSplit split = modulus_clusters(f.base().derivative());
    if (split.min_multiplicity() != 1 || !split.min_contracting)
        throw NotSupported("renormalized sequence needs a contracting line");

    // Re-anchor the polyline on the exact fast-stable leaf through the base
    // point: shoot tangential offsets from depth m — the backward pass
    // contracts transverse error, so the refined nodes share one leaf far
    // below roundoff. Central differences across raw double nodes would
    // otherwise amplify their transverse scatter by (lambda_2/lambda_1)^n.
    const double lambda1 = split.lambda(0);
    const int m = std::min(200, int(std::ceil(34.0 / -std::log10(lambda1))));
    BigVec anchor(d, big(0));
    for (int j = 0; j < d; ++j) anchor[j] = big(leaf.nodes[leaf.base_index][j]);
    anchor = fo.wrap(anchor);
    for (int j = 0; j < m; ++j) anchor = fo.eval(anchor);
    // fast-stable direction at the anchor via extended-precision pullback
    BigVec e_anchor(d, big(0));
    {
        std::vector<BigVec> orbit;
        BigVec pos = anchor;
        const int pull = 140;
        for (int j = 0; j < pull; ++j) {
            orbit.push_back(pos);
            pos = fo.eval(pos);
        }
        for (int j = 0; j < d; ++j) e_anchor[j] = big(split.min_block_basis(j, 0));
        for (int j = pull - 1; j >= 0; --j) {
            Eigen::VectorXd xd(d);
            for (int q = 0; q < d; ++q) xd[q] = double(orbit[j][q]);
            Eigen::MatrixXd jinv = f.derivative(xd).inverse();
            // one quasi-Newton-grade pullback step per orbit point
            BigVec nv(d, big(0));
            for (int r = 0; r < d; ++r)
                for (int q = 0; q < d; ++q) nv[r] += big(jinv(r, q)) * e_anchor[q];
            big nn = norm2(nv);
            for (int r = 0; r < d; ++r) e_anchor[r] = nv[r] / nn;
        }
    }
    big shrink = pow(big(lambda1), m);
    std::vector<BigVec> nodes(k), fwd(k);
    for (size_t i = 0; i < k; ++i) {
        big s = big(double(long(i) - leaf.base_index) * leaf.step);
        BigVec p = anchor;
        for (int j = 0; j < d; ++j) p[j] += s * shrink * e_anchor[j];
        p = fo.wrap(p);
        for (int j = 0; j < m; ++j) p = fo.inverse(p);
        nodes[i] = p;
        fwd[i] = p;
    }

    RenormalizedReport rep;
    long depth = 0;
    for (long n : subsequence) {
        for (; depth < n; ++depth)
            for (size_t i = 0; i < k; ++i) fwd[i] = fo.eval(fwd[i]);
        RenormalizedStep step;
        step.n = n;
        std::vector<BigVec> zs(k);
        for (size_t i = 0; i < k; ++i) {
            BigVec z = go.eval(fwd[i]);
            for (long j = 0; j < n; ++j) z = fo.inverse(z);
            zs[i] = z;
            Eigen::VectorXd img(d);
            for (int j = 0; j < d; ++j) img[j] = double(z[j]);
            step.images.push_back(img);
        }
        for (size_t i = 1; i + 1 < k; ++i) {
            big num2(0), den2(0);
            for (int j = 0; j < d; ++j) {
                big di = zs[i + 1][j] - zs[i - 1][j];
                di -= floor(di + big(0.5));
                num2 += di * di;
                big nd = nodes[i + 1][j] - nodes[i - 1][j];
                nd -= floor(nd + big(0.5));
                den2 += nd * nd;
            }
            step.tangential_derivative.push_back(double(sqrt(num2 / den2)));
        }
        step.sup_derivative =
            step.tangential_derivative.empty()
                ? 0.0
                : *std::max_element(step.tangential_derivative.begin(),
                                    step.tangential_derivative.end());
        // Sup-norm Cauchy distance of consecutive derivative profiles — the
        // renormalized maps converge along leaves modulo translation, so the
        // raw torus images wander while the derivative data settles.
        if (!rep.steps.empty()) {
            double sup = 0.0;
            const auto& prev = rep.steps.back().tangential_derivative;
            for (size_t i = 0; i < step.tangential_derivative.size(); ++i)
                sup = std::max(sup, std::abs(step.tangential_derivative[i] - prev[i]));
            rep.cauchy_distances.push_back(sup);
        }
        rep.steps.push_back(std::move(step));
    }
    return rep;
}

HolderReport holder_regress(const std::vector<std::pair<double, double>>& pairs) {
    std::vector<std::pair<double, double>> xy;
    for (auto& [dx, dpx] : pairs)
        if (dx > 0 && dpx > 0) xy.emplace_back(std::log(dx), std::log(dpx));
    if (xy.size() < 10) throw DegenerateSample("fewer than 10 usable pairs");
    const double n = double(xy.size());
    double sx = 0, sy = 0;
    for (auto& [x, y] : xy) {
        sx += x;
        sy += y;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (auto& [x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    HolderReport rep;
    rep.n_pairs = int(xy.size());
    rep.theta_est = sxy / sxx;
    double resid = 0;
    for (auto& [x, y] : xy) {
        double e = y - my - rep.theta_est * (x - mx);
        resid += e * e;
    }
    double se = std::sqrt(resid / std::max(1.0, n - 2.0) / sxx);
    rep.ci_low = rep.theta_est - 1.96 * se;
    rep.ci_high = rep.theta_est + 1.96 * se;
    rep.theta_inverse = syy == 0.0 ? 0.0 : sxy / syy;
    return rep;
}

std::vector<std::pair<double, double>> holder_sample_pairs(const ConjugacyField& phi,
                                                           int n_pairs, double scale_min,
                                                           double scale_max,
                                                           std::uint64_t seed) {
    const int d = phi.dim;
    if (scale_min <= 0) scale_min = 3.0 / phi.grid;
    if (scale_max <= 0) scale_max = 0.1;
    CounterRng rng(seed);
    std::vector<std::pair<double, double>> pairs;
    for (int s = 0; s < n_pairs; ++s) {
        Eigen::VectorXd x(d), dir(d);
        for (int i = 0; i < d; ++i) {
            x[i] = rng.next_double();
            dir[i] = rng.next_gaussian();
        }
        dir.normalize();
        double r = std::exp(std::log(scale_min) +
                            rng.next_double() * (std::log(scale_max) - std::log(scale_min)));
        Eigen::VectorXd y = x + r * dir;
        for (int i = 0; i < d; ++i) y[i] -= std::floor(y[i]);
        double dphi = torus_distance(phi.phi(x), phi.phi(y));
        pairs.emplace_back(torus_distance(x, y), dphi);
    }
    return pairs;
}

HolderReport holder_estimate(const ConjugacyField& phi, int n_pairs, double scale_min,
                             double scale_max, std::uint64_t seed) {
    if (scale_min <= 0) scale_min = 3.0 / phi.grid;
    if (scale_max <= 0) scale_max = 0.1;
    HolderReport rep =
        holder_regress(holder_sample_pairs(phi, n_pairs, scale_min, scale_max, seed));
    rep.scale_min = scale_min;
    rep.scale_max = scale_max;
    return rep;
}

std::string holder_csv(const std::vector<std::pair<double, double>>& pairs) {
    std::ostringstream os;
    os << "log_d,value\n";
    for (auto& [dx, dpx] : pairs)
        if (dx > 0 && dpx > 0) os << std::log(dx) << "," << std::log(dpx) << "\n";
    return os.str();
}

namespace {

double point_segment_dist(const Eigen::VectorXd& p, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b) {
    Eigen::VectorXd ab = b - a, ap = p - a;
    double t = ab.squaredNorm() == 0 ? 0.0 : ap.dot(ab) / ab.squaredNorm();
    t = std::clamp(t, 0.0, 1.0);
    return (ap - t * ab).norm();
}

double point_polyline_dist_mod1(const Eigen::VectorXd& p,
                                const std::vector<Eigen::VectorXd>& nodes) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        Eigen::VectorXd shift = p - nodes[i];
        for (int j = 0; j < p.size(); ++j) shift[j] = std::round(shift[j]);
        best = std::min(best,
                        point_segment_dist(p, nodes[i] + shift, nodes[i + 1] + shift));
    }
    return best;
}

}  // namespace

double leaf_invariance(const ConjugacyField& phi, const AffineMap& f0, const PerturbedMap& f,
                       const LeafSegment& segment) {
    if (!(f.base() == f0)) throw PreconditionFailed("segment base and map base disagree");
    DirectionField field = stable_direction_field(f, 64, 30);
    Eigen::VectorXd base = segment.base_point;
    for (int i = 0; i < base.size(); ++i) base[i] -= std::floor(base[i]);
    Eigen::VectorXd image_base = phi.phi(base);
    double half_len = 0.5 * segment.step * double(segment.nodes.size() - 1);
    LeafSegment target = leaf_segment(f, field, image_base, 1.6 * half_len + 0.05, segment.step);
    double worst = 0.0;
    for (const auto& node : segment.nodes) {
        Eigen::VectorXd x = node;
        for (int i = 0; i < x.size(); ++i) x[i] -= std::floor(x[i]);
        worst = std::max(worst, point_polyline_dist_mod1(phi.phi(x), target.nodes));
    }
    return worst;
}

namespace {

// sigma exponents of the cone scale: mu_i = (lambda_i + rho)/lambda_1,
// sigma_i = log mu_i / log mu_last.
std::vector<double> sigma_exponents(const SpectralSplit& split, double rho) {
    const int k = split.num_clusters();
    if (k < 2 || !split.bottom_gap)
        throw PreconditionFailed("cone scale needs a certified bottom gap");
    std::vector<double> sigma(k, 0.0);
    double l1 = split.lambda(0);
    double mu_last = (split.lambda(k - 1) + rho) / l1;
    for (int i = 1; i < k; ++i)
        sigma[i] = std::log((split.lambda(i) + rho) / l1) / std::log(mu_last);
    return sigma;
}

}  // namespace

double cone_norm_N(const Eigen::VectorXd& v, const ZMat& m, const SpectralSplit& split,
                   double rho) {
    AdaptedNorm an = adapted_norm(m, split, rho);
    std::vector<double> sigma = sigma_exponents(split, rho);
    double best = 0.0;
    for (int i = 1; i < split.num_clusters(); ++i)
        best = std::max(best, std::pow(an.block_norm(i, v), 1.0 / sigma[i]));
    return best;
}

bool cone_membership(const Eigen::VectorXd& v, double beta, double s, const ZMat& m,
                     const SpectralSplit& split, double rho) {
    AdaptedNorm an = adapted_norm(m, split, rho);
    return cone_norm_N(v, m, split, rho) <= beta * std::pow(an(v), s) + 1e-14;
}

ConeContractionReport cone_contraction_check(const ZMat& m, double rho, double beta, double s,
                                             double delta, int n_samples, std::uint64_t seed) {
    SpectralSplit split = modulus_clusters(m);
    AdaptedNorm an = adapted_norm(m, split, rho);
    std::vector<double> sigma = sigma_exponents(split, rho);
    const int d = split.dim;
    const int k = split.num_clusters();

    ConeContractionReport rep;
    rep.xi = std::max(1.0, 1.0 / (split.moduli[0].lo - rho));
    for (int i = 1; i < k; ++i) {
        double li = split.lambda(i);
        double ri = std::pow(li - rho, -1.0 / sigma[i]) * std::pow(li + rho, s);
        if (ri < 1.0) {
            rep.clusters.push_back(i);
            rep.rho_i.push_back(ri);
        }
    }
    if (rep.clusters.empty())
        throw InfeasibleS("no cluster contracts at the given cone exponent");

    Eigen::MatrixXd minv(d, d);
    {
        QMat q = inverse(to_rational(m));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) minv(i, j) = q(i, j).get_d();
    }

    CounterRng rng(seed);
    rep.worst_margin = std::numeric_limits<double>::infinity();
    rep.all_inside = true;
    for (int t = 0; t < n_samples; ++t) {
        int ci = rep.clusters[t % rep.clusters.size()];
        double ri = rep.rho_i[t % rep.clusters.size()];
        Eigen::VectorXd gi(d);
        for (int j = 0; j < d; ++j) gi[j] = rng.next_gaussian();
        Eigen::VectorXd low = Eigen::VectorXd::Zero(d);
        for (int j = 0; j < ci; ++j) {
            Eigen::VectorXd gj(d);
            for (int q = 0; q < d; ++q) gj[q] = rng.next_gaussian();
            low += split.projections[j] * gj;
        }
        Eigen::VectorXd vi = split.projections[ci] * gi;
        double r = delta * (0.1 + 0.9 * rng.next_double());
        double cap = std::pow(beta * std::pow(r, s), sigma[ci]);
        double bi = rng.next_double() * std::min(0.5 * r, cap);
        double alow = r - bi;
        double nlow = an(low), nvi = an.block_norm(ci, vi);
        if (nlow < 1e-14 || nvi < 1e-14) continue;
        Eigen::VectorXd v = (alow / nlow) * low + (bi / nvi) * vi;

        Eigen::VectorXd w = minv * v;
        double nw = an(w);
        double margin = ri * beta * std::pow(nw, s) - std::pow(an.block_norm(ci, w), 1.0 / sigma[ci]);
        rep.worst_margin = std::min(rep.worst_margin, margin);
        bool inside = margin >= -1e-12 && nw <= rep.xi * r + 1e-12;
        for (int j = ci + 1; j < k; ++j)
            if (an.block_norm(j, w) > 1e-8 * std::max(1.0, nw)) inside = false;
        if (!inside) rep.all_inside = false;
        ++rep.samples;
    }
    return rep;
}

double default_growth_nu(const SpectralSplit& split, double rho) {
    return std::sqrt((split.lambda(1) - rho) / (split.lambda(0) + rho));
}

bool linear_cone_growth_check(const QMat& a, const std::vector<QMat>& bs, double nu,
                              const Eigen::VectorXd& v, long n_max) {
    const int d = a.rows();
    if (nu <= 0) throw PreconditionFailed("growth threshold must be positive");
    QMat ainv = inverse(a);
    std::vector<Rat> vr(d);
    for (int i = 0; i < d; ++i) vr[i] = Rat(v[i]);

    auto rat_norm = [](const std::vector<Rat>& x) {
        double s = 0;
        for (const auto& c : x) {
            double cd = c.get_d();
            s += cd * cd;
        }
        return std::sqrt(s);
    };

    std::vector<Rat> an_v = vr;              // a^n v
    QMat ainv_n = QMat::identity(d);         // a^-n
    std::vector<double> vals;
    for (long n = 0; n <= n_max; ++n) {
        double val = 0;
        for (const auto& b : bs) val = std::max(val, rat_norm(ainv_n * (b * an_v)));
        vals.push_back(val);
        an_v = a * an_v;
        ainv_n = ainv_n * ainv;
    }
    double c = 0;
    for (long n = 0; n <= std::min<long>(2, n_max); ++n)
        c = std::max(c, vals[n] / std::pow(nu, double(n)));
    for (long n = 0; n <= n_max; ++n)
        if (!(vals[n] <= 4.0 * c * std::pow(nu, double(n)) + 1e-300)) return false;
    return true;
}

}  // namespace riglab
