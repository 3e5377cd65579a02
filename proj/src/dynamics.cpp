#include "riglab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "riglab/common.hpp"

namespace riglab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap01(double x) { return x - std::floor(x); }

Eigen::VectorXd wrap01(Eigen::VectorXd x) {
    for (int i = 0; i < x.size(); ++i) x[i] = wrap01(x[i]);
    return x;
}

long total_nodes(int grid, int dim) {
    long n = 1;
    for (int i = 0; i < dim; ++i) n *= grid;
    return n;
}

// Periodic multilinear interpolation of a grid^dim x dim node array.
Eigen::VectorXd interp_grid(const std::vector<double>& data, int grid, int dim,
                            const Eigen::VectorXd& x) {
    std::vector<int> lo(dim);
    std::vector<double> frac(dim);
    for (int i = 0; i < dim; ++i) {
        double s = wrap01(x[i]) * grid;
        lo[i] = static_cast<int>(std::floor(s)) % grid;
        frac[i] = s - std::floor(s);
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
    const int corners = 1 << dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        long idx = 0;
        for (int i = 0; i < dim; ++i) {
            int bit = (c >> i) & 1;
            w *= bit ? frac[i] : 1.0 - frac[i];
            idx = idx * grid + (lo[i] + bit) % grid;
        }
        if (w == 0.0) continue;
        for (int k = 0; k < dim; ++k) out[k] += w * data[idx * dim + k];
    }
    return out;
}

}  // namespace

double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        d -= std::round(d);
        s += d * d;
    }
    return std::sqrt(s);
}

PerturbedMap::PerturbedMap(AffineMap base, double epsilon, std::vector<TrigMode> modes)
    : base_(std::move(base)), eps_(epsilon), modes_(std::move(modes)) {
    const int d = base_.dim();
    M_ = to_double(base_.derivative());
    Minv_ = M_.inverse();
    t_.resize(d);
    for (int i = 0; i < d; ++i) t_[i] = base_.translation()[i].get_d();
    for (const auto& m : modes_) {
        if (m.freq.size() != d || m.a.size() != d || m.b.size() != d)
            throw DimensionMismatch("trig mode dimension mismatch");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M_);
    double sigma_min = svd.singularValues().minCoeff();
    if (dp_sup_bound() >= sigma_min)
        throw MarginExceeded("perturbation too large for a diffeomorphism");
}

double PerturbedMap::dp_sup_bound() const {
    double s = 0.0;
    for (const auto& m : modes_)
        s += kTwoPi * m.freq.cast<double>().norm() * (m.a.norm() + m.b.norm());
    return std::abs(eps_) * s;
}

Eigen::VectorXd PerturbedMap::perturbation(const Eigen::VectorXd& x) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim());
    for (const auto& m : modes_) {
        double ph = kTwoPi * m.freq.cast<double>().dot(x);
        p += std::sin(ph) * m.a + std::cos(ph) * m.b;
    }
    return p;
}

Eigen::MatrixXd PerturbedMap::perturbation_jacobian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim(), dim());
    for (const auto& m : modes_) {
        double ph = kTwoPi * m.freq.cast<double>().dot(x);
        Eigen::VectorXd grad = kTwoPi * m.freq.cast<double>();
        j += (std::cos(ph) * m.a - std::sin(ph) * m.b) * grad.transpose();
    }
    return j;
}

Eigen::VectorXd PerturbedMap::eval_nowrap(const Eigen::VectorXd& x) const {
    return M_ * x + t_ + eps_ * perturbation(x);
}

Eigen::VectorXd PerturbedMap::eval(const Eigen::VectorXd& x) const {
    return wrap01(eval_nowrap(x));
}

Eigen::MatrixXd PerturbedMap::derivative(const Eigen::VectorXd& x) const {
    return M_ + eps_ * perturbation_jacobian(x);
}

Eigen::VectorXd PerturbedMap::inverse_eval(const Eigen::VectorXd& y) const {
    Eigen::VectorXd x = wrap01(Eigen::VectorXd(Minv_ * (y - t_)));
    for (int it = 0; it < 80; ++it) {
        Eigen::VectorXd r = eval(x) - y;
        for (int i = 0; i < r.size(); ++i) r[i] -= std::round(r[i]);
        if (r.norm() < 1e-14) return x;
        x = wrap01(Eigen::VectorXd(x - derivative(x).partialPivLu().solve(r)));
    }
    throw Diverged("inverse_eval: Newton iteration did not converge");
}

double c1_distance(const PerturbedMap& f) {
    double s = 0.0;
    for (const auto& m : f.modes())
        s += (kTwoPi * m.freq.cast<double>().norm() + 1.0) * (m.a.norm() + m.b.norm());
    return std::abs(f.epsilon()) * s;
}

double c1_margin(const SpectralSplit& split) {
    double lambda1 = split.moduli.front().hi;
    double lambda2 = split.moduli.size() > 1 ? split.moduli[1].lo : 1.0;
    if (lambda1 >= 1.0) return 0.0;
    return 0.1 * (1.0 - lambda1) * std::min(1.0, lambda2 - lambda1);
}

Eigen::VectorXd ConjugacyField::u_at(const Eigen::VectorXd& x) const {
    return interp_grid(u, grid, dim, x);
}

Eigen::VectorXd ConjugacyField::phi(const Eigen::VectorXd& x) const {
    return wrap01(Eigen::VectorXd(x + u_at(x)));
}

double ConjugacyField::sup_u() const {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

ResidualStats verify_conjugacy(const ConjugacyField& phi, const AffineMap& f0,
                               const PerturbedMap& f, int n_samples, std::uint64_t seed) {
    CounterRng rng(seed);
    const int d = phi.dim;
    Eigen::MatrixXd M = to_double(f0.derivative());
    Eigen::VectorXd t(d);
    for (int i = 0; i < d; ++i) t[i] = f0.translation()[i].get_d();
    std::vector<double> res(n_samples);
    double sum = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) x[i] = rng.next_double();
        Eigen::VectorXd lhs = phi.phi(wrap01(Eigen::VectorXd(M * x + t)));
        Eigen::VectorXd rhs = f.eval(phi.phi(x));
        res[s] = torus_distance(lhs, rhs);
        sum += res[s];
    }
    std::sort(res.begin(), res.end());
    ResidualStats out;
    out.max = res.back();
    out.mean = sum / n_samples;
    out.p99 = res[std::min<std::size_t>(res.size() - 1,
                                        static_cast<std::size_t>(0.99 * res.size()))];
    return out;
}

ConjugacyField solve_conjugacy(const AffineMap& f0, const PerturbedMap& f, int grid_size,
                               double tol, long max_iter, std::uint64_t seed) {
    const int d = f0.dim();
    if (!(f.base() == f0))
        throw PreconditionFailed("perturbed map is not built over the given base");
    SpectralSplit split = modulus_clusters(f0.derivative());
    for (const auto& c : split.moduli)
        if (c.contains_one()) throw NotHyperbolic("base map has spectrum on the unit circle");
    // Only the derivative part threatens the contraction; a large constant
    // translation is harmless (closed-form displacement).
    if (f.dp_sup_bound() >= c1_margin(split))
        throw MarginExceeded("perturbation exceeds the hyperbolicity margin");

    Eigen::MatrixXd M = to_double(f0.derivative());
    Eigen::MatrixXd Minv = M.inverse();
    Eigen::VectorXd t(d);
    for (int i = 0; i < d; ++i) t[i] = f0.translation()[i].get_d();

    // Stable/unstable spectral projectors of the base derivative.
    Eigen::MatrixXd Ps = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < split.num_clusters(); ++i)
        if (split.moduli[i].hi < 1.0) Ps += split.projections[i];
    Eigen::MatrixXd Pu = Eigen::MatrixXd::Identity(d, d) - Ps;

    ConjugacyField out;
    out.dim = d;
    out.grid = grid_size;
    out.epsilon = f.epsilon();
    out.base_matrix = f0.derivative();
    out.seed = seed;
    const long n = total_nodes(grid_size, d);
    out.u.assign(n * d, 0.0);
    std::vector<double> next(n * d, 0.0);

    std::vector<Eigen::VectorXd> node(n);
    for (long idx = 0; idx < n; ++idx) {
        Eigen::VectorXd x(d);
        long r = idx;
        for (int i = d - 1; i >= 0; --i) {
            x[i] = static_cast<double>(r % grid_size) / grid_size;
            r /= grid_size;
        }
        node[idx] = x;
    }

    double prev_change = std::numeric_limits<double>::infinity();
    int stalled = 0;
    const double eps = f.epsilon();
    for (long it = 1; it <= max_iter; ++it) {
        double change = 0.0;
        for (long idx = 0; idx < n; ++idx) {
            const Eigen::VectorXd& x = node[idx];
            Eigen::VectorXd ux(d);
            for (int k = 0; k < d; ++k) ux[k] = out.u[idx * d + k];

            Eigen::VectorXd y = Minv * (x - t);
            Eigen::VectorXd uy = interp_grid(out.u, grid_size, d, y);
            Eigen::VectorXd stable = Ps * (M * uy + eps * f.perturbation(y + uy));

            Eigen::VectorXd z = M * x + t;
            Eigen::VectorXd uz = interp_grid(out.u, grid_size, d, z);
            Eigen::VectorXd unstable = Pu * (Minv * (uz - eps * f.perturbation(x + ux)));

            Eigen::VectorXd unew = stable + unstable;
            for (int k = 0; k < d; ++k) {
                change = std::max(change, std::abs(unew[k] - ux[k]));
                next[idx * d + k] = unew[k];
            }
        }
        out.u.swap(next);
        out.iterations = it;
        if (change < tol) {
            out.converged = true;
            break;
        }
        stalled = change >= prev_change ? stalled + 1 : 0;
        if (stalled >= 25) throw Diverged("conjugacy iteration stopped contracting");
        prev_change = change;
    }
    if (out.sup_u() >= 0.5) throw MarginExceeded("displacement reached 1/2; conjugacy invalid");

    ResidualStats stats = verify_conjugacy(out, f0, f, 10000, seed);
    out.residual = stats.max;
    out.residual_mean = stats.mean;
    out.residual_p99 = stats.p99;
    return out;
}

namespace {

template <typename T>
void put_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_raw(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void write_field(const ConjugacyField& field, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.write("RGLB", 4);
    put_raw<std::uint32_t>(os, 1);
    put_raw<std::uint32_t>(os, static_cast<std::uint32_t>(field.dim));
    put_raw<std::uint32_t>(os, static_cast<std::uint32_t>(field.grid));
    put_raw<double>(os, field.epsilon);
    for (int i = 0; i < field.dim; ++i)
        for (int j = 0; j < field.dim; ++j)
            put_raw<std::int64_t>(os, field.base_matrix(i, j).get_si());
    for (double v : field.u) put_raw<double>(os, v);
    if (!os) throw std::runtime_error("write failed: " + path);
}

ConjugacyField read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RGLB", 4) != 0)
        throw std::runtime_error("bad magic in " + path);
    if (get_raw<std::uint32_t>(is) != 1) throw std::runtime_error("unsupported version");
    ConjugacyField f;
    f.dim = static_cast<int>(get_raw<std::uint32_t>(is));
    f.grid = static_cast<int>(get_raw<std::uint32_t>(is));
    f.epsilon = get_raw<double>(is);
    f.base_matrix = ZMat(f.dim, f.dim);
    for (int i = 0; i < f.dim; ++i)
        for (int j = 0; j < f.dim; ++j)
            f.base_matrix(i, j) = Int(static_cast<long>(get_raw<std::int64_t>(is)));
    long n = total_nodes(f.grid, f.dim) * f.dim;
    f.u.resize(n);
    for (long i = 0; i < n; ++i) f.u[i] = get_raw<double>(is);
    if (!is) throw std::runtime_error("truncated field file: " + path);
    return f;
}

Eigen::VectorXd DirectionField::at(const Eigen::VectorXd& x) const {
    Eigen::VectorXd v = interp_grid(dirs, grid, dim, x);
    double nrm = v.norm();
    if (nrm < 1e-12) throw NonContraction("direction field degenerate at sample point");
    return v / nrm;
}

DirectionField stable_direction_field(const PerturbedMap& f, int grid_size, int power_iters) {
    const int d = f.dim();
    SpectralSplit split = modulus_clusters(f.base().derivative());
    if (!split.min_contracting || split.multiplicities.front() != 1)
        throw NotSupported("fast-stable space is not a contracting line");
    Eigen::VectorXd seed = split.min_block_basis.col(0);
    seed.normalize();

    DirectionField field;
    field.dim = d;
    field.grid = grid_size;
    const long n = total_nodes(grid_size, d);
    field.dirs.assign(n * d, 0.0);

    std::vector<Eigen::MatrixXd> lus;  // DF along the forward orbit
    for (long idx = 0; idx < n; ++idx) {
        Eigen::VectorXd x(d);
        long r = idx;
        for (int i = d - 1; i >= 0; --i) {
            x[i] = static_cast<double>(r % grid_size) / grid_size;
            r /= grid_size;
        }
        lus.clear();
        Eigen::VectorXd pos = x;
        for (int j = 0; j < power_iters; ++j) {
            lus.push_back(f.derivative(pos));
            pos = f.eval(pos);
        }
        // two pullback depths ending at the same point; agreement certifies
        // convergence onto the fast-stable line
        Eigen::VectorXd v = seed, v_short = seed;
        for (int j = power_iters - 1; j >= 0; --j) {
            v = lus[j].partialPivLu().solve(v);
            v.normalize();
            if (j == power_iters - 1) continue;
            v_short = lus[j].partialPivLu().solve(v_short);
            v_short.normalize();
        }
        if (std::abs(std::abs(v_short.dot(v)) - 1.0) > 1e-10)
            throw NonContraction("pullback iteration did not settle on a line");
        // orientation: follow the previous raster node, else the seed.
        Eigen::VectorXd ref = seed;
        if (idx > 0) {
            ref.resize(d);
            for (int k = 0; k < d; ++k) ref[k] = field.dirs[(idx - 1) * d + k];
        }
        if (ref.dot(v) < 0) v = -v;
        for (int k = 0; k < d; ++k) field.dirs[idx * d + k] = v[k];
    }
    return field;
}

LeafSegment leaf_segment(const PerturbedMap& f, const DirectionField& field,
                         const Eigen::VectorXd& x0, double arclength, double step) {
    (void)f;
    auto dir_aligned = [&](const Eigen::VectorXd& pos, const Eigen::VectorXd& ref) {
        Eigen::VectorXd v = field.at(pos);
        return ref.dot(v) < 0 ? Eigen::VectorXd(-v) : v;
    };
    auto trace = [&](double sgn) {
        std::vector<Eigen::VectorXd> out;
        Eigen::VectorXd pos = x0;
        Eigen::VectorXd heading = sgn * field.at(x0);
        long steps = std::lround(arclength / step);
        for (long i = 0; i < steps; ++i) {
            Eigen::VectorXd k1 = dir_aligned(pos, heading);
            Eigen::VectorXd k2 = dir_aligned(pos + 0.5 * step * k1, k1);
            Eigen::VectorXd k3 = dir_aligned(pos + 0.5 * step * k2, k2);
            Eigen::VectorXd k4 = dir_aligned(pos + step * k3, k3);
            pos += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            heading = k1;
            out.push_back(pos);
        }
        return out;
    };
    std::vector<Eigen::VectorXd> back = trace(-1.0), fwd = trace(1.0);
    LeafSegment seg;
    seg.base_point = x0;
    seg.step = step;
    seg.nodes.assign(back.rbegin(), back.rend());
    seg.base_index = static_cast<int>(seg.nodes.size());
    seg.nodes.push_back(x0);
    seg.nodes.insert(seg.nodes.end(), fwd.begin(), fwd.end());
    return seg;
}

}  // namespace riglab
