#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "riglab/actions.hpp"
#include "riglab/spectral.hpp"

namespace riglab {

struct NotHyperbolic : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Diverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MarginExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotSupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonContraction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One trigonometric mode of a perturbation:
/// a*sin(2 pi m.x) + b*cos(2 pi m.x).
struct TrigMode {
    Eigen::VectorXi freq;
    Eigen::VectorXd a, b;
};

/// F(x) = base(x) + epsilon * p(x) mod 1 with a finite trigonometric
/// perturbation p. Construction verifies the sufficient diffeomorphism
/// condition epsilon*sup|Dp| < sigma_min(base derivative).
class PerturbedMap {
  public:
    PerturbedMap(AffineMap base, double epsilon, std::vector<TrigMode> modes);

    const AffineMap& base() const { return base_; }
    double epsilon() const { return eps_; }
    const std::vector<TrigMode>& modes() const { return modes_; }
    int dim() const { return base_.dim(); }
    const Eigen::MatrixXd& base_matrix() const { return M_; }
    const Eigen::MatrixXd& base_matrix_inverse() const { return Minv_; }

    Eigen::VectorXd perturbation(const Eigen::VectorXd& x) const;           // p(x)
    Eigen::MatrixXd perturbation_jacobian(const Eigen::VectorXd& x) const;  // Dp(x)

    Eigen::VectorXd eval(const Eigen::VectorXd& x) const;  // F(x) mod 1
    Eigen::VectorXd eval_nowrap(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd derivative(const Eigen::VectorXd& x) const;  // M + eps Dp(x)

    /// Newton solve of F(x) = y on the torus.
    Eigen::VectorXd inverse_eval(const Eigen::VectorXd& y) const;

    /// Upper bound for eps*sup|Dp|.
    double dp_sup_bound() const;

  private:
    AffineMap base_;
    double eps_;
    std::vector<TrigMode> modes_;
    Eigen::MatrixXd M_, Minv_;
    Eigen::VectorXd t_;
};

/// Upper bound for sup|F - base| + sup|DF - Dbase|.
double c1_distance(const PerturbedMap& f);

/// Closeness margin required of perturbations of a hyperbolic base:
/// 0.1 * (1 - lambda_1) * min(1, lambda_2 - lambda_1).
double c1_margin(const SpectralSplit& split);

/// Grid-sampled displacement u with Phi = id + u solving Phi.f0 = F.Phi.
struct ConjugacyField {
    int dim = 0;
    int grid = 0;              // nodes per axis
    double epsilon = 0.0;
    ZMat base_matrix;
    std::vector<double> u;     // grid^dim * dim values, row-major nodes
    double residual = 0.0;     // from an independent post-hoc sample
    double residual_mean = 0.0;
    double residual_p99 = 0.0;
    long iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;

    Eigen::VectorXd u_at(const Eigen::VectorXd& x) const;  // periodic multilinear
    Eigen::VectorXd phi(const Eigen::VectorXd& x) const;   // x + u(x) mod 1
    double sup_u() const;
};

ConjugacyField solve_conjugacy(const AffineMap& f0, const PerturbedMap& f, int grid_size,
                               double tol, long max_iter, std::uint64_t seed = 1);

struct ResidualStats {
    double max = 0.0, mean = 0.0, p99 = 0.0;
};

/// Independent fresh-sample residual of Phi(f0 x) vs F(Phi x).
ResidualStats verify_conjugacy(const ConjugacyField& phi, const AffineMap& f0,
                               const PerturbedMap& f, int n_samples, std::uint64_t seed);

/// Bit-exact field file ("RGLB" v1). Callers add the JSON sidecar.
void write_field(const ConjugacyField& field, const std::string& path);
ConjugacyField read_field(const std::string& path);

/// Unit direction field approximating the fast-stable line of F at grid
/// nodes; orientation continuous in raster order.
struct DirectionField {
    int dim = 0;
    int grid = 0;
    std::vector<double> dirs;  // grid^dim * dim

    Eigen::VectorXd at(const Eigen::VectorXd& x) const;  // interpolated, normalized
};

DirectionField stable_direction_field(const PerturbedMap& f, int grid_size, int power_iters);

/// Arclength-parameterized polyline along the fast-stable direction field.
/// Nodes are stored unwrapped (continuous lift); base point at base_index.
struct LeafSegment {
    Eigen::VectorXd base_point;
    std::vector<Eigen::VectorXd> nodes;
    double step = 0.0;
    int base_index = 0;
};

LeafSegment leaf_segment(const PerturbedMap& f, const DirectionField& field,
                         const Eigen::VectorXd& x0, double arclength, double step);

/// Componentwise distance on the torus.
double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace riglab
