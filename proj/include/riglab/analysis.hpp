#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "riglab/actions.hpp"
#include "riglab/dynamics.hpp"
#include "riglab/spectral.hpp"

namespace riglab {

struct UnsafeDepth : std::runtime_error {
    long n;
    explicit UnsafeDepth(long depth)
        : std::runtime_error("composition depth " + std::to_string(depth) +
                             " exceeds the float-error budget"),
          n(depth) {}
};
struct DegenerateSample : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleS : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Limit behavior of the renormalized derivatives D(f0^-n g0 f0^n) on the
/// contracting line/block.
struct LimitMapReport {
    Eigen::MatrixXd A;                                  // in the min-block basis
    std::vector<long> subsequence;
    std::vector<std::pair<long, double>> decay_samples; // (n, deviation norm)
    double fitted_rate = 0.0;                           // slope of log-decay vs n
    double lambda_ratio = 0.0;                          // lambda_1 / lambda_next
    std::vector<ClusterInterval> min_block_of_A;
};

LimitMapReport algebraic_limit(const AffineMap& f0, const AffineMap& g0, long n_max);

std::string decay_csv(const LimitMapReport& report);

/// Greedy closest-return indices of an orthogonal matrix: each selected n
/// improves the record of |omega^n - I|, or lands below tolerance.
std::vector<long> closest_returns(const Eigen::MatrixXd& omega, int count,
                                  double tolerance = 1e-9, long n_limit = 1000000);

struct RenormalizedStep {
    long n = 0;
    std::vector<Eigen::VectorXd> images;        // leaf nodes under F^-n G F^n
    std::vector<double> tangential_derivative;  // central differences at inner nodes
    double sup_derivative = 0.0;
};

struct RenormalizedReport {
    std::vector<RenormalizedStep> steps;
    std::vector<double> cauchy_distances;  // sup distance of consecutive steps
};

/// Samples F^-n G F^n along a leaf for each n in the subsequence (1..n_max if
/// empty). Orbits run in extended precision; UnsafeDepth guards depths whose
/// amplified roundoff could exceed 1e-4.
RenormalizedReport renormalized_map_sequence(const PerturbedMap& f, const PerturbedMap& g,
                                             const LeafSegment& leaf, long n_max,
                                             std::vector<long> subsequence = {});

struct HolderReport {
    double theta_est = 0.0;
    double ci_low = 0.0, ci_high = 0.0;
    double theta_inverse = 0.0;
    int n_pairs = 0;
    double scale_min = 0.0, scale_max = 0.0;
};

/// Log-log regression on precomputed (d(x,y), d(px,py)) pairs.
HolderReport holder_regress(const std::vector<std::pair<double, double>>& pairs);

/// Separation pairs (d(x,y), d(Phi x, Phi y)) at log-uniform scales.
std::vector<std::pair<double, double>> holder_sample_pairs(const ConjugacyField& phi,
                                                           int n_pairs, double scale_min,
                                                           double scale_max,
                                                           std::uint64_t seed);

/// Holder exponent of the displacement field's conjugacy, sampled at pair
/// separations log-uniform in [scale_min, scale_max] (defaults 3/grid, 0.1).
HolderReport holder_estimate(const ConjugacyField& phi, int n_pairs, double scale_min,
                             double scale_max, std::uint64_t seed);

std::string holder_csv(const std::vector<std::pair<double, double>>& pairs);

/// Max distance (mod 1) from Phi-images of the affine-leaf nodes to the
/// perturbed map's own fast-stable leaf through Phi(base point).
double leaf_invariance(const ConjugacyField& phi, const AffineMap& f0, const PerturbedMap& f,
                       const LeafSegment& segment);

/// N(v) = max_{i>1} |P_i v|^(1/sigma_i) in the adapted norm, with
/// mu_i = (lambda_i + rho)/lambda_1 and sigma_i = log mu_i / log mu_last.
double cone_norm_N(const Eigen::VectorXd& v, const ZMat& m, const SpectralSplit& split,
                   double rho);

/// v lies in the cone C(beta, s): N(v) <= beta * |v|^s (adapted norm).
bool cone_membership(const Eigen::VectorXd& v, double beta, double s, const ZMat& m,
                     const SpectralSplit& split, double rho);

struct ConeContractionReport {
    double xi = 0.0;
    std::vector<int> clusters;       // checked cluster indices
    std::vector<double> rho_i;       // contraction factor per checked cluster
    int samples = 0;
    double worst_margin = 0.0;       // min of rho_i*beta*|w|^s - |P_i w|^(1/sigma_i)
    bool all_inside = false;
};

/// Verifies M^-1(C^i_delta(beta, s)) inside C^i_{xi delta}(rho_i beta, s) on
/// random cone samples, for every contracting cluster i > 0 with rho_i < 1.
ConeContractionReport cone_contraction_check(const ZMat& m, double rho, double beta, double s,
                                             double delta, int n_samples, std::uint64_t seed);

/// Default growth threshold: geometric mean of 1 and (lambda_2-rho)/(lambda_1+rho).
double default_growth_nu(const SpectralSplit& split, double rho = 0.0);

/// True iff max_k |A^-n B_k A^n v| stays below a fitted multiple of nu^n for
/// n <= n_max; detects escape from the slow space W^min_A. Exact arithmetic.
bool linear_cone_growth_check(const QMat& a, const std::vector<QMat>& bs, double nu,
                              const Eigen::VectorXd& v, long n_max);

}  // namespace riglab
