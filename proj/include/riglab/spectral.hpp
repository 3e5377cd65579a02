#pragma once

#include <Eigen/Dense>
#include <vector>

#include "riglab/common.hpp"
#include "riglab/exact.hpp"
#include "riglab/polynomial.hpp"

namespace riglab {

/// Certified interval for one eigenvalue-modulus cluster. `exact_one` marks
/// clusters whose members are provably roots of unity (modulus exactly 1).
struct ClusterInterval {
    double lo = 0.0, hi = 0.0;
    bool exact_one = false;

    bool contains_one() const { return exact_one || (lo <= 1.0 && 1.0 <= hi); }
};

/// Eigenvalue-modulus clustering of an integer matrix with spectral
/// projections. Projections are computed in extended precision with a
/// posteriori residual bounds; moduli are certified from exact root isolation
/// on the characteristic polynomial.
struct SpectralSplit {
    int dim = 0;
    std::vector<ClusterInterval> moduli;          // ascending, certified disjoint
    std::vector<int> multiplicities;              // algebraic, sums to dim
    std::vector<Eigen::MatrixXd> projections;     // P_i, resolution of identity
    Eigen::MatrixXd min_block_basis;              // dim x m_1 orthonormal basis of W^min
    Ternary semisimple_min = Ternary::Undecided;  // Df semisimple on W^min
    bool min_contracting = false;                 // certified lambda_1 < 1
    bool bottom_gap = false;                      // certified lambda_1 < lambda_2
    bool has_unit_cluster = false;                // some cluster may contain modulus 1
    double residual = 0.0;                        // max projection invariant residual
    // Cluster index of each irreducible factor root set (factor -> clusters hit).
    std::vector<std::pair<ZPoly, std::vector<int>>> factor_clusters;

    int num_clusters() const { return int(moduli.size()); }
    double lambda(int i) const { return 0.5 * (moduli[i].lo + moduli[i].hi); }
    int min_multiplicity() const { return multiplicities.empty() ? 0 : multiplicities[0]; }
};

/// Cluster the eigenvalue moduli of M with certified pairwise-disjoint
/// intervals and compute spectral projections. Throws UndecidablePrecision
/// when two distinct clusters cannot be separated by target_gap at maximum
/// working precision and are not provably equal.
SpectralSplit modulus_clusters(const ZMat& m, double target_gap = 1e-12);

/// Certified lambda_1 < 1 and lambda_1 < lambda_2.
Ternary is_partially_hyperbolic(const SpectralSplit& split);

/// Exact: every irreducible factor with a root in the minimal
/// cluster appears with multiplicity 1 in the minimal polynomial.
Ternary is_semisimple_on_min(const ZMat& m, const SpectralSplit& split);

const Eigen::MatrixXd& spectral_projection(const SpectralSplit& split, int i);

/// All eigenvalues real with pairwise distinct absolute values (certified).
Ternary is_r_regular(const ZMat& m);

/// Block norm adapted to the spectral splitting: on each cluster block,
/// (lambda_i - rho)|v| <= |Av| <= (lambda_i + rho)|v|, and the norm of a sum
/// over distinct blocks is the sum of block norms.
struct AdaptedNorm {
    int dim = 0;
    double rho = 0.0;
    std::vector<double> lambda;                // per-cluster representative modulus
    std::vector<Eigen::MatrixXcd> coord_maps;  // C_i with block seminorm |C_i v|_2
    std::vector<Eigen::MatrixXd> projections;

    /// Seminorm of the block-i component of v.
    double block_norm(int i, const Eigen::VectorXd& v) const {
        return (coord_maps[i] * (projections[i] * v)).norm();
    }
    /// Full adapted norm: sum of block seminorms.
    double operator()(const Eigen::VectorXd& v) const {
        double s = 0.0;
        for (size_t i = 0; i < coord_maps.size(); ++i) s += block_norm(int(i), v);
        return s;
    }
};

/// Throws RhoTooLarge when rho violates the cluster-gap conditions
/// (rho must stay below half the smallest certified gap).
AdaptedNorm adapted_norm(const ZMat& m, const SpectralSplit& split, double rho);

}  // namespace riglab
