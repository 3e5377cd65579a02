#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "riglab/actions.hpp"
#include "riglab/spectral.hpp"

namespace riglab {

/// All levels l >= 1 with phi(l) <= d^2, ascending.
std::vector<long> totient_levels(int d);

struct MixingDetail {
    bool mixing = false;
    std::vector<std::pair<long, Int>> level_dets;  // (l, det(A1^-l A2^l - I)), exact
};

/// Mixing criterion for a pair of toral affine derivatives: every level
/// determinant nonzero, in exact integer arithmetic.
MixingDetail is_mixing_pair(const ZMat& a1, const ZMat& a2);

struct EssentialSetReport {
    bool essential = false;
    double eta = 0.0;  // smallest singular value of the stacked P1*Dg_k
    std::optional<Eigen::VectorXd> witness_kernel_vector;  // present iff not essential
};

EssentialSetReport is_essential(const Eigen::MatrixXd& p1, const std::vector<ZMat>& dgs);

/// Per-condition verdicts for the four good-pair conditions, with witnesses.
struct GoodPairCertificate {
    Ternary cond_partially_hyperbolic = Ternary::Undecided;
    ClusterInterval lambda1, lambda2;  // lambda2 meaningful only with >= 2 clusters
    Ternary cond_semisimple_min = Ternary::Undecided;
    Ternary cond_pmin_dg_nondegenerate = Ternary::Undecided;
    double restricted_det = 0.0;  // det of P^min Dg restricted to W^min
    Ternary cond_density_via_mixing = Ternary::Undecided;
    MixingDetail mixing;
    Ternary overall = Ternary::Undecided;
    bool min_block_is_line = false;  // dim W^min == 1 (no subsequence caveat)
    std::string conjugation_note;
};

GoodPairCertificate check_good_pair(const AffineMap& f, const AffineMap& g);

nlohmann::json certificate_to_json(const GoodPairCertificate& cert);

struct GoodPairSearchResult {
    Word f_word, g_word;
    GoodPairCertificate certificate;
};

/// Breadth-first search over freely reduced words (length, then
/// lexicographic); returns the first overall-true pair, or nothing when the
/// length bound is exhausted.
std::optional<GoodPairSearchResult> search_good_pair(const std::vector<AffineMap>& generators,
                                                     int max_word_len);

/// Weak hyperbolicity of a finite set of derivatives: certified stable
/// subspaces jointly span R^d.
Ternary is_weakly_hyperbolic(const std::vector<ZMat>& dfs);

}  // namespace riglab
