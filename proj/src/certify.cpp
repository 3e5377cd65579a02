#include "riglab/certify.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace riglab {

namespace {

long totient(long n) {
    long result = n;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        while (n % p == 0) n /= p;
        result -= result / p;
    }
    if (n > 1) result -= result / n;
    return result;
}

constexpr double kRankTol = 1e-9;

const char* kZariskiNote =
    "Zariski density of the generated group is assumed, not verified; "
    "verdicts are meaningful under that hypothesis.";

}  // namespace

std::vector<long> totient_levels(int d) {
    // phi(l) >= sqrt(l/2), so phi(l) <= d^2 forces l <= 2 d^4.
    long bound = 2L * d * d * d * d;
    long limit = long(d) * d;
    std::vector<long> levels;
    for (long l = 1; l <= bound; ++l)
        if (totient(l) <= limit) levels.push_back(l);
    return levels;
}

MixingDetail is_mixing_pair(const ZMat& a1, const ZMat& a2) {
    if (a1.rows() != a2.rows()) throw DimensionMismatch("is_mixing_pair: dimension mismatch");
    if (!is_unimodular(a1) || !is_unimodular(a2))
        throw std::invalid_argument("is_mixing_pair requires unimodular matrices");
    MixingDetail detail;
    detail.mixing = true;
    int d = a1.rows();
    for (long l : totient_levels(d)) {
        ZMat m = power(a1, -l) * power(a2, l);
        for (int i = 0; i < d; ++i) m(i, i) -= 1;
        Int det = determinant(m);
        if (det == 0) detail.mixing = false;
        detail.level_dets.emplace_back(l, det);
    }
    return detail;
}

EssentialSetReport is_essential(const Eigen::MatrixXd& p1, const std::vector<ZMat>& dgs) {
    int d = int(p1.cols());
    EssentialSetReport report;
    if (dgs.empty()) {
        report.essential = false;
        report.eta = 0.0;
        report.witness_kernel_vector = Eigen::VectorXd::Unit(d, 0);
        return report;
    }
    Eigen::MatrixXd stacked(int(dgs.size()) * d, d);
    for (size_t k = 0; k < dgs.size(); ++k) {
        if (dgs[k].rows() != d) throw DimensionMismatch("is_essential: dimension mismatch");
        stacked.middleRows(int(k) * d, d) = p1 * to_double(dgs[k]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
    report.eta = svd.singularValues()(d - 1);
    report.essential = report.eta > kRankTol;
    if (!report.essential) report.witness_kernel_vector = svd.matrixV().col(d - 1);
    return report;
}

GoodPairCertificate check_good_pair(const AffineMap& f, const AffineMap& g) {
    if (f.dim() != g.dim()) throw DimensionMismatch("check_good_pair: dimension mismatch");
    GoodPairCertificate cert;
    cert.conjugation_note = kZariskiNote;

    SpectralSplit split;
    bool have_split = true;
    try {
        split = modulus_clusters(f.derivative());
    } catch (const UndecidablePrecision&) {
        have_split = false;
    }

    if (have_split) {
        cert.cond_partially_hyperbolic = is_partially_hyperbolic(split);
        cert.lambda1 = split.moduli[0];
        if (split.num_clusters() >= 2) cert.lambda2 = split.moduli[1];
        cert.cond_semisimple_min = split.semisimple_min;
        cert.min_block_is_line = split.min_multiplicity() == 1;

        // (iii): determinant of P^min Dg restricted to W^min, in the
        // min-block basis.
        const Eigen::MatrixXd& B = split.min_block_basis;
        Eigen::MatrixXd restricted =
            B.transpose() * split.projections[0] * to_double(g.derivative()) * B;
        cert.restricted_det = restricted.determinant();
        double tol = std::max(kRankTol, 100.0 * split.residual);
        cert.cond_pmin_dg_nondegenerate =
            std::abs(cert.restricted_det) > tol ? Ternary::True : Ternary::Undecided;
    }

    // (iv): sufficient mixing criterion on {f^-1, g f^-1 g^-1}; a failing
    // mixing test is inconclusive, not a refutation.
    auto [m1, m2] = mixing_test_pair(f, g);
    cert.mixing = is_mixing_pair(m1.derivative(), m2.derivative());
    cert.cond_density_via_mixing = cert.mixing.mixing ? Ternary::True : Ternary::Undecided;

    cert.overall = ternary_and(
        ternary_and(cert.cond_partially_hyperbolic, cert.cond_semisimple_min),
        ternary_and(cert.cond_pmin_dg_nondegenerate, cert.cond_density_via_mixing));
    return cert;
}

nlohmann::json certificate_to_json(const GoodPairCertificate& cert) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& [l, det] : cert.mixing.level_dets)
        levels.push_back({{"level", l}, {"det", det.get_str()}, {"nonzero", det != 0}});
    return {
        {"schema", "certificate_v1"},
        {"cond_partially_hyperbolic", to_string(cert.cond_partially_hyperbolic)},
        {"lambda1", {cert.lambda1.lo, cert.lambda1.hi}},
        {"lambda2", {cert.lambda2.lo, cert.lambda2.hi}},
        {"cond_semisimple_min", to_string(cert.cond_semisimple_min)},
        {"cond_pmin_dg_nondegenerate", to_string(cert.cond_pmin_dg_nondegenerate)},
        {"restricted_det", cert.restricted_det},
        {"cond_density_via_mixing", to_string(cert.cond_density_via_mixing)},
        {"mixing_levels", levels},
        {"overall", to_string(cert.overall)},
        {"min_block_is_line", cert.min_block_is_line},
        {"conjugation_note", cert.conjugation_note},
    };
}

namespace {

/// Freely reduced words up to max_len, ordered by (length, lexicographic),
/// letters ordered g0 < g0^-1 < g1 < g1^-1 < ...
std::vector<Word> enumerate_reduced_words(int n_generators, int max_len) {
    std::vector<Word> out;
    std::vector<std::vector<std::vector<int>>> by_len(max_len + 1);
    by_len[0].push_back({});
    int alphabet = 2 * n_generators;  // letter 2i = g_i, 2i+1 = g_i^-1
    for (int len = 1; len <= max_len; ++len)
        for (const auto& w : by_len[len - 1])
            for (int a = 0; a < alphabet; ++a) {
                if (!w.empty() && (w.back() ^ 1) == a) continue;  // cancellation
                auto nw = w;
                nw.push_back(a);
                by_len[len].push_back(std::move(nw));
            }
    for (int len = 1; len <= max_len; ++len)
        for (const auto& w : by_len[len]) {
            Word word;
            for (int a : w) {
                int idx = a / 2;
                long exp = a % 2 == 0 ? 1 : -1;
                if (!word.letters.empty() && word.letters.back().first == idx &&
                    (word.letters.back().second > 0) == (exp > 0))
                    word.letters.back().second += exp;
                else
                    word.letters.emplace_back(idx, exp);
            }
            out.push_back(std::move(word));
        }
    return out;
}

}  // namespace

std::optional<GoodPairSearchResult> search_good_pair(const std::vector<AffineMap>& generators,
                                                     int max_word_len) {
    if (max_word_len < 1) throw std::invalid_argument("max_word_len must be >= 1");
    if (generators.empty()) return std::nullopt;
    std::vector<Word> words = enumerate_reduced_words(int(generators.size()), max_word_len);
    std::vector<AffineMap> maps;
    std::vector<int> lens;
    maps.reserve(words.size());
    for (const Word& w : words) {
        maps.push_back(word_eval(generators, w));
        int len = 0;
        for (const auto& [idx, exp] : w.letters) len += int(std::abs(exp));
        lens.push_back(len);
    }
    for (int depth = 1; depth <= max_word_len; ++depth)
        for (size_t i = 0; i < words.size(); ++i) {
            if (lens[i] > depth) continue;
            for (size_t j = 0; j < words.size(); ++j) {
                if (lens[j] > depth || std::max(lens[i], lens[j]) != depth) continue;
                GoodPairCertificate cert = check_good_pair(maps[i], maps[j]);
                if (cert.overall == Ternary::True)
                    return GoodPairSearchResult{words[i], words[j], std::move(cert)};
            }
        }
    return std::nullopt;
}

Ternary is_weakly_hyperbolic(const std::vector<ZMat>& dfs) {
    if (dfs.empty()) return Ternary::False;
    int d = dfs.front().rows();
    std::vector<Eigen::VectorXd> certain, maybe;
    for (const ZMat& m : dfs) {
        if (m.rows() != d) throw DimensionMismatch("is_weakly_hyperbolic: dimension mismatch");
        SpectralSplit split;
        try {
            split = modulus_clusters(m);
        } catch (const UndecidablePrecision&) {
            return Ternary::Undecided;
        }
        for (int i = 0; i < split.num_clusters(); ++i) {
            const ClusterInterval& ci = split.moduli[i];
            bool stable = !ci.exact_one && ci.hi < 1.0;
            bool unsure = !ci.exact_one && !stable && ci.lo < 1.0;
            if (!stable && !unsure) continue;
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(split.projections[i], Eigen::ComputeFullU);
            Eigen::MatrixXd basis = svd.matrixU().leftCols(split.multiplicities[i]);
            for (int c = 0; c < basis.cols(); ++c)
                (stable ? certain : maybe).push_back(basis.col(c));
        }
    }
    auto rank_of = [&](const std::vector<Eigen::VectorXd>& cols) {
        if (cols.empty()) return 0;
        Eigen::MatrixXd m(d, int(cols.size()));
        for (size_t c = 0; c < cols.size(); ++c) m.col(int(c)) = cols[c];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        return int((svd.singularValues().array() > kRankTol).count());
    };
    if (rank_of(certain) == d) return Ternary::True;
    std::vector<Eigen::VectorXd> all = certain;
    all.insert(all.end(), maybe.begin(), maybe.end());
    if (rank_of(all) < d) return Ternary::False;
    return Ternary::Undecided;
}

}  // namespace riglab
