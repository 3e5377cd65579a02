#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <utility>
#include <vector>

#include "riglab/exact.hpp"

#include <nlohmann/json.hpp>

namespace riglab {

using QVec = std::vector<Rat>;

/// Reduce a rational to [0,1).
Rat mod1(const Rat& x);

/// An element of Aff(T^d): x -> Mx + t mod 1, with M unimodular and t a
/// vector of exact rationals in [0,1). Immutable value type.
class AffineMap {
  public:
    AffineMap(ZMat derivative, QVec translation);
    static AffineMap identity(int d);
    static AffineMap linear(ZMat derivative);

    int dim() const { return derivative_.rows(); }
    const ZMat& derivative() const { return derivative_; }
    const QVec& translation() const { return translation_; }

    bool operator==(const AffineMap& o) const {
        return derivative_ == o.derivative_ && translation_ == o.translation_;
    }

  private:
    ZMat derivative_;
    QVec translation_;
};

AffineMap compose(const AffineMap& f, const AffineMap& g);  // f after g
AffineMap inverse(const AffineMap& f);

/// Exact evaluation on rational points, reduced mod 1.
QVec evaluate(const AffineMap& f, const QVec& x);
/// Floating evaluation; no promotion between the two paths.
Eigen::VectorXd evaluate(const AffineMap& f, const Eigen::VectorXd& x);

/// Word over a generator list: (generator index, nonzero exponent) letters.
struct Word {
    std::vector<std::pair<int, long>> letters;

    bool empty() const { return letters.empty(); }
    Word concat_inverse() const;  // formal inverse
    std::string to_string() const;
};

Word parse_word(const std::string& text, int n_generators);

AffineMap word_eval(const std::vector<AffineMap>& generators, const Word& w);

/// The pair (f^-1, g f^-1 g^-1) whose mixing certifies density of the
/// renormalized orbits of (f, g).
std::pair<AffineMap, AffineMap> mixing_test_pair(const AffineMap& f, const AffineMap& g);

nlohmann::json matrix_to_json(const ZMat& m);
ZMat matrix_from_json(const nlohmann::json& j);
nlohmann::json affine_to_json(const AffineMap& f);
AffineMap affine_from_json(const nlohmann::json& j);
std::vector<AffineMap> generators_from_json(const nlohmann::json& j);

}  // namespace riglab
