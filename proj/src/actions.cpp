#include "riglab/actions.hpp"

#include <sstream>

namespace riglab {

Rat mod1(const Rat& x) {
    Rat r = x;
    r.canonicalize();
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    r -= Rat(fl);
    r.canonicalize();
    return r;
}

AffineMap::AffineMap(ZMat derivative, QVec translation)
    : derivative_(std::move(derivative)), translation_(std::move(translation)) {
    if (derivative_.rows() != derivative_.cols())
        throw DimensionMismatch("derivative must be square");
    if (int(translation_.size()) != derivative_.rows())
        throw DimensionMismatch("translation length must match dimension");
    if (!is_unimodular(derivative_))
        throw std::invalid_argument("derivative must be unimodular");
    for (auto& t : translation_) t = mod1(t);
}

AffineMap AffineMap::identity(int d) { return AffineMap(ZMat::identity(d), QVec(d)); }

AffineMap AffineMap::linear(ZMat derivative) {
    QVec t(derivative.rows());
    return AffineMap(std::move(derivative), std::move(t));
}

AffineMap compose(const AffineMap& f, const AffineMap& g) {
    if (f.dim() != g.dim()) throw DimensionMismatch("compose: dimension mismatch");
    // (f.g)(x) = M_f (M_g x + t_g) + t_f
    ZMat M = f.derivative() * g.derivative();
    QVec t(f.dim());
    for (int i = 0; i < f.dim(); ++i) {
        Rat s = f.translation()[i];
        for (int j = 0; j < f.dim(); ++j) s += Rat(f.derivative()(i, j)) * g.translation()[j];
        t[i] = s;
    }
    return AffineMap(std::move(M), std::move(t));
}

AffineMap inverse(const AffineMap& f) {
    ZMat Minv = unimodular_inverse(f.derivative());
    QVec t(f.dim());
    for (int i = 0; i < f.dim(); ++i) {
        Rat s = 0;
        for (int j = 0; j < f.dim(); ++j) s -= Rat(Minv(i, j)) * f.translation()[j];
        t[i] = s;
    }
    return AffineMap(std::move(Minv), std::move(t));
}

QVec evaluate(const AffineMap& f, const QVec& x) {
    if (int(x.size()) != f.dim()) throw DimensionMismatch("evaluate: dimension mismatch");
    QVec y(f.dim());
    for (int i = 0; i < f.dim(); ++i) {
        Rat s = f.translation()[i];
        for (int j = 0; j < f.dim(); ++j) s += Rat(f.derivative()(i, j)) * x[j];
        y[i] = mod1(s);
    }
    return y;
}

Eigen::VectorXd evaluate(const AffineMap& f, const Eigen::VectorXd& x) {
    if (int(x.size()) != f.dim()) throw DimensionMismatch("evaluate: dimension mismatch");
    Eigen::VectorXd y = to_double(f.derivative()) * x;
    for (int i = 0; i < f.dim(); ++i) {
        y(i) += f.translation()[i].get_d();
        y(i) -= std::floor(y(i));
    }
    return y;
}

Word Word::concat_inverse() const {
    Word w;
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
        w.letters.emplace_back(it->first, -it->second);
    return w;
}

std::string Word::to_string() const {
    if (letters.empty()) return "e";
    std::ostringstream os;
    bool first = true;
    for (const auto& [idx, exp] : letters) {
        if (!first) os << " ";
        first = false;
        os << "g" << idx;
        if (exp != 1) os << "^" << exp;
    }
    return os.str();
}

Word parse_word(const std::string& text, int n_generators) {
    Word w;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        if (tok == "e") continue;
        if (tok.size() < 2 || tok[0] != 'g') throw std::invalid_argument("bad word token: " + tok);
        size_t caret = tok.find('^');
        int idx = std::stoi(tok.substr(1, caret == std::string::npos ? std::string::npos : caret - 1));
        long exp = caret == std::string::npos ? 1 : std::stol(tok.substr(caret + 1));
        if (idx < 0 || idx >= n_generators) throw std::out_of_range("generator index out of range");
        if (exp == 0) continue;
        w.letters.emplace_back(idx, exp);
    }
    return w;
}

AffineMap word_eval(const std::vector<AffineMap>& generators, const Word& w) {
    if (generators.empty()) throw std::invalid_argument("empty generator list");
    int d = generators.front().dim();
    AffineMap result = AffineMap::identity(d);
    for (const auto& [idx, exp] : w.letters) {
        if (idx < 0 || idx >= int(generators.size()))
            throw std::out_of_range("generator index out of range");
        const AffineMap& g = generators[idx];
        AffineMap base = exp > 0 ? g : inverse(g);
        for (long k = 0; k < std::abs(exp); ++k) result = compose(result, base);
    }
    return result;
}

std::pair<AffineMap, AffineMap> mixing_test_pair(const AffineMap& f, const AffineMap& g) {
    if (f.dim() != g.dim()) throw DimensionMismatch("mixing_test_pair: dimension mismatch");
    AffineMap finv = inverse(f);
    return {finv, compose(compose(g, finv), inverse(g))};
}

nlohmann::json matrix_to_json(const ZMat& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j).get_str());
        entries.push_back(row);
    }
    return {{"dim", m.rows()}, {"entries", entries}};
}

ZMat matrix_from_json(const nlohmann::json& j) {
    int d = j.at("dim").get<int>();
    ZMat m(d, d);
    const auto& entries = j.at("entries");
    for (int i = 0; i < d; ++i)
        for (int c = 0; c < d; ++c) {
            const auto& e = entries.at(i).at(c);
            m(i, c) = e.is_string() ? Int(e.get<std::string>()) : Int(e.get<long>());
        }
    return m;
}

nlohmann::json affine_to_json(const AffineMap& f) {
    nlohmann::json t = nlohmann::json::array();
    for (const Rat& x : f.translation()) t.push_back(x.get_str());
    nlohmann::json j = matrix_to_json(f.derivative());
    j["translation"] = t;
    return j;
}

AffineMap affine_from_json(const nlohmann::json& j) {
    ZMat m = matrix_from_json(j);
    QVec t(m.rows());
    if (j.contains("translation"))
        for (int i = 0; i < m.rows(); ++i) {
            const auto& e = j.at("translation").at(i);
            t[i] = e.is_string() ? Rat(e.get<std::string>()) : Rat(e.get<long>());
            t[i].canonicalize();
        }
    return AffineMap(std::move(m), std::move(t));
}

std::vector<AffineMap> generators_from_json(const nlohmann::json& j) {
    std::vector<AffineMap> gens;
    for (const auto& item : j) gens.push_back(affine_from_json(item));
    return gens;
}

}  // namespace riglab
