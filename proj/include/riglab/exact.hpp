#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

#include "riglab/common.hpp"

namespace riglab {

using Int = mpz_class;
using Rat = mpq_class;

/// Dense matrix over an exact scalar (mpz_class or mpq_class).
/// Row-major, value semantics. Sized for desk-scale d (d <= ~10).
template <typename Scalar>
class DenseMat {
  public:
    DenseMat() : rows_(0), cols_(0) {}
    DenseMat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}
    DenseMat(int rows, int cols, std::initializer_list<Scalar> entries)
        : rows_(rows), cols_(cols), a_(entries) {
        if (int(a_.size()) != rows * cols) throw std::invalid_argument("entry count mismatch");
    }

    static DenseMat identity(int n) {
        DenseMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Scalar& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
    const Scalar& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

    bool operator==(const DenseMat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    bool is_zero() const {
        for (const auto& x : a_)
            if (x != 0) return false;
        return true;
    }

    DenseMat operator*(const DenseMat& o) const {
        if (cols_ != o.rows_) throw DimensionMismatch("matrix product dimension mismatch");
        DenseMat r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const Scalar& aik = (*this)(i, k);
                if (aik == 0) continue;
                for (int j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }

    DenseMat operator+(const DenseMat& o) const {
        DenseMat r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
        return r;
    }

    DenseMat operator-(const DenseMat& o) const {
        DenseMat r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
        return r;
    }

    DenseMat transpose() const {
        DenseMat r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    std::vector<Scalar> operator*(const std::vector<Scalar>& v) const {
        if (int(v.size()) != cols_) throw DimensionMismatch("matrix-vector dimension mismatch");
        std::vector<Scalar> r(rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    Scalar trace() const {
        Scalar t = 0;
        for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

  private:
    int rows_, cols_;
    std::vector<Scalar> a_;
};

using ZMat = DenseMat<Int>;
using QMat = DenseMat<Rat>;

QMat to_rational(const ZMat& m);
ZMat to_integer(const QMat& m);  // throws if any entry is non-integral
Eigen::MatrixXd to_double(const ZMat& m);

/// Exact determinant (fraction-free for ZMat callers via the rational path).
Rat determinant(const QMat& m);
Int determinant(const ZMat& m);

bool is_unimodular(const ZMat& m);

/// Exact inverse by Gauss-Jordan over the rationals. Throws on singular input.
QMat inverse(const QMat& m);

/// Inverse of a unimodular integer matrix, exact and integral.
ZMat unimodular_inverse(const ZMat& m);

/// Integer matrix power; negative exponents require unimodularity.
ZMat power(const ZMat& m, long e);

int rank(const QMat& m);
inline int rank(const ZMat& m) { return rank(to_rational(m)); }

}  // namespace riglab
