#include "riglab/exact.hpp"

namespace riglab {

QMat to_rational(const ZMat& m) {
    QMat r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
    return r;
}

ZMat to_integer(const QMat& m) {
    ZMat r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            Rat q = m(i, j);
            q.canonicalize();
            if (q.get_den() != 1) throw std::invalid_argument("entry is not an integer");
            r(i, j) = q.get_num();
        }
    return r;
}

Eigen::MatrixXd to_double(const ZMat& m) {
    Eigen::MatrixXd r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).get_d();
    return r;
}

Rat determinant(const QMat& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("determinant of non-square matrix");
    int n = m.rows();
    QMat a = m;
    Rat det = 1;
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int i = col; i < n; ++i)
            if (a(i, col) != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) return Rat(0);
        if (pivot != col) {
            for (int j = col; j < n; ++j) std::swap(a(pivot, j), a(col, j));
            det = -det;
        }
        det *= a(col, col);
        Rat inv = Rat(1) / a(col, col);
        for (int i = col + 1; i < n; ++i) {
            if (a(i, col) == 0) continue;
            Rat f = a(i, col) * inv;
            for (int j = col; j < n; ++j) a(i, j) -= f * a(col, j);
        }
    }
    return det;
}

Int determinant(const ZMat& m) {
    Rat d = determinant(to_rational(m));
    d.canonicalize();
    return d.get_num();
}

bool is_unimodular(const ZMat& m) {
    if (m.rows() != m.cols()) return false;
    Int d = determinant(m);
    return d == 1 || d == -1;
}

QMat inverse(const QMat& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("inverse of non-square matrix");
    int n = m.rows();
    QMat a = m;
    QMat inv = QMat::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int i = col; i < n; ++i)
            if (a(i, col) != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) throw std::invalid_argument("singular matrix");
        if (pivot != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a(pivot, j), a(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        Rat p = Rat(1) / a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) *= p;
            inv(col, j) *= p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == col || a(i, col) == 0) continue;
            Rat f = a(i, col);
            for (int j = 0; j < n; ++j) {
                a(i, j) -= f * a(col, j);
                inv(i, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

ZMat unimodular_inverse(const ZMat& m) {
    if (!is_unimodular(m)) throw std::invalid_argument("matrix is not unimodular");
    return to_integer(inverse(to_rational(m)));
}

ZMat power(const ZMat& m, long e) {
    if (m.rows() != m.cols()) throw DimensionMismatch("power of non-square matrix");
    ZMat base = e >= 0 ? m : unimodular_inverse(m);
    long k = e >= 0 ? e : -e;
    ZMat r = ZMat::identity(m.rows());
    while (k > 0) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

int rank(const QMat& m) {
    QMat a = m;
    int n = a.rows(), c = a.cols();
    int rk = 0;
    for (int col = 0; col < c && rk < n; ++col) {
        int pivot = -1;
        for (int i = rk; i < n; ++i)
            if (a(i, col) != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != rk)
            for (int j = 0; j < c; ++j) std::swap(a(pivot, j), a(rk, j));
        Rat inv = Rat(1) / a(rk, col);
        for (int i = rk + 1; i < n; ++i) {
            if (a(i, col) == 0) continue;
            Rat f = a(i, col) * inv;
            for (int j = col; j < c; ++j) a(i, j) -= f * a(rk, j);
        }
        ++rk;
    }
    return rk;
}

}  // namespace riglab
