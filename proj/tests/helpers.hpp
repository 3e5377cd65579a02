#pragma once

#include <riglab/actions.hpp>
#include <riglab/common.hpp>

#include <initializer_list>

namespace riglab::testing {

inline ZMat zmat(int n, std::initializer_list<long> entries) {
    ZMat m(n, n);
    int k = 0;
    for (long v : entries) {
        m(k / n, k % n) = v;
        ++k;
    }
    return m;
}

inline ZMat cat2() { return zmat(2, {2, 1, 1, 1}); }
inline ZMat shear_n() { return zmat(2, {1, 1, 0, 1}); }

// Golden mean, the cat map's unstable eigenvector slope.
inline double golden() { return (std::sqrt(5.0) + 1.0) / 2.0; }

/// Random unimodular matrix as a product of elementary shears.
inline ZMat random_unimodular(CounterRng& rng, int d, int steps = 6) {
    ZMat m = ZMat::identity(d);
    for (int s = 0; s < steps; ++s) {
        int i = int(rng.next_u64() % d);
        int j = int(rng.next_u64() % d);
        if (i == j) continue;
        long k = long(rng.next_u64() % 3) - 1;
        ZMat e = ZMat::identity(d);
        e(i, j) = k;
        m = m * e;
    }
    return m;
}

inline ZMat random_int_matrix(CounterRng& rng, int d, long lo, long hi) {
    ZMat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m(i, j) = lo + long(rng.next_u64() % std::uint64_t(hi - lo + 1));
    return m;
}

}  // namespace riglab::testing
