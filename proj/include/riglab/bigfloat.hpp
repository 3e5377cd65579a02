#pragma once

#include <boost/multiprecision/mpfr.hpp>

namespace riglab {

/// 77 decimal digits ~ 256 bits, the maximum working precision for
/// certified eigenvalue work.
using big = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<77>,
                                          boost::multiprecision::et_off>;

/// Minimal complex type over `big`. std::complex is only specified for
/// built-in floating point, so we roll the handful of operations we need.
struct CBig {
    big re{0}, im{0};

    CBig() = default;
    CBig(big r) : re(std::move(r)) {}
    CBig(big r, big i) : re(std::move(r)), im(std::move(i)) {}
    CBig(double r, double i = 0.0) : re(r), im(i) {}

    CBig operator+(const CBig& o) const { return {re + o.re, im + o.im}; }
    CBig operator-(const CBig& o) const { return {re - o.re, im - o.im}; }
    CBig operator-() const { return {-re, -im}; }
    CBig operator*(const CBig& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    CBig operator/(const CBig& o) const {
        big d = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
    }
    CBig& operator+=(const CBig& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    CBig& operator-=(const CBig& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    CBig& operator*=(const CBig& o) { return *this = *this * o; }

    big abs2() const { return re * re + im * im; }
    big abs() const { return sqrt(abs2()); }
    CBig conj() const { return {re, -im}; }
};

}  // namespace riglab
