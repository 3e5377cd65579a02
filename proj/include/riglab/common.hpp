#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace riglab {

/// Three-valued verdict. Undecided means the question could not be settled
/// at the configured precision; it is a value, not an error.
enum class Ternary { False = 0, True = 1, Undecided = 2 };

inline Ternary ternary_and(Ternary a, Ternary b) {
    if (a == Ternary::False || b == Ternary::False) return Ternary::False;
    if (a == Ternary::Undecided || b == Ternary::Undecided) return Ternary::Undecided;
    return Ternary::True;
}

inline const char* to_string(Ternary t) {
    switch (t) {
        case Ternary::False: return "false";
        case Ternary::True: return "true";
        default: return "undecided";
    }
}

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UndecidablePrecision : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RhoTooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PreconditionFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Counter-based generator (splitmix64 over a seed/counter pair). Streams are
/// reproducible across platforms and independent of call interleaving.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * ++counter_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [a,b).
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    /// Standard normal via Box-Muller.
    double next_gaussian();

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline double CounterRng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = uniform(-1.0, 1.0);
        v = uniform(-1.0, 1.0);
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double mul = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * mul;
    have_spare_ = true;
    return u * mul;
}

}  // namespace riglab
