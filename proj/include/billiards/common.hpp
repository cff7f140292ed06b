#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace billiards {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidMassVector : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// mu is undefined when the pair-sum of masses vanishes
struct ZeroPairMass : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroTotalMass : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// lightlike wall normal: Q(n) = 0, no reflection exists
struct DegenerateNormal : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PreconditionViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using Vec = std::vector<double>;

inline double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double sum_abs(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

// per-run magnitude scale used by conservation and identity tolerances
inline double run_scale(const Vec& x, const Vec& v, const Vec& m) {
    return std::max(1.0, max_abs(x)) * std::max(1.0, max_abs(v)) *
           std::max(1.0, max_abs(m));
}

inline void require_same_size(std::size_t n, const Vec& v, const char* what) {
    if (v.size() != n)
        throw DimensionMismatch(std::string(what) + ": expected length " +
                                std::to_string(n) + ", got " +
                                std::to_string(v.size()));
}

}  // namespace billiards
