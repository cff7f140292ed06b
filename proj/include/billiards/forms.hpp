#pragma once

#include <cstdlib>
#include <numeric>
#include <utility>

#include "billiards/common.hpp"

namespace billiards {

/// Signed masses of an N-particle system. Masses must be nonzero; pair sums
/// m_i + m_j near zero make the collision coefficients blow up, so every
/// operation that forms a mu checks the pair it uses (see pair_sum_ok).
/// Static queries such as signatures stay meaningful without that check;
/// a total mass within tolerance of zero classifies as degenerate.
class MassVector {
  public:
    explicit MassVector(Vec masses) : m_(std::move(masses)) {
        if (m_.size() < 2)
            throw InvalidMassVector("need at least 2 masses");
        for (double mi : m_)
            if (mi == 0.0) throw InvalidMassVector("mass must be nonzero");
        prefix_.resize(m_.size() + 1, 0.0);
        std::partial_sum(m_.begin(), m_.end(), prefix_.begin() + 1);
        abs_sum_ = sum_abs(m_);
    }

    bool pair_sum_ok(std::size_t i, std::size_t j) const {
        return std::abs(m_[i] + m_[j]) > 1e-12 * max_abs(m_);
    }

    void require_pair(std::size_t i, std::size_t j) const {
        if (!pair_sum_ok(i, j))
            throw ZeroPairMass("m_" + std::to_string(i) + " + m_" +
                               std::to_string(j) + " is (near) zero");
    }

    std::size_t size() const { return m_.size(); }
    double operator[](std::size_t i) const { return m_[i]; }
    const Vec& values() const { return m_; }

    /// Total mass M.
    double total() const { return prefix_.back(); }

    /// Partial sum m_j + ... + m_k, inclusive, 0-based.
    double range_sum(std::size_t j, std::size_t k) const {
        return prefix_[k + 1] - prefix_[j];
    }

    /// Tolerance under which a derived sum of masses counts as zero.
    double sum_tol() const { return 1e-12 * abs_sum_; }

    bool sum_is_zero(double s) const { return std::abs(s) <= sum_tol(); }

    MassVector negated() const {
        Vec n(m_);
        for (double& x : n) x = -x;
        return MassVector(std::move(n));
    }

  private:
    Vec m_;
    Vec prefix_;
    double abs_sum_ = 0.0;
};

/// Signature (p, q) of a symmetric bilinear form; when degenerate, (p, q)
/// counts only the nondegenerate part.
struct Signature {
    int p = 0;
    int q = 0;
    bool degenerate = false;

    bool operator==(const Signature&) const = default;
    bool definite() const { return !degenerate && (p == 0 || q == 0); }
};

/// B(y, z) = sum_i y_i m_i z_i, grouped as m_i (y_i z_i) so that symmetry
/// in y, z is exact in floating point.
inline double bilinear(const MassVector& m, const Vec& y, const Vec& z) {
    require_same_size(m.size(), y, "bilinear: y");
    require_same_size(m.size(), z, "bilinear: z");
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * (y[i] * z[i]);
    return s;
}

/// Q(y) = B(y, y)
inline double quadratic(const MassVector& m, const Vec& y) {
    return bilinear(m, y, y);
}

/// E = (1/2) Q(v)
inline double kinetic_energy(const MassVector& m, const Vec& v) {
    return 0.5 * quadratic(m, v);
}

/// Signature of B on all of R^N: counts of positive and negative masses.
inline Signature full_signature(const MassVector& m) {
    Signature s;
    for (std::size_t i = 0; i < m.size(); ++i) (m[i] > 0.0 ? s.p : s.q)++;
    return s;
}

/// Signature of B restricted to the zero-momentum subspace P0.
/// M = 0 makes the restriction degenerate (radical spanned by (1,...,1)).
inline Signature restricted_signature(const MassVector& m) {
    Signature s = full_signature(m);
    const double M = m.total();
    if (m.sum_is_zero(M)) return {s.p - 1, s.q - 1, true};
    if (M > 0.0) return {s.p - 1, s.q, false};
    return {s.p, s.q - 1, false};
}

/// B|P0 is definite iff all masses share a sign, or exactly one mass has
/// the sign of the total mass M.
inline bool is_definite_on_P0(const MassVector& m) {
    if (m.size() < 3)
        throw PreconditionViolation("is_definite_on_P0 needs N >= 3");
    const double M = m.total();
    if (m.sum_is_zero(M)) return false;
    int pos = 0, neg = 0;
    for (std::size_t i = 0; i < m.size(); ++i) (m[i] > 0.0 ? pos : neg)++;
    if (pos == 0 || neg == 0) return true;
    const int with_sign_of_M = M > 0.0 ? pos : neg;
    return with_sign_of_M == 1;
}

/// (m1 + m2 + m3) m1 m2 m3 > 0: the three-particle triangular-billiard
/// condition; equivalent to B|P0 definite for N = 3.
inline bool glashow_mittag(double m1, double m2, double m3) {
    return (m1 + m2 + m3) * m1 * m2 * m3 > 0.0;
}

/// m_{1,j} m_{k+1,N} M > 0 for all 1 <= j <= k <= N-1 (1-based). Under this
/// condition the ordered cone x_1 <= ... <= x_N meets P0 only where I(x) > 0.
inline bool cone_condition(const MassVector& m) {
    const std::size_t n = m.size();
    const double M = m.total();
    if (m.sum_is_zero(M)) return false;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double left = m.range_sum(0, j);
        if (m.sum_is_zero(left)) return false;
        for (std::size_t k = j; k + 1 < n; ++k) {
            const double right = m.range_sum(k + 1, n - 1);
            if (m.sum_is_zero(right) || left * right * M <= 0.0) return false;
        }
    }
    return true;
}

/// Interior masses negative, m_1 + ... + m_{N-1} > 0, (m_2 + ... + m_N) M > 0.
/// Gravitons are exactly this with M > 0, compressors with M < 0.
inline bool gas_neg_condition(const MassVector& m) {
    const std::size_t n = m.size();
    if (n < 3) return false;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (m[i] >= 0.0) return false;
    const double head = m.range_sum(0, n - 2);
    if (m.sum_is_zero(head) || head < 0.0) return false;
    const double tail = m.range_sum(1, n - 1);
    const double M = m.total();
    if (m.sum_is_zero(tail) || m.sum_is_zero(M)) return false;
    return tail * M > 0.0;
}

enum class SystemTag {
    AllSameSign,
    OneMassWithSignOfM,
    TotalMassZero,
    Graviton,
    Compressor,
    IndefiniteOther,
};

inline const char* to_string(SystemTag t) {
    switch (t) {
        case SystemTag::AllSameSign: return "AllSameSign";
        case SystemTag::OneMassWithSignOfM: return "OneMassWithSignOfM";
        case SystemTag::TotalMassZero: return "TotalMassZero";
        case SystemTag::Graviton: return "Graviton";
        case SystemTag::Compressor: return "Compressor";
        case SystemTag::IndefiniteOther: return "IndefiniteOther";
    }
    return "?";
}

/// Classification verdict. The flags gas_neg and cone refer to the canonical
/// representative: the input masses, or their negation when only the negated
/// system matches (mirrored = true). Negating all masses leaves every
/// collision coefficient, and hence the dynamics, unchanged.
struct SystemClass {
    SystemTag tag = SystemTag::IndefiniteOther;
    bool gas_neg = false;
    bool cone = false;
    bool mirrored = false;
};

inline SystemClass classify(const MassVector& m) {
    SystemClass out;
    out.gas_neg = gas_neg_condition(m);
    out.cone = cone_condition(m);

    const double M = m.total();
    if (m.sum_is_zero(M)) {
        out.tag = SystemTag::TotalMassZero;
        return out;
    }
    int pos = 0, neg = 0;
    for (std::size_t i = 0; i < m.size(); ++i) (m[i] > 0.0 ? pos : neg)++;
    if (pos == 0 || neg == 0) {
        out.tag = SystemTag::AllSameSign;
        return out;
    }
    if ((M > 0.0 ? pos : neg) == 1) {
        out.tag = SystemTag::OneMassWithSignOfM;
        return out;
    }
    if (out.gas_neg) {
        out.tag = M > 0.0 ? SystemTag::Graviton : SystemTag::Compressor;
        return out;
    }
    const MassVector neg_m = m.negated();
    if (gas_neg_condition(neg_m)) {
        out.mirrored = true;
        out.gas_neg = true;
        out.cone = cone_condition(neg_m);
        out.tag = -M > 0.0 ? SystemTag::Graviton : SystemTag::Compressor;
        return out;
    }
    out.tag = SystemTag::IndefiniteOther;
    return out;
}

/// Reversed Cauchy-Schwarz: [B(x,y)]^2 >= Q(x) Q(y) on planes where B is
/// indefinite (caller-checked). Comparison carries a small relative slack.
inline bool reversed_cs_holds(const MassVector& m, const Vec& x, const Vec& y) {
    const double lhs = bilinear(m, x, y) * bilinear(m, x, y);
    const double rhs = quadratic(m, x) * quadratic(m, y);
    const double slack = 1e-12 * std::max({std::abs(lhs), std::abs(rhs), 1.0});
    return lhs >= rhs - slack;
}

}  // namespace billiards
