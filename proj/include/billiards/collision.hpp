#pragma once

#include <array>
#include <utility>

#include "billiards/forms.hpp"

namespace billiards {

/// mu_ij = 2 m_j / (m_i + m_j). Note mu_ij + mu_ji = 2 identically.
inline double mu(double mi, double mj) {
    if (std::abs(mi + mj) <= 1e-12 * std::max(std::abs(mi), std::abs(mj)))
        throw ZeroPairMass("mu: m_i + m_j is (near) zero");
    return 2.0 * mj / (mi + mj);
}

/// Elastic two-body collision law:
///   w_i = (1 - mu_ij) v_i + mu_ij v_j
///   w_j = mu_ji v_i + (1 - mu_ji) v_j
/// evaluated in the equivalent increment form w_i = v_i + mu_ij (v_j - v_i),
/// which keeps v_i = v_j an exact fixed point. Conserves m_i v_i + m_j v_j
/// and the kinetic energy, and reverses the relative velocity:
/// w_j - w_i = -(v_j - v_i).
inline std::pair<double, double> resolve_collision(double mi, double mj,
                                                   double vi, double vj) {
    const double mij = mu(mi, mj);
    const double mji = 2.0 - mij;
    const double d = vj - vi;
    return {vi + mij * d, vj - mji * d};
}

/// Dense square matrix, row-major. Sized for small N.
struct Matrix {
    std::size_t n = 0;
    Vec a;

    explicit Matrix(std::size_t size) : n(size), a(size * size, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return a[r * n + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * n + c]; }

    static Matrix identity(std::size_t size) {
        Matrix m(size);
        for (std::size_t i = 0; i < size; ++i) m.at(i, i) = 1.0;
        return m;
    }

    Vec apply(const Vec& v) const {
        require_same_size(n, v, "Matrix::apply");
        Vec out(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += at(r, c) * v[c];
            out[r] = s;
        }
        return out;
    }

    Matrix times(const Matrix& rhs) const {
        Matrix out(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t k = 0; k < n; ++k) {
                const double x = at(r, k);
                if (x == 0.0) continue;
                for (std::size_t c = 0; c < n; ++c)
                    out.at(r, c) += x * rhs.at(k, c);
            }
        return out;
    }
};

/// The collision map T_ij: identity except on coordinates i, j where it acts
/// by the collision law. T_ij is a B-isometry and an involution.
inline Matrix collision_matrix(const MassVector& m, std::size_t i,
                               std::size_t j) {
    if (i >= m.size() || j >= m.size() || i == j)
        throw PreconditionViolation("collision_matrix: bad particle indices");
    m.require_pair(i, j);
    const double mij = mu(m[i], m[j]);
    const double mji = 2.0 - mij;
    Matrix t = Matrix::identity(m.size());
    t.at(i, i) = 1.0 - mij;
    t.at(i, j) = mij;
    t.at(j, i) = mji;
    t.at(j, j) = 1.0 - mji;
    return t;
}

/// In-place application of T_ij to a vector: cheaper than building the matrix.
inline void apply_collision(const MassVector& m, std::size_t i, std::size_t j,
                            Vec& w) {
    const auto [wi, wj] = resolve_collision(m[i], m[j], w[i], w[j]);
    w[i] = wi;
    w[j] = wj;
}

/// Wall normal n_ij = (1/m_j) e_j - (1/m_i) e_i. Satisfies
/// B(x, n_ij) = x_j - x_i and Q(n_ij) = (m_i + m_j)/(m_i m_j).
struct WallNormal {
    std::size_t i = 0;
    std::size_t j = 0;
    Vec n;
};

inline WallNormal wall_normal(const MassVector& m, std::size_t i,
                              std::size_t j) {
    if (i >= m.size() || j >= m.size() || i == j)
        throw PreconditionViolation("wall_normal: bad particle indices");
    WallNormal w{i, j, Vec(m.size(), 0.0)};
    w.n[j] = 1.0 / m[j];
    w.n[i] = -1.0 / m[i];
    return w;
}

/// Mirror law for the form B: v maps to v - 2 (B(v,n)/Q(n)) n. Fixes every
/// vector B-orthogonal to n and negates n itself. Throws DegenerateNormal
/// when n is lightlike (Q(n) = 0), where no reflection exists.
inline Vec reflect(const MassVector& m, const Vec& n, const Vec& v) {
    require_same_size(m.size(), n, "reflect: n");
    require_same_size(m.size(), v, "reflect: v");
    const double qn = quadratic(m, n);
    double qn_scale = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k)
        qn_scale += std::abs(m[k]) * n[k] * n[k];
    if (std::abs(qn) <= 1e-12 * qn_scale)
        throw DegenerateNormal("reflect: lightlike wall normal");
    const double coeff = 2.0 * bilinear(m, v, n) / qn;
    Vec w(v);
    for (std::size_t k = 0; k < m.size(); ++k) w[k] -= coeff * n[k];
    return w;
}

inline Vec reflect(const MassVector& m, const WallNormal& n, const Vec& v) {
    return reflect(m, n.n, v);
}

}  // namespace billiards
