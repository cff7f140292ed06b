#pragma once

#include <complex>

#include "billiards/simulator.hpp"

namespace billiards {

/// The composed 3-particle collision map T = T_12 o T_23 restricted to the
/// zero-momentum plane P0, expressed in the B-orthogonal basis {xi_1, n_23}.
/// A1 holds the change-of-basis data (a, b, c, d) defined by
///   xi_1 = a xi_2 + c n_12,   n_23 = b xi_2 + d n_12.
/// det(A2) = 1 always; for gas_neg systems A2 is hyperbolic with real
/// eigenvalues lambda, 1/lambda, |lambda| != 1.
struct ComposedMap3 {
    std::array<double, 3> xi1{};
    std::array<double, 3> xi2{};
    std::array<std::array<double, 2>, 2> A1{};
    std::array<std::array<double, 2>, 2> A2{};
    std::complex<double> lambda1;
    std::complex<double> lambda2;
    bool hyperbolic = false;

    double trace() const { return A2[0][0] + A2[1][1]; }
    double det() const { return A2[0][0] * A2[1][1] - A2[0][1] * A2[1][0]; }
};

inline ComposedMap3 composed_map(const MassVector& m) {
    if (m.size() != 3)
        throw PreconditionViolation("composed_map: exactly 3 particles");
    const double M = m.total();
    if (m.sum_is_zero(M)) throw ZeroTotalMass("composed_map: M = 0");
    m.require_pair(0, 1);
    m.require_pair(1, 2);
    const double m1 = m[0], m2 = m[1], m3 = m[2];

    ComposedMap3 out;
    out.xi1 = {(-m2 - m3) / M, m1 / M, m1 / M};
    out.xi2 = {-m3 / M, -m3 / M, (m1 + m2) / M};

    const double a = m1 / (m1 + m2);
    const double b = M / (m3 * (m1 + m2));
    const double c = m1 * m2 / (m1 + m2);
    const double d = -m1 / (m1 + m2);
    out.A1 = {{{a, b}, {c, d}}};

    const double delta = a * d - b * c;
    const double sum = a * d + b * c;
    out.A2 = {{{sum / delta, -2.0 * b * d / delta},
               {-2.0 * a * c / delta, sum / delta}}};

    // eigenvalues from trace and det = 1 in closed form
    const double tr = out.trace();
    const double disc = tr * tr / 4.0 - 1.0;
    if (disc > 0.0) {
        const double root = std::sqrt(disc);
        const double l1 = tr / 2.0 + (tr >= 0.0 ? root : -root);
        out.lambda1 = l1;
        out.lambda2 = 1.0 / l1;
        out.hyperbolic = true;
    } else {
        // |trace| <= 2: eigenvalues on the unit circle (definite systems)
        out.lambda1 = {tr / 2.0, std::sqrt(-disc)};
        out.lambda2 = std::conj(out.lambda1);
        out.hyperbolic = false;
    }
    return out;
}

/// Q(x(0) + t_{2k} v(0)) along a trajectory, at the even-indexed collision
/// times. For a collapsing gas_neg 3-particle run the sequence decays to 0:
/// the unfolded contact points approach the light cone of B.
inline std::vector<double> wall_image_decay(const MassVector& m,
                                            const Trajectory& traj) {
    std::vector<double> out;
    const Vec& x0 = traj.initial.x;
    const Vec& v0 = traj.initial.v;
    Vec p(x0.size());
    for (std::size_t k = 1; k < traj.events.size(); k += 2) {
        const double tau = traj.events[k].t - traj.initial.t;
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = x0[i] + tau * v0[i];
        out.push_back(quadratic(m, p));
    }
    return out;
}

inline std::vector<double> wall_image_decay(const MassVector& m,
                                            const ParticleState& state,
                                            const SimLimits& limits = {}) {
    return wall_image_decay(m, simulate(m, state, limits));
}

}  // namespace billiards
