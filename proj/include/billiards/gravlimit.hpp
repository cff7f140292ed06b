#pragma once

#include "billiards/simulator.hpp"

namespace billiards {

/// The m2 -> 0 limit experiment: a 3-particle graviton with both end masses
/// at rest, the middle mass carrying fixed negative kinetic energy U0. In
/// the limit the ends move under the potential U(r) = U0 r0^2 / r^2 with
/// T + U = E conserved and r(t)^2 = r0^2 + t^2 E / a, a = m1 m3/(2(m1+m3)).
struct LimitConfig {
    double m1 = 1.0;
    double m3 = 1.0;
    double x1_0 = -1.0;  // must be negative; x3_0 = -m1 x1_0 / m3
    double U0 = -1.0;    // kinetic energy of the middle particle, negative
    int v2_sign = +1;    // direction of the middle particle's start velocity
    std::vector<double> m2_list;       // negative, decreasing in magnitude
    std::vector<double> sample_times;  // empty: 21 uniform in [-0.9s, 0.9s]

    double r0() const { return x3_0() - x1_0; }
    double x3_0() const { return -m1 * x1_0 / m3; }
    double I0() const { return m1 * x1_0 * x1_0 + m3 * x3_0() * x3_0(); }
    double a() const { return m1 * m3 / (2.0 * (m1 + m3)); }
    /// positive root s of I0 + 2 t^2 U0 = 0; solutions live on (-s, s)
    double s_root() const { return std::sqrt(I0() / (-2.0 * U0)); }

    std::vector<double> effective_sample_times() const {
        if (!sample_times.empty()) return sample_times;
        std::vector<double> out;
        const double s = s_root();
        for (int k = 0; k <= 20; ++k)
            out.push_back((-0.9 + 1.8 * k / 20.0) * s);
        return out;
    }
};

inline void validate(const LimitConfig& c) {
    if (!(c.m1 > 0.0) || !(c.m3 > 0.0))
        throw PreconditionViolation("limit config: m1, m3 must be positive");
    if (!(c.U0 < 0.0))
        throw PreconditionViolation("limit config: U0 must be negative");
    if (!(c.x1_0 < 0.0))
        throw PreconditionViolation("limit config: x1_0 must be negative");
    if (c.v2_sign != 1 && c.v2_sign != -1)
        throw PreconditionViolation("limit config: v2_sign must be +-1");
}

/// Initial data for one limit point: x2 = 0, v1 = v3 = 0, and
/// (1/2) m2 v2^2 = U0. Requires the graviton conditions m1+m2 > 0, m2+m3 > 0.
inline std::pair<MassVector, ParticleState> setup(const LimitConfig& c,
                                                  double m2) {
    validate(c);
    if (!(m2 < 0.0))
        throw PreconditionViolation("setup: m2 must be negative");
    if (!(c.m1 + m2 > 0.0) || !(m2 + c.m3 > 0.0))
        throw PreconditionViolation("setup: graviton condition violated");
    MassVector m({c.m1, m2, c.m3});
    ParticleState s;
    s.t = 0.0;
    s.x = {c.x1_0, 0.0, c.x3_0()};
    s.v = {0.0, c.v2_sign * std::sqrt(2.0 * c.U0 / m2), 0.0};
    return {std::move(m), std::move(s)};
}

struct LimitSample {
    double t = 0.0;
    double r = 0.0;         // x3 - x1
    double t_kin = 0.0;     // (1/2) m1 v1^2 + (1/2) m3 v3^2
    double u_pot = 0.0;     // U0 r0^2 / r^2
    double residual = 0.0;  // t_kin + u_pot - E
    double r_theory = 0.0;  // sqrt(r0^2 + t^2 E / a)
};

struct LimitObservables {
    double m2 = 0.0;
    std::vector<LimitSample> samples;
    std::size_t events_used = 0;
};

/// Simulate one m2 and sample the end particles. Negative sample times come
/// from the time-reversed run (v -> -v), which traces x(-t).
inline LimitObservables run_limit_point(const LimitConfig& c, double m2,
                                        const SimLimits& base_limits = {}) {
    auto [m, state] = setup(c, m2);
    const double s = c.s_root();
    auto times = c.effective_sample_times();
    double t_need_fwd = 0.0, t_need_bwd = 0.0;
    for (double t : times) {
        if (std::abs(t) >= s)
            throw PreconditionViolation(
                "run_limit_point: sample time outside (-s, s)");
        if (t >= 0.0)
            t_need_fwd = std::max(t_need_fwd, t);
        else
            t_need_bwd = std::max(t_need_bwd, -t);
    }

    const double E = c.U0;
    const double r0 = c.r0();
    const double a = c.a();

    SimLimits lim = base_limits;
    lim.t_max = t_need_fwd;
    Trajectory fwd = simulate(m, state, lim);

    ParticleState rev = state;
    for (double& vi : rev.v) vi = -vi;
    lim.t_max = t_need_bwd;
    Trajectory bwd = simulate(m, rev, lim);

    LimitObservables out;
    out.m2 = m2;
    out.events_used = fwd.events.size() + bwd.events.size();
    for (double t : times) {
        const ParticleState at =
            t >= 0.0 ? state_at(m, fwd, t) : state_at(m, bwd, -t);
        LimitSample smp;
        smp.t = t;
        smp.r = at.x[2] - at.x[0];
        smp.t_kin = 0.5 * c.m1 * at.v[0] * at.v[0] +
                    0.5 * c.m3 * at.v[2] * at.v[2];
        smp.u_pot = c.U0 * r0 * r0 / (smp.r * smp.r);
        smp.residual = smp.t_kin + smp.u_pot - E;
        smp.r_theory = std::sqrt(r0 * r0 + t * t * E / a);
        out.samples.push_back(smp);
    }
    return out;
}

struct SweepRow {
    double m2 = 0.0;
    double max_residual = 0.0;
    double max_r_error = 0.0;
    std::size_t events_used = 0;
};

/// One row per m2: worst |T + U - E| and worst |r - r_theory| over the
/// sample times. Both columns shrink as m2 -> 0.
inline std::vector<SweepRow> sweep(const LimitConfig& c,
                                   const SimLimits& base_limits = {}) {
    validate(c);
    std::vector<SweepRow> rows;
    for (double m2 : c.m2_list) {
        LimitObservables obs = run_limit_point(c, m2, base_limits);
        SweepRow row;
        row.m2 = m2;
        row.events_used = obs.events_used;
        for (const auto& smp : obs.samples) {
            row.max_residual = std::max(row.max_residual,
                                        std::abs(smp.residual));
            row.max_r_error =
                std::max(row.max_r_error, std::abs(smp.r - smp.r_theory));
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace billiards
