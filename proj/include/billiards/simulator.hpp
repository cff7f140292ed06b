#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "billiards/collision.hpp"

namespace billiards {

/// Phase point of the N-particle system. Positions are kept weakly ordered;
/// the collision law preserves that ordering.
struct ParticleState {
    double t = 0.0;
    Vec x;
    Vec v;

    bool ordered() const {
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            if (x[i] > x[i + 1]) return false;
        return true;
    }
};

/// One resolved collision of the adjacent pair (i, i+1), 0-based.
struct CollisionEvent {
    double t = 0.0;
    std::size_t pair = 0;  // pair (pair, pair+1)
    std::array<double, 2> v_before{};
    std::array<double, 2> v_after{};
    double x_contact = 0.0;
};

enum class TerminationKind {
    FreeFlight,
    CollapseDetected,
    DirectMultipleCollision,
    EventBudgetExhausted,
};

struct Termination {
    TerminationKind kind = TerminationKind::FreeFlight;
    // FreeFlight: motion is collision-free from this time on (up to t_max)
    double after = 0.0;
    // CollapseDetected
    double t_star = 0.0;
    double estimate_error = 0.0;
    // DirectMultipleCollision
    double t = 0.0;
    std::vector<std::size_t> particles;
};

inline const char* to_string(TerminationKind k) {
    switch (k) {
        case TerminationKind::FreeFlight: return "FreeFlight";
        case TerminationKind::CollapseDetected: return "CollapseDetected";
        case TerminationKind::DirectMultipleCollision:
            return "DirectMultipleCollision";
        case TerminationKind::EventBudgetExhausted:
            return "EventBudgetExhausted";
    }
    return "?";
}

struct Trajectory {
    ParticleState initial;
    std::vector<CollisionEvent> events;
    Termination termination;
};

struct SimLimits {
    std::size_t max_events = 1'000'000;
    double t_max = 1e300;
    // collapse detector: blocks of collapse_window inter-event gaps must
    // shrink by collapse_theta, and the geometric tail estimate must drop
    // below collapse_eps relative to the elapsed time scale
    std::size_t collapse_window = 32;
    double collapse_theta = 0.95;
    double collapse_eps = 1e-13;
};

/// I(x) = Q(x) = sum_i m_i x_i^2
inline double moment_of_inertia(const MassVector& m, const Vec& x) {
    return quadratic(m, x);
}

/// Shift positions and boost velocities so that sum m_i x_i = 0 and
/// sum m_i v_i = 0. Requires M != 0; for M = 0 the momentum is
/// frame-independent and no such frame exists.
inline ParticleState center_of_mass_frame(const MassVector& m,
                                          const ParticleState& s) {
    require_same_size(m.size(), s.x, "center_of_mass_frame: x");
    require_same_size(m.size(), s.v, "center_of_mass_frame: v");
    const double M = m.total();
    if (m.sum_is_zero(M))
        throw ZeroTotalMass("center_of_mass_frame: total mass is zero");
    double cx = 0.0, cv = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        cx += m[i] * s.x[i];
        cv += m[i] * s.v[i];
    }
    cx /= M;
    cv /= M;
    ParticleState out = s;
    for (std::size_t i = 0; i < m.size(); ++i) {
        out.x[i] -= cx;
        out.v[i] -= cv;
    }
    return out;
}

struct NextCollision {
    double t_next = 0.0;  // absolute time
    double dt = 0.0;
    std::vector<std::size_t> pairs;  // pair indices i meaning (i, i+1)
};

namespace detail {

inline double stall_tol(double t) {
    return 32.0 * std::numeric_limits<double>::epsilon() *
           std::max(1.0, std::abs(t));
}

// candidate collision times of all approaching adjacent pairs
struct Candidate {
    double dt;
    std::size_t pair;
};

inline std::vector<Candidate> collision_candidates(const ParticleState& s) {
    std::vector<Candidate> out;
    const double vscale = std::max(1.0, max_abs(s.v));
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
        const double dv = s.v[i] - s.v[i + 1];
        if (dv > 1e-14 * vscale) {
            double dt = (s.x[i + 1] - s.x[i]) / dv;
            out.push_back({dt < 0.0 ? 0.0 : dt, i});
        }
    }
    return out;
}

}  // namespace detail

/// Earliest upcoming collision. Pairs whose collision times tie with the
/// minimum within eps_rel (relative to the step itself) are grouped as
/// simultaneous. Returns nullopt when no adjacent pair approaches.
inline std::optional<NextCollision> next_collision(const ParticleState& s,
                                                   double eps_rel = 1e-9) {
    auto cand = detail::collision_candidates(s);
    if (cand.empty()) return std::nullopt;
    double best = cand[0].dt;
    for (const auto& c : cand) best = std::min(best, c.dt);
    const double window = eps_rel * best + detail::stall_tol(s.t) / 8.0;
    NextCollision nc;
    nc.dt = best;
    nc.t_next = s.t + best;
    for (const auto& c : cand)
        if (c.dt - best <= window) nc.pairs.push_back(c.pair);
    return nc;
}

/// Advance to the common contact time and resolve each listed pair.
/// Throws PreconditionViolation when the pairs share a particle (a direct
/// multiple collision has no two-body resolution).
inline std::vector<CollisionEvent> step(const MassVector& m, ParticleState& s,
                                        double dt,
                                        const std::vector<std::size_t>& pairs) {
    for (std::size_t k = 0; k + 1 < pairs.size(); ++k)
        if (pairs[k + 1] <= pairs[k] + 1)
            throw PreconditionViolation(
                "step: simultaneous pairs share a particle");
    for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] += s.v[i] * dt;
    s.t += dt;
    std::vector<CollisionEvent> out;
    out.reserve(pairs.size());
    for (std::size_t i : pairs) {
        m.require_pair(i, i + 1);
        // snap both coordinates to the common contact point; suppresses
        // drift-induced ordering violations
        const double contact = 0.5 * (s.x[i] + s.x[i + 1]);
        s.x[i] = s.x[i + 1] = contact;
        CollisionEvent ev;
        ev.t = s.t;
        ev.pair = i;
        ev.v_before = {s.v[i], s.v[i + 1]};
        apply_collision(m, i, i + 1, s.v);
        ev.v_after = {s.v[i], s.v[i + 1]};
        ev.x_contact = contact;
        out.push_back(ev);
    }
    return out;
}

using StepObserver = std::function<void(const ParticleState&)>;

/// Event-driven evolution until free flight, a detected collapse, a direct
/// multiple collision, or the event budget runs out.
///
/// Collapse is an accumulation of infinitely many collisions at a finite
/// time; three signatures identify it:
///  - block gate: sums of collapse_window consecutive gaps shrink
///    geometrically and the extrapolated tail is below collapse_eps,
///  - stall gate: collision times keep resolving below the floating-point
///    resolution of t while the configuration has contracted,
///  - tie gate: adjacent pairs that both collided repeatedly in the recent
///    past reach an exactly tied collision time (an indirect multiple
///    collision, which is the collapse point itself).
/// An exactly tied shared-pair time without that history is a direct
/// multiple collision and ends the trajectory with an error verdict.
inline Trajectory simulate(const MassVector& m, const ParticleState& initial,
                           const SimLimits& limits = {},
                           const StepObserver& observer = {}) {
    require_same_size(m.size(), initial.x, "simulate: x");
    require_same_size(m.size(), initial.v, "simulate: v");
    if (!initial.ordered())
        throw PreconditionViolation("simulate: positions must be ordered");

    Trajectory traj;
    traj.initial = initial;
    ParticleState s = initial;

    const double init_diam = s.x.back() - s.x.front();
    const std::size_t W = std::max<std::size_t>(2, limits.collapse_window);
    std::deque<double> gaps;          // last 2W inter-step gaps
    std::size_t steps_since_block = 0;
    std::size_t n_stall = 0;
    constexpr std::size_t kStallRuns = 8;

    // recent collision counts per pair, for the direct/indirect distinction
    const std::size_t recent_span = 4 * W;
    std::deque<std::size_t> recent_pairs;
    std::vector<std::size_t> recent_count(m.size(), 0);
    auto remember_pair = [&](std::size_t p) {
        recent_pairs.push_back(p);
        ++recent_count[p];
        if (recent_pairs.size() > recent_span) {
            --recent_count[recent_pairs.front()];
            recent_pairs.pop_front();
        }
    };

    while (true) {
        if (traj.events.size() >= limits.max_events) {
            traj.termination.kind = TerminationKind::EventBudgetExhausted;
            traj.termination.t = s.t;
            return traj;
        }
        auto cand = detail::collision_candidates(s);
        if (cand.empty()) {
            traj.termination.kind = TerminationKind::FreeFlight;
            traj.termination.after = s.t;
            return traj;
        }
        double best = cand[0].dt;
        for (const auto& c : cand) best = std::min(best, c.dt);
        if (s.t + best > limits.t_max) {
            traj.termination.kind = TerminationKind::FreeFlight;
            traj.termination.after = s.t;
            return traj;
        }

        const double stall = detail::stall_tol(s.t);
        std::vector<std::size_t> pairs;
        const double window = 1e-9 * best + stall / 8.0;
        for (const auto& c : cand)
            if (c.dt - best <= window) pairs.push_back(c.pair);

        if (best <= stall) {
            ++n_stall;
            if (n_stall >= kStallRuns &&
                s.x.back() - s.x.front() <= 1e-2 * std::abs(init_diam)) {
                traj.termination.kind = TerminationKind::CollapseDetected;
                traj.termination.t_star = s.t;
                traj.termination.estimate_error =
                    double(kStallRuns) * stall;
                return traj;
            }
            pairs.resize(1);  // sub-resolution ties are not true simultaneity
        } else {
            n_stall = 0;
            bool shared = false;
            for (std::size_t k = 0; k + 1 < pairs.size(); ++k)
                if (pairs[k + 1] == pairs[k] + 1) shared = true;
            if (shared) {
                // only an ulp-exact tie is a genuine multiple collision
                const double tie_tol =
                    32.0 * std::numeric_limits<double>::epsilon() * best +
                    stall;
                std::vector<std::size_t> exact;
                std::size_t earliest = pairs[0];
                double earliest_dt = best * 2.0;
                for (const auto& c : cand) {
                    if (c.dt - best <= tie_tol) exact.push_back(c.pair);
                    if (c.dt < earliest_dt) {
                        earliest_dt = c.dt;
                        earliest = c.pair;
                    }
                }
                bool exact_shared = false;
                for (std::size_t k = 0; k + 1 < exact.size(); ++k)
                    if (exact[k + 1] == exact[k] + 1) exact_shared = true;
                if (exact_shared) {
                    bool recurrent = true;
                    for (std::size_t p : exact)
                        if (recent_count[p] < 2) recurrent = false;
                    if (recurrent) {
                        // indirect multiple collision: the collapse point
                        traj.termination.kind =
                            TerminationKind::CollapseDetected;
                        traj.termination.t_star = s.t + best;
                        traj.termination.estimate_error = tie_tol + stall;
                        return traj;
                    }
                    traj.termination.kind =
                        TerminationKind::DirectMultipleCollision;
                    traj.termination.t = s.t + best;
                    std::vector<std::size_t> parts;
                    for (std::size_t p : exact) {
                        parts.push_back(p);
                        parts.push_back(p + 1);
                    }
                    std::sort(parts.begin(), parts.end());
                    parts.erase(std::unique(parts.begin(), parts.end()),
                                parts.end());
                    traj.termination.particles = parts;
                    return traj;
                }
                pairs.assign(1, earliest);  // resolve strictly-earliest first
            }
        }

        auto evs = step(m, s, best, pairs);
        for (auto& ev : evs) {
            remember_pair(ev.pair);
            traj.events.push_back(ev);
        }
        if (observer) observer(s);

        gaps.push_back(best);
        if (gaps.size() > 2 * W) gaps.pop_front();
        ++steps_since_block;
        if (gaps.size() == 2 * W && steps_since_block >= W) {
            steps_since_block = 0;
            double s_old = 0.0, s_new = 0.0;
            for (std::size_t k = 0; k < W; ++k) s_old += gaps[k];
            for (std::size_t k = W; k < 2 * W; ++k) s_new += gaps[k];
            if (s_old > 0.0 && s_new <= limits.collapse_theta * s_old) {
                const double r = s_new / s_old;
                const double tail = s_new * r / (1.0 - r);
                if (tail < limits.collapse_eps * std::max(1.0, std::abs(s.t))) {
                    traj.termination.kind = TerminationKind::CollapseDetected;
                    traj.termination.t_star = s.t + tail;
                    traj.termination.estimate_error = tail;
                    return traj;
                }
            }
        }
    }
}

/// Quadratic evolution of the moment of inertia:
/// p(tau) = I(x0) + 2 tau B(x0, v0) + 2 tau^2 E, tau elapsed since the
/// initial state. Along any solution I(x(tau)) = p(tau).
struct CollapsePrediction {
    double c0 = 0.0;  // I(x0)
    double c1 = 0.0;  // 2 B(x0, v0)
    double c2 = 0.0;  // 2 E
    int n_roots = 0;
    double s1 = 0.0;  // roots, s1 <= s2, elapsed time
    double s2 = 0.0;
    bool applicable = true;  // false for trivial solutions (all v equal)
    bool gas_neg = false;

    double eval(double tau) const { return c0 + c1 * tau + c2 * tau * tau; }
};

inline CollapsePrediction predict_collapse(const MassVector& m,
                                           const ParticleState& s) {
    require_same_size(m.size(), s.x, "predict_collapse: x");
    require_same_size(m.size(), s.v, "predict_collapse: v");
    CollapsePrediction p;
    p.c0 = quadratic(m, s.x);
    p.c1 = 2.0 * bilinear(m, s.x, s.v);
    p.c2 = quadratic(m, s.v);  // 2E
    p.gas_neg = gas_neg_condition(m);

    const double vscale = std::max(1.0, max_abs(s.v));
    p.applicable = false;
    for (std::size_t i = 0; i + 1 < s.v.size(); ++i)
        if (std::abs(s.v[i] - s.v[i + 1]) > 1e-14 * vscale) p.applicable = true;

    const double ms = std::max(1.0, max_abs(m.values()));
    const double vs = std::max(1.0, max_abs(s.v));
    const double xs = std::max(1.0, max_abs(s.x));
    if (std::abs(p.c2) < 1e-14 * ms * vs * vs) {
        // energy (near) zero: p is linear
        if (std::abs(p.c1) < 1e-14 * ms * xs * vs) {
            p.n_roots = 0;
        } else {
            p.n_roots = 1;
            p.s1 = p.s2 = -p.c0 / p.c1;
        }
        return p;
    }
    const double disc = p.c1 * p.c1 - 4.0 * p.c2 * p.c0;
    if (disc < 0.0) {
        p.n_roots = 0;
        return p;
    }
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (p.c1 + (p.c1 < 0.0 ? -sq : sq));
    double r1 = q / p.c2;
    double r2 = (q == 0.0) ? 0.0 : p.c0 / q;
    if (r1 > r2) std::swap(r1, r2);
    p.n_roots = disc == 0.0 ? 1 : 2;
    p.s1 = r1;
    p.s2 = r2;
    return p;
}

/// Piecewise-linear state at time t, replayed from the event log with the
/// same contact snapping the run used.
inline ParticleState state_at(const MassVector& m, const Trajectory& traj,
                              double t) {
    if (t < traj.initial.t)
        throw PreconditionViolation("state_at: t before initial time");
    ParticleState s = traj.initial;
    for (const auto& ev : traj.events) {
        if (ev.t > t) break;
        const double dt = ev.t - s.t;
        for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] += s.v[i] * dt;
        s.t = ev.t;
        const double contact = 0.5 * (s.x[ev.pair] + s.x[ev.pair + 1]);
        s.x[ev.pair] = s.x[ev.pair + 1] = contact;
        s.v[ev.pair] = ev.v_after[0];
        s.v[ev.pair + 1] = ev.v_after[1];
    }
    const double dt = t - s.t;
    for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] += s.v[i] * dt;
    s.t = t;
    return s;
}

/// Unfolding identity: T_1 o ... o T_n (x(t)) = x(0) + t v(0) for
/// t_n <= t <= t_{n+1}. Returns the max-norm residual of that identity,
/// composing the recorded event maps in order.
inline double unfold_residual(const MassVector& m, const Trajectory& traj,
                              double t) {
    if (t < traj.initial.t)
        throw PreconditionViolation("unfold_residual: t before initial time");
    double t_end = std::numeric_limits<double>::infinity();
    switch (traj.termination.kind) {
        case TerminationKind::FreeFlight: break;
        case TerminationKind::CollapseDetected:
            t_end = traj.termination.t_star;
            break;
        case TerminationKind::DirectMultipleCollision:
            t_end = traj.termination.t;
            break;
        case TerminationKind::EventBudgetExhausted:
            t_end = traj.events.empty() ? traj.initial.t
                                        : traj.events.back().t;
            break;
    }
    if (t > t_end)
        throw PreconditionViolation("unfold_residual: t beyond simulated range");
    ParticleState s = state_at(m, traj, t);
    Vec y = s.x;
    // apply T_n first, then T_{n-1}, ..., T_1
    for (auto it = traj.events.rbegin(); it != traj.events.rend(); ++it) {
        if (it->t > t) continue;
        apply_collision(m, it->pair, it->pair + 1, y);
    }
    const double tau = t - traj.initial.t;
    double worst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double straight = traj.initial.x[i] + tau * traj.initial.v[i];
        worst = std::max(worst, std::abs(y[i] - straight));
    }
    return worst;
}

/// Under the cone condition, I(x) > 0 for every nonzero ordered x in P0.
inline bool cone_positivity_check(const MassVector& m, const Vec& x) {
    require_same_size(m.size(), x, "cone_positivity_check: x");
    if (!cone_condition(m))
        throw PreconditionViolation(
            "cone_positivity_check: masses fail the cone condition");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (x[i] > x[i + 1])
            throw PreconditionViolation("cone_positivity_check: x not ordered");
    double mom = 0.0, mom_scale = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        mom += m[i] * x[i];
        mom_scale += std::abs(m[i] * x[i]);
    }
    if (std::abs(mom) > 1e-9 * std::max(mom_scale, 1e-300))
        throw PreconditionViolation("cone_positivity_check: x not in P0");
    if (max_abs(x) == 0.0) return true;  // equality case
    return moment_of_inertia(m, x) > 0.0;
}

}  // namespace billiards
