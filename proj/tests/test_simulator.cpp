#include <gtest/gtest.h>

#include "billiards/simulator.hpp"
#include "oracles.hpp"

using namespace billiards;

namespace {

ParticleState make_state(Vec x, Vec v) {
    ParticleState s;
    s.t = 0.0;
    s.x = std::move(x);
    s.v = std::move(v);
    return s;
}

}  // namespace

TEST(MomentOfInertia, Examples) {
    EXPECT_DOUBLE_EQ(moment_of_inertia(MassVector({1, -0.5, 1}), {0, 0, 0}),
                     0.0);
    EXPECT_DOUBLE_EQ(moment_of_inertia(MassVector({1, -0.5, 1}), {-1, 0, 1}),
                     2.0);
    EXPECT_DOUBLE_EQ(moment_of_inertia(MassVector({1, 1}), {1, 2}), 5.0);
}

TEST(CenterOfMassFrame, Examples) {
    MassVector two({1, 1});
    const ParticleState centered =
        center_of_mass_frame(two, make_state({0, 2}, {0, 0}));
    EXPECT_DOUBLE_EQ(centered.x[0], -1.0);
    EXPECT_DOUBLE_EQ(centered.x[1], 1.0);

    MassVector g({1, -0.5, 1});
    const ParticleState c2 =
        center_of_mass_frame(g, make_state({-1, 0, 2}, {0, 0, 0}));
    EXPECT_NEAR(c2.x[0], -5.0 / 3.0, 1e-15);
    EXPECT_NEAR(c2.x[1], -2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c2.x[2], 4.0 / 3.0, 1e-15);

    // already centered: unchanged
    const ParticleState again = center_of_mass_frame(g, c2);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(again.x[i], c2.x[i], 1e-15);
        EXPECT_NEAR(again.v[i], c2.v[i], 1e-15);
    }

    EXPECT_THROW(
        center_of_mass_frame(MassVector({1, -1}), make_state({0, 1}, {0, 0})),
        ZeroTotalMass);
}

TEST(NextCollision, Examples) {
    // all velocities equal: the trivial solution, no collision
    EXPECT_FALSE(
        next_collision(make_state({0, 1, 2}, {0.7, 0.7, 0.7})).has_value());

    const auto one = next_collision(make_state({0, 1}, {1, 0}));
    ASSERT_TRUE(one.has_value());
    EXPECT_DOUBLE_EQ(one->t_next, 1.0);
    ASSERT_EQ(one->pairs.size(), 1u);
    EXPECT_EQ(one->pairs[0], 0u);

    // two independent simultaneous collisions
    const auto two = next_collision(make_state({0, 1, 2, 3}, {1, 0, 1, 0}));
    ASSERT_TRUE(two.has_value());
    EXPECT_DOUBLE_EQ(two->t_next, 1.0);
    ASSERT_EQ(two->pairs.size(), 2u);
    EXPECT_EQ(two->pairs[0], 0u);
    EXPECT_EQ(two->pairs[1], 2u);

    // separating particles never collide
    EXPECT_FALSE(next_collision(make_state({0, 1}, {-1, 1})).has_value());
}

TEST(Step, EqualMassesSwap) {
    MassVector m({1, 1});
    ParticleState s = make_state({0, 1}, {1, -1});
    const auto evs = step(m, s, 0.5, {0});
    ASSERT_EQ(evs.size(), 1u);
    EXPECT_DOUBLE_EQ(s.t, 0.5);
    EXPECT_DOUBLE_EQ(s.v[0], -1.0);
    EXPECT_DOUBLE_EQ(s.v[1], 1.0);
    EXPECT_DOUBLE_EQ(evs[0].x_contact, 0.5);
}

TEST(Step, GravitonContact) {
    MassVector m({1, -0.5, 1});
    ParticleState s = make_state({0, 0, 1}, {0, -1, 0});
    const auto evs = step(m, s, 0.0, {0});
    ASSERT_EQ(evs.size(), 1u);
    EXPECT_DOUBLE_EQ(s.v[0], 2.0);
    EXPECT_DOUBLE_EQ(s.v[1], 3.0);
    EXPECT_DOUBLE_EQ(s.v[2], 0.0);
    EXPECT_TRUE(s.ordered());
}

TEST(Step, SharedPairRejected) {
    MassVector m({1, 1, 1});
    ParticleState s = make_state({0, 0, 0}, {1, 0, -1});
    EXPECT_THROW(step(m, s, 0.0, {0, 1}), PreconditionViolation);
}

TEST(Simulate, TwoBodySingleEvent) {
    MassVector m({1, 1});
    const Trajectory traj = simulate(m, make_state({0, 1}, {1, -1}));
    EXPECT_EQ(traj.termination.kind, TerminationKind::FreeFlight);
    ASSERT_EQ(traj.events.size(), 1u);
    EXPECT_DOUBLE_EQ(traj.events[0].t, 0.5);
    EXPECT_DOUBLE_EQ(traj.events[0].v_after[0], -1.0);
    EXPECT_DOUBLE_EQ(traj.events[0].v_after[1], 1.0);
}

TEST(Simulate, SimultaneousIndependentPairs) {
    MassVector m({1, 1, 1, 1});
    const Trajectory traj = simulate(m, make_state({0, 1, 2, 3}, {1, 0, 1, 0}));
    ASSERT_GE(traj.events.size(), 2u);
    EXPECT_DOUBLE_EQ(traj.events[0].t, 1.0);
    EXPECT_DOUBLE_EQ(traj.events[1].t, 1.0);
    EXPECT_EQ(traj.events[0].pair, 0u);
    EXPECT_EQ(traj.events[1].pair, 2u);
    EXPECT_EQ(traj.termination.kind, TerminationKind::FreeFlight);
}

TEST(Simulate, DirectTripleCollision) {
    MassVector m({1, 1, 1});
    const Trajectory traj = simulate(m, make_state({-1, 0, 1}, {1, 0, -1}));
    EXPECT_EQ(traj.termination.kind, TerminationKind::DirectMultipleCollision);
    EXPECT_DOUBLE_EQ(traj.termination.t, 1.0);
    EXPECT_EQ(traj.termination.particles, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Simulate, FreeFlightBeforeTMax) {
    MassVector m({1, 1});
    SimLimits lim;
    lim.t_max = 5.0;
    const Trajectory traj = simulate(m, make_state({0, 10}, {1, 0}), lim);
    EXPECT_EQ(traj.termination.kind, TerminationKind::FreeFlight);
    EXPECT_TRUE(traj.events.empty());
}

TEST(Simulate, EventBudget) {
    MassVector m({1, -0.5, 1});
    SimLimits lim;
    lim.max_events = 5;
    const ParticleState s = center_of_mass_frame(
        m, make_state({-1, 0, 1}, {0, 2, 0}));
    const Trajectory traj = simulate(m, s, lim);
    EXPECT_EQ(traj.termination.kind, TerminationKind::EventBudgetExhausted);
    EXPECT_EQ(traj.events.size(), 5u);
}

// Canonical graviton run: masses (1, -1/2, 1) from rest-frame data
// x = (-1, 0, 1), v = (0, 2, 0) boosted into the center-of-momentum frame.
// There I0 = 2, B(x0, v0) = 0, E = -4/3, so p(t) = 2 - (8/3) t^2 with roots
// +-sqrt(3)/2; the collision times accumulate at s2 = sqrt(3)/2.
TEST(Simulate, CanonicalGravitonCollapse) {
    MassVector m({1, -0.5, 1});
    const ParticleState s =
        center_of_mass_frame(m, make_state({-1, 0, 1}, {0, 2, 0}));
    EXPECT_NEAR(kinetic_energy(m, s.v), -4.0 / 3.0, 1e-14);

    const CollapsePrediction p = predict_collapse(m, s);
    const double s2 = std::sqrt(3.0) / 2.0;
    ASSERT_EQ(p.n_roots, 2);
    EXPECT_NEAR(p.s1, -s2, 1e-14);
    EXPECT_NEAR(p.s2, s2, 1e-14);

    const Trajectory traj = simulate(m, s);
    ASSERT_EQ(traj.termination.kind, TerminationKind::CollapseDetected);
    EXPECT_NEAR(traj.termination.t_star, s2, 1e-6 * s2);

    // the diameter contracts to nothing
    const ParticleState last = state_at(m, traj, traj.events.back().t);
    const double diam0 = s.x.back() - s.x.front();
    EXPECT_LE(last.x.back() - last.x.front(), 1e-5 * diam0);

    // time reversal collapses toward -s1
    ParticleState rev = s;
    for (auto& vi : rev.v) vi = -vi;
    const Trajectory back = simulate(m, rev);
    ASSERT_EQ(back.termination.kind, TerminationKind::CollapseDetected);
    EXPECT_NEAR(back.termination.t_star, -p.s1, 1e-6 * s2);
}

// In any inertial frame the collision times are the same; only the
// prediction quadratic needs the center-of-momentum frame.
TEST(Simulate, CollapseTimeIsFrameIndependent) {
    MassVector m({1, -0.5, 1});
    const Trajectory raw = simulate(m, make_state({-1, 0, 1}, {0, 2, 0}));
    ASSERT_EQ(raw.termination.kind, TerminationKind::CollapseDetected);
    EXPECT_NEAR(raw.termination.t_star, std::sqrt(3.0) / 2.0, 1e-6);
}

TEST(Simulate, CompressorCollapsesWithPositiveEnergy) {
    // if v_1 > 0 in the center-of-mass frame, a compressor must collapse,
    // E >= 0 included
    MassVector m({1, -0.4, -0.4, -0.4});
    EXPECT_EQ(classify(m).tag, SystemTag::Compressor);
    const ParticleState s =
        center_of_mass_frame(m, make_state({0, 1, 2, 3}, {1, 0, 0, 0}));
    EXPECT_GT(s.v[0], 0.0);
    EXPECT_GT(kinetic_energy(m, s.v), 0.0);

    const Trajectory traj = simulate(m, s);
    ASSERT_EQ(traj.termination.kind, TerminationKind::CollapseDetected);
    // E > 0: both roots of p share a sign; forward collapse at the smaller
    const CollapsePrediction p = predict_collapse(m, s);
    ASSERT_EQ(p.n_roots, 2);
    EXPECT_GT(p.s1, 0.0);
    EXPECT_NEAR(traj.termination.t_star, p.s1, 1e-6 * p.s1);
}

TEST(Simulate, ZeroEnergyCollapse) {
    // lightlike velocity in P0: p(t) is linear with root -I0 / (2 B(x0,v0))
    MassVector m({1, -0.5, 1});
    const double alpha = (1.0 + std::sqrt(3.0)) / 4.0;
    const Vec v{alpha, 1.0, 0.5 - alpha};
    ASSERT_NEAR(kinetic_energy(m, v), 0.0, 1e-15);
    const ParticleState s = make_state({-1, 0, 1}, v);

    const CollapsePrediction p = predict_collapse(m, s);
    ASSERT_EQ(p.n_roots, 1);
    const double root = -p.c0 / p.c1;
    EXPECT_GT(root, 0.0);

    const Trajectory traj = simulate(m, s);
    ASSERT_EQ(traj.termination.kind, TerminationKind::CollapseDetected);
    EXPECT_NEAR(traj.termination.t_star, root, 1e-6 * root);
}

TEST(PredictCollapse, Examples) {
    MassVector m({1, -0.5, 1});
    const CollapsePrediction p =
        predict_collapse(m, make_state({-1, 0, 1}, {0, 2, 0}));
    EXPECT_DOUBLE_EQ(p.c0, 2.0);
    EXPECT_DOUBLE_EQ(p.c1, 0.0);
    EXPECT_DOUBLE_EQ(p.c2, -2.0);
    ASSERT_EQ(p.n_roots, 2);
    EXPECT_DOUBLE_EQ(p.s1, -1.0);
    EXPECT_DOUBLE_EQ(p.s2, 1.0);
    EXPECT_TRUE(p.gas_neg);
    EXPECT_TRUE(p.applicable);
}

TEST(PredictCollapse, TrivialSolutionNotApplicable) {
    MassVector m({1, -0.5, 1});
    const CollapsePrediction p =
        predict_collapse(m, make_state({-1, 0, 1}, {0.3, 0.3, 0.3}));
    EXPECT_FALSE(p.applicable);
    EXPECT_EQ(p.n_roots, 0);  // p(t) = I0 + t^2 M c^2 > 0 here
}

TEST(PredictCollapse, PositiveEnergyGasNegHasARoot) {
    // indefinite plane span{x0, v0} in P0 forces [B]^2 >= 2 E I0
    std::mt19937 rng(37);
    for (int trial = 0; trial < 200; ++trial) {
        MassVector m(oracles::random_gas_neg(rng, 3 + rng() % 3,
                                             trial % 2 == 0));
        billiards::ParticleState s;
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        s.x = oracles::random_ordered_positions(rng, m.size());
        s.v.resize(m.size());
        for (auto& vi : s.v) vi = u(rng);
        s = center_of_mass_frame(m, s);
        const CollapsePrediction p = predict_collapse(m, s);
        if (!p.applicable) continue;
        if (0.5 * p.c2 <= 1e-12) continue;  // want E > 0 here
        EXPECT_GE(p.n_roots, 1) << "E=" << 0.5 * p.c2;
        if (p.n_roots == 2) {
            EXPECT_GT(p.s1 * p.s2, 0.0);  // same sign
        }
    }
}

TEST(Conservation, PerEventResiduals) {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + rng() % 3;
        MassVector m(oracles::random_gas_neg(rng, n, trial % 2 == 0));
        const ParticleState s = oracles::random_negative_energy_state(rng, m);
        const Trajectory traj = simulate(m, s);
        ASSERT_EQ(traj.termination.kind, TerminationKind::CollapseDetected);
        double vmax = max_abs(s.v);
        for (const auto& ev : traj.events)
            vmax = std::max({vmax, std::abs(ev.v_after[0]),
                             std::abs(ev.v_after[1])});
        const double scale = std::max(1.0, vmax) *
                             std::max(1.0, max_abs(m.values()));
        for (const auto& ev : traj.events) {
            const double mi = m[ev.pair], mj = m[ev.pair + 1];
            const double dp = mi * (ev.v_after[0] - ev.v_before[0]) +
                              mj * (ev.v_after[1] - ev.v_before[1]);
            const double de =
                0.5 * mi *
                    (ev.v_after[0] * ev.v_after[0] -
                     ev.v_before[0] * ev.v_before[0]) +
                0.5 * mj *
                    (ev.v_after[1] * ev.v_after[1] -
                     ev.v_before[1] * ev.v_before[1]);
            EXPECT_LE(std::abs(dp), 1e-10 * scale);
            EXPECT_LE(std::abs(de), 1e-10 * scale * std::max(1.0, vmax));
            // the colliding pair separates (or stays in contact)
            EXPECT_GE(ev.v_after[1] - ev.v_after[0],
                      -1e-12 * std::max(1.0, vmax));
        }
    }
}

TEST(Ordering, PreservedThroughEvents) {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        MassVector m(oracles::random_gas_neg(rng, 3 + rng() % 3,
                                             trial % 2 == 0));
        const ParticleState s = oracles::random_negative_energy_state(rng, m);
        bool all_ordered = true;
        simulate(m, s, SimLimits{},
                 [&](const ParticleState& st) {
                     if (!st.ordered()) all_ordered = false;
                 });
        EXPECT_TRUE(all_ordered);
    }
}

TEST(FiniteCollisions, DefiniteSystemsFreeFly) {
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> vel(-3.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng() % 3;  // N <= 5
        MassVector m(oracles::random_definite(rng, n));
        ParticleState s;
        s.x = oracles::random_ordered_positions(rng, n);
        s.v.resize(n);
        for (auto& vi : s.v) vi = vel(rng);
        const Trajectory traj = simulate(m, s);
        EXPECT_EQ(traj.termination.kind, TerminationKind::FreeFlight);
        EXPECT_LT(traj.events.size(), 10000u);
    }
}

TEST(Unfold, ResidualAndInertiaIdentity) {
    MassVector m({1, -0.5, 1});
    const ParticleState s =
        center_of_mass_frame(m, make_state({-1, 0, 1}, {0, 2, 0}));
    const Trajectory traj = simulate(m, s);
    ASSERT_EQ(traj.termination.kind, TerminationKind::CollapseDetected);

    // before the first event the composition is empty and exact
    EXPECT_DOUBLE_EQ(unfold_residual(m, traj, 0.5 * traj.events[0].t), 0.0);

    const CollapsePrediction p = predict_collapse(m, s);
    const double scale = run_scale(s.x, s.v, m.values());
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> u(0.0, traj.events.back().t);
    for (int k = 0; k < 100; ++k) {
        const double t = u(rng);
        EXPECT_LE(unfold_residual(m, traj, t), 1e-8 * scale);
        const ParticleState at = state_at(m, traj, t);
        EXPECT_NEAR(moment_of_inertia(m, at.x), p.eval(t),
                    1e-8 * std::max(1.0, std::abs(p.c0)));
    }

    EXPECT_THROW(unfold_residual(m, traj, traj.termination.t_star * 1.5),
                 PreconditionViolation);
    EXPECT_THROW(unfold_residual(m, traj, -1.0), PreconditionViolation);
}

TEST(ConePositivity, Examples) {
    MassVector g({1, -0.5, 1});
    EXPECT_TRUE(cone_positivity_check(g, {0, 0, 0}));

    std::mt19937 rng(59);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const bool grav = trial % 2 == 0;
        MassVector m(oracles::random_gas_neg(rng, 3 + rng() % 3, grav));
        // random ordered vector in P0: center an ordered configuration
        ParticleState s;
        s.x = oracles::random_ordered_positions(rng, m.size());
        s.v.assign(m.size(), 0.0);
        s = center_of_mass_frame(m, s);
        EXPECT_TRUE(cone_positivity_check(m, s.x));
    }

    // masses failing the cone condition are rejected
    EXPECT_THROW(cone_positivity_check(MassVector({1, -2, 0.5}), {0, 0, 0}),
                 PreconditionViolation);
    // non-ordered and non-P0 inputs are rejected
    EXPECT_THROW(cone_positivity_check(g, {1, 0, -1}), PreconditionViolation);
    EXPECT_THROW(cone_positivity_check(g, {0, 1, 2}), PreconditionViolation);
}

TEST(GlobalCollapse, EveryPairAccumulates) {
    std::mt19937 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + rng() % 3;
        MassVector m(oracles::random_gas_neg(rng, n, trial % 2 == 0));
        const ParticleState s = oracles::random_negative_energy_state(rng, m);
        const Trajectory traj = simulate(m, s);
        ASSERT_EQ(traj.termination.kind, TerminationKind::CollapseDetected);
        const double t_star = traj.termination.t_star;
        const double span = std::max(1.0, std::abs(t_star));
        std::vector<double> last(n - 1,
                                 -std::numeric_limits<double>::infinity());
        for (const auto& ev : traj.events) last[ev.pair] = ev.t;
        for (std::size_t i = 0; i + 1 < n; ++i)
            EXPECT_GT(last[i], t_star - 1e-4 * span) << "pair " << i;
    }
}

TEST(CompressorGeometry, NeverRightOfCenterOfMass) {
    std::mt19937 rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + rng() % 3;
        MassVector m(oracles::random_gas_neg(rng, n, false));
        ASSERT_EQ(classify(m).tag, SystemTag::Compressor);
        const ParticleState s = oracles::random_negative_energy_state(rng, m);
        const double scale = run_scale(s.x, s.v, m.values());
        double max_x = max_abs(s.x) > 0 ? s.x.back() : 0.0;
        simulate(m, s, SimLimits{}, [&](const ParticleState& st) {
            max_x = std::max(max_x, st.x.back());
        });
        EXPECT_LE(max_x, 1e-10 * scale);
    }
}
