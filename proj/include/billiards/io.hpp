#pragma once

#include <cstdint>
#include <ostream>

#include <json.hpp>

#include "billiards/gravlimit.hpp"
#include "billiards/spectral.hpp"

namespace billiards {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Full simulation configuration as read from a JSON file. Positions and
/// velocities may be absent for the static subcommands.
struct SystemConfig {
    Vec masses;
    Vec positions;
    Vec velocities;
    SimLimits limits;
    std::uint64_t seed = 0;

    bool has_state() const {
        return !positions.empty() && !velocities.empty();
    }

    MassVector mass_vector() const { return MassVector(masses); }

    ParticleState state() const {
        if (!has_state())
            throw ConfigError("config: positions and velocities are required");
        ParticleState s;
        s.t = 0.0;
        s.x = positions;
        s.v = velocities;
        return s;
    }
};

namespace detail {

inline Vec parse_vec(const nlohmann::json& j, const char* key) {
    Vec out;
    for (const auto& x : j.at(key)) {
        if (!x.is_number()) throw ConfigError(std::string(key) + ": not a number");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace detail

inline SystemConfig parse_system_config(const nlohmann::json& j) {
    try {
        SystemConfig c;
        if (!j.contains("masses")) throw ConfigError("config: masses required");
        c.masses = detail::parse_vec(j, "masses");
        if (j.contains("positions"))
            c.positions = detail::parse_vec(j, "positions");
        if (j.contains("velocities"))
            c.velocities = detail::parse_vec(j, "velocities");
        if (c.positions.size() != c.velocities.size())
            throw ConfigError("config: positions/velocities length mismatch");
        if (!c.positions.empty() && c.positions.size() != c.masses.size())
            throw ConfigError("config: positions length != masses length");
        if (j.contains("limits")) {
            const auto& l = j.at("limits");
            if (l.contains("max_events"))
                c.limits.max_events = l.at("max_events").get<std::size_t>();
            if (l.contains("t_max"))
                c.limits.t_max = l.at("t_max").get<double>();
            if (l.contains("collapse_window"))
                c.limits.collapse_window =
                    l.at("collapse_window").get<std::size_t>();
            if (l.contains("collapse_theta"))
                c.limits.collapse_theta = l.at("collapse_theta").get<double>();
            if (l.contains("collapse_eps"))
                c.limits.collapse_eps = l.at("collapse_eps").get<double>();
        }
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        for (std::size_t i = 0; i + 1 < c.positions.size(); ++i)
            if (c.positions[i] > c.positions[i + 1])
                throw ConfigError("config: positions must be weakly ordered");
        MassVector probe(c.masses);  // shape validation
        return c;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline nlohmann::json emit_system_config(const SystemConfig& c) {
    nlohmann::json j;
    j["masses"] = c.masses;
    if (c.has_state()) {
        j["positions"] = c.positions;
        j["velocities"] = c.velocities;
    }
    j["limits"] = {{"max_events", c.limits.max_events},
                   {"t_max", c.limits.t_max},
                   {"collapse_window", c.limits.collapse_window},
                   {"collapse_theta", c.limits.collapse_theta},
                   {"collapse_eps", c.limits.collapse_eps}};
    j["seed"] = c.seed;
    return j;
}

inline LimitConfig parse_limit_config(const nlohmann::json& j) {
    try {
        LimitConfig c;
        c.m1 = j.at("m1").get<double>();
        c.m3 = j.at("m3").get<double>();
        c.x1_0 = j.at("x1_0").get<double>();
        c.U0 = j.at("U0").get<double>();
        if (j.contains("v2_sign")) c.v2_sign = j.at("v2_sign").get<int>();
        c.m2_list = detail::parse_vec(j, "m2_list");
        if (j.contains("sample_times"))
            c.sample_times = detail::parse_vec(j, "sample_times");
        validate(c);
        return c;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("limit config: ") + e.what());
    }
}

// ---- event log (JSON Lines; 1-based particle indices on the wire) ----

inline nlohmann::json event_to_json(const CollisionEvent& ev) {
    return {{"t", ev.t},
            {"pair", {ev.pair + 1, ev.pair + 2}},
            {"v_before", {ev.v_before[0], ev.v_before[1]}},
            {"v_after", {ev.v_after[0], ev.v_after[1]}},
            {"x_contact", ev.x_contact}};
}

inline nlohmann::json termination_to_json(const Termination& term) {
    nlohmann::json j{{"termination", to_string(term.kind)}};
    switch (term.kind) {
        case TerminationKind::FreeFlight:
            j["after"] = term.after;
            break;
        case TerminationKind::CollapseDetected:
            j["t_star"] = term.t_star;
            j["estimate_error"] = term.estimate_error;
            break;
        case TerminationKind::DirectMultipleCollision: {
            j["t"] = term.t;
            std::vector<std::size_t> parts;
            for (std::size_t p : term.particles) parts.push_back(p + 1);
            j["particles"] = parts;
            break;
        }
        case TerminationKind::EventBudgetExhausted:
            j["t"] = term.t;
            break;
    }
    return j;
}

inline void write_event_log(std::ostream& os, const Trajectory& traj) {
    for (const auto& ev : traj.events) os << event_to_json(ev) << '\n';
    os << termination_to_json(traj.termination) << '\n';
}

// ---- reports ----

inline nlohmann::json signature_to_json(const Signature& s) {
    return {{"p", s.p}, {"q", s.q}, {"degenerate", s.degenerate}};
}

inline nlohmann::json classify_report(const MassVector& m) {
    nlohmann::json j;
    j["signature"] = signature_to_json(full_signature(m));
    const Signature rs = restricted_signature(m);
    j["restricted_signature"] = signature_to_json(rs);
    const SystemClass cls = classify(m);
    j["class"] = to_string(cls.tag);
    j["gas_neg"] = cls.gas_neg;
    j["cone"] = cls.cone;
    j["mirrored"] = cls.mirrored;
    if (m.size() == 3)
        j["glashow_mittag"] = glashow_mittag(m[0], m[1], m[2]);
    if (rs.degenerate)
        j["predicted_behavior"] = "Degenerate";
    else if (rs.definite())
        j["predicted_behavior"] = "FiniteCollisions";
    else
        j["predicted_behavior"] = "CollapsePossible";
    return j;
}

inline nlohmann::json predict_report(const MassVector& m,
                                     const ParticleState& s) {
    const CollapsePrediction p = predict_collapse(m, s);
    nlohmann::json j;
    j["p_coeffs"] = {p.c0, p.c1, p.c2};
    nlohmann::json roots = nlohmann::json::array();
    if (p.n_roots >= 1) roots.push_back(p.s1);
    if (p.n_roots == 2) roots.push_back(p.s2);
    j["roots"] = roots;
    j["gas_neg"] = p.gas_neg;
    j["applicable"] = p.applicable;
    const double E = 0.5 * p.c2;
    j["energy"] = E;
    j["energy_sign"] = E > 0.0 ? 1 : (E < 0.0 ? -1 : 0);
    return j;
}

inline nlohmann::json spectral_report(const MassVector& m) {
    const ComposedMap3 cm = composed_map(m);
    nlohmann::json j;
    j["xi1"] = cm.xi1;
    j["xi2"] = cm.xi2;
    j["A1"] = {{cm.A1[0][0], cm.A1[0][1]}, {cm.A1[1][0], cm.A1[1][1]}};
    j["A2"] = {{cm.A2[0][0], cm.A2[0][1]}, {cm.A2[1][0], cm.A2[1][1]}};
    j["eigenvalues"] = {{{"re", cm.lambda1.real()}, {"im", cm.lambda1.imag()}},
                        {{"re", cm.lambda2.real()}, {"im", cm.lambda2.imag()}}};
    j["hyperbolic"] = cm.hyperbolic;
    j["trace"] = cm.trace();
    j["det"] = cm.det();
    return j;
}

inline void write_sweep_csv(std::ostream& os,
                            const std::vector<SweepRow>& rows) {
    os << "m2,max_residual,max_r_error,events_used\n";
    for (const auto& r : rows) {
        nlohmann::json m2 = r.m2, res = r.max_residual, err = r.max_r_error;
        os << m2.dump() << ',' << res.dump() << ',' << err.dump() << ','
           << r.events_used << '\n';
    }
}

}  // namespace billiards
