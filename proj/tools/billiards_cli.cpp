// signed-billiards: event-driven simulation and analysis of one-dimensional
// elastic-collision systems with signed masses.
//
// Subcommands: classify, simulate, predict, spectral, limit-sweep.
// Exit codes: 0 ok, 2 invalid config, 3 direct multiple collision,
// 4 event budget exhausted, 5 I/O failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "billiards/io.hpp"

namespace {

int log_level() {
    const char* env = std::getenv("SIGNED_BILLIARDS_LOG");
    if (!env || !*env) return 0;
    return std::atoi(env);
}

void logv(int level, const std::string& msg) {
    if (log_level() >= level) std::cerr << "[signed-billiards] " << msg << "\n";
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw billiards::ConfigError("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw billiards::ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return j;
}

// writes to the path, or stdout when none given; returns false on I/O failure
template <class Fn>
bool with_output(const std::optional<std::string>& path, Fn&& fn) {
    if (!path) {
        fn(std::cout);
        return static_cast<bool>(std::cout);
    }
    std::ofstream out(*path);
    if (!out) return false;
    fn(out);
    out.flush();
    return static_cast<bool>(out);
}

struct CommonOpts {
    std::string config_path;
    std::optional<std::string> out_path;
    std::optional<std::size_t> max_events;
    std::optional<double> t_max;
    bool emit_config = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_sim_flags = true) {
    cmd->add_option("--config", o.config_path, "JSON configuration file")
        ->required();
    cmd->add_option("--out", o.out_path, "output file (default: stdout)");
    if (with_sim_flags) {
        cmd->add_option("--max-events", o.max_events,
                        "override limits.max_events");
        cmd->add_option("--t-max", o.t_max, "override limits.t_max");
    }
    cmd->add_flag("--emit-config", o.emit_config,
                  "write the normalized config instead of running");
}

billiards::SystemConfig load_system_config(const CommonOpts& o) {
    billiards::SystemConfig c =
        billiards::parse_system_config(load_json(o.config_path));
    if (o.max_events) c.limits.max_events = *o.max_events;
    if (o.t_max) c.limits.t_max = *o.t_max;
    return c;
}

int emit_config_or(const CommonOpts& o, const billiards::SystemConfig& c) {
    const bool ok = with_output(o.out_path, [&](std::ostream& os) {
        os << billiards::emit_system_config(c).dump(2) << "\n";
    });
    return ok ? 0 : 5;
}

int run_classify(const CommonOpts& o) {
    auto cfg = load_system_config(o);
    if (o.emit_config) return emit_config_or(o, cfg);
    const billiards::MassVector m = cfg.mass_vector();
    const nlohmann::json report = billiards::classify_report(m);
    return with_output(o.out_path,
                       [&](std::ostream& os) { os << report.dump(2) << "\n"; })
               ? 0
               : 5;
}

int run_simulate(const CommonOpts& o) {
    auto cfg = load_system_config(o);
    if (o.emit_config) return emit_config_or(o, cfg);
    const billiards::MassVector m = cfg.mass_vector();
    const billiards::ParticleState s = cfg.state();
    logv(1, "simulate: N=" + std::to_string(m.size()) +
                " max_events=" + std::to_string(cfg.limits.max_events));
    const billiards::Trajectory traj = billiards::simulate(m, s, cfg.limits);
    logv(1, std::string("termination: ") +
                billiards::to_string(traj.termination.kind) + " after " +
                std::to_string(traj.events.size()) + " events");
    const bool ok = with_output(o.out_path, [&](std::ostream& os) {
        billiards::write_event_log(os, traj);
    });
    if (!ok) return 5;
    switch (traj.termination.kind) {
        case billiards::TerminationKind::FreeFlight:
        case billiards::TerminationKind::CollapseDetected:
            return 0;
        case billiards::TerminationKind::DirectMultipleCollision:
            return 3;
        case billiards::TerminationKind::EventBudgetExhausted:
            return 4;
    }
    return 0;
}

int run_predict(const CommonOpts& o) {
    auto cfg = load_system_config(o);
    if (o.emit_config) return emit_config_or(o, cfg);
    const billiards::MassVector m = cfg.mass_vector();
    const billiards::ParticleState s = cfg.state();
    const nlohmann::json report = billiards::predict_report(m, s);
    return with_output(o.out_path,
                       [&](std::ostream& os) { os << report.dump(2) << "\n"; })
               ? 0
               : 5;
}

int run_spectral(const CommonOpts& o) {
    auto cfg = load_system_config(o);
    if (o.emit_config) return emit_config_or(o, cfg);
    const billiards::MassVector m = cfg.mass_vector();
    const nlohmann::json report = billiards::spectral_report(m);
    return with_output(o.out_path,
                       [&](std::ostream& os) { os << report.dump(2) << "\n"; })
               ? 0
               : 5;
}

int run_limit_sweep(const CommonOpts& o) {
    const billiards::LimitConfig cfg =
        billiards::parse_limit_config(load_json(o.config_path));
    if (o.emit_config) {
        nlohmann::json j{{"m1", cfg.m1},
                         {"m3", cfg.m3},
                         {"x1_0", cfg.x1_0},
                         {"U0", cfg.U0},
                         {"v2_sign", cfg.v2_sign},
                         {"m2_list", cfg.m2_list},
                         {"sample_times", cfg.effective_sample_times()}};
        return with_output(o.out_path,
                           [&](std::ostream& os) { os << j.dump(2) << "\n"; })
                   ? 0
                   : 5;
    }
    billiards::SimLimits lim;
    if (o.max_events) lim.max_events = *o.max_events;
    logv(1, "limit-sweep: " + std::to_string(cfg.m2_list.size()) + " entries");
    const auto rows = billiards::sweep(cfg, lim);
    return with_output(o.out_path, [&](std::ostream& os) {
               billiards::write_sweep_csv(os, rows);
           })
               ? 0
               : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"signed-mass one-dimensional elastic collision simulator"};
    app.require_subcommand(1);

    CommonOpts classify_o, simulate_o, predict_o, spectral_o, sweep_o;
    CLI::App* c_classify =
        app.add_subcommand("classify", "mass-sign classification and signatures");
    add_common(c_classify, classify_o, false);
    CLI::App* c_simulate =
        app.add_subcommand("simulate", "run the event-driven simulation");
    add_common(c_simulate, simulate_o);
    CLI::App* c_predict = app.add_subcommand(
        "predict", "collapse-time prediction from the inertia quadratic");
    add_common(c_predict, predict_o, false);
    CLI::App* c_spectral = app.add_subcommand(
        "spectral", "3-particle composed collision map and eigenvalues");
    add_common(c_spectral, spectral_o, false);
    CLI::App* c_sweep = app.add_subcommand(
        "limit-sweep", "graviton limit m2 -> 0 convergence table");
    add_common(c_sweep, sweep_o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_classify->parsed()) return run_classify(classify_o);
        if (c_simulate->parsed()) return run_simulate(simulate_o);
        if (c_predict->parsed()) return run_predict(predict_o);
        if (c_spectral->parsed()) return run_spectral(spectral_o);
        if (c_sweep->parsed()) return run_limit_sweep(sweep_o);
    } catch (const billiards::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
