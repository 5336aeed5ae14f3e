// Command-line front end: single-shot solvers (pee / offline / staircase /
// multichannel / online) and the stochastic sweep scenarios, all driven by a
// JSON config. Schedules and traces print as CSV on stdout; summaries as
// JSON. Sweeps write result files under --out.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehsched/eeopt.hpp"
#include "ehsched/experiment.hpp"
#include "ehsched/multichannel.hpp"
#include "ehsched/offline.hpp"
#include "ehsched/online.hpp"
#include "ehsched/stochastics.hpp"

using namespace ehsched;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<double> step;
};

void write_or_print(const std::string& out_dir, const std::string& filename,
                    const std::string& content) {
    if (out_dir.empty()) {
        std::cout << content;
        return;
    }
    std::filesystem::create_directories(out_dir);
    std::ofstream out(std::filesystem::path(out_dir) / filename, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + filename + " under " + out_dir);
    out << content;
}

std::string schedule_csv(const PowerSchedule& schedule, const CircuitModel& circuit) {
    std::string csv = "start_s,end_s,power_W,total_power_W\n";
    for (const Segment& s : schedule.segments()) {
        csv += format_double(s.start_s) + ',' + format_double(s.end_s) + ',' +
               format_double(s.power_w) + ',' + format_double(circuit.total_power(s.power_w)) +
               '\n';
    }
    return csv;
}

std::string multi_schedule_csv(const MultiPowerSchedule& schedule, const CircuitModel& circuit) {
    std::string csv = "start_s,end_s";
    for (std::size_t k = 0; k < schedule.channel_count(); ++k)
        csv += ",power_" + std::to_string(k + 1) + "_W";
    csv += ",total_power_W\n";
    for (const MultiSegment& s : schedule.segments()) {
        csv += format_double(s.start_s) + ',' + format_double(s.end_s);
        for (double q : s.powers_w) csv += ',' + format_double(q);
        const double total = s.total_power();
        csv += ',' + format_double(total > 0.0 ? total + circuit.alpha_w : 0.0) + '\n';
    }
    return csv;
}

std::string trace_csv(const SimTrace& trace) {
    std::string csv = "time_s,E_s_J,power_W,on_fraction,bits\n";
    for (const TraceRecord& r : trace.records) {
        csv += format_double(r.time_s) + ',' + format_double(r.stored_energy_j) + ',' +
               format_double(r.commanded_power_w) + ',' + format_double(r.on_fraction) + ',' +
               format_double(r.bits) + '\n';
    }
    return csv;
}

ExperimentConfig load_with_overrides(const CommonArgs& args, Scenario expected) {
    ExperimentConfig cfg = load_config(args.config_path, scenario_name(expected));
    if (cfg.scenario != expected)
        throw std::invalid_argument("config: scenario is '" + scenario_name(cfg.scenario) +
                                    "' but the subcommand expects '" + scenario_name(expected) +
                                    "'");
    if (args.seed) cfg.base_seed = *args.seed;
    if (args.trials) cfg.trials = *args.trials;
    if (args.step) {
        if (!(*args.step > 0.0)) throw std::invalid_argument("--step must be positive");
        cfg.time_step_s = *args.step;
    }
    return cfg;
}

const RateModel& require_channel(const ExperimentConfig& cfg) {
    if (!cfg.channel) throw std::invalid_argument("config: scenario needs a channel");
    return *cfg.channel;
}

const EnergyProfile& require_profile(const ExperimentConfig& cfg) {
    if (!cfg.profile) throw std::invalid_argument("config: scenario needs a profile");
    return *cfg.profile;
}

int run_pee(const CommonArgs& args) {
    const ExperimentConfig cfg = load_with_overrides(args, Scenario::pee);
    const EePower ee = compute_p_ee(require_channel(cfg), cfg.circuit);
    const json summary{{"p_ee_w", ee.p_ee_w},
                       {"ee_bits_per_joule", ee.ee_bits_per_joule},
                       {"iterations", ee.iterations},
                       {"residual_w", ee.residual_w}};
    write_or_print(args.out_dir, "pee_summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_offline_like(const CommonArgs& args, Scenario scenario) {
    const ExperimentConfig cfg = load_with_overrides(args, scenario);
    const RateModel& model = require_channel(cfg);
    const EnergyProfile& profile = require_profile(cfg);

    PowerSchedule schedule;
    json summary;
    if (scenario == Scenario::offline) {
        const TwoPhaseSolution sol = solve_offline(profile, model, cfg.circuit);
        schedule = sol.schedule;
        summary = json{{"i_ee", sol.i_ee},
                       {"p_ee_w", sol.p_ee_w},
                       {"throughput_bits", sol.throughput_bits}};
    } else {
        schedule = solve_staircase(profile, model, cfg.circuit);
        const auto eval = evaluate_schedule(schedule, model, cfg.circuit, profile);
        summary = json{{"throughput_bits", eval.throughput_bits}, {"feasible", eval.feasible}};
    }
    const std::string name = scenario_name(scenario);
    write_or_print(args.out_dir, name + "_schedule.csv", schedule_csv(schedule, cfg.circuit));
    write_or_print(args.out_dir, name + "_summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_multichannel(const CommonArgs& args) {
    const ExperimentConfig cfg = load_with_overrides(args, Scenario::multichannel);
    if (cfg.multi_gains.empty())
        throw std::invalid_argument("config: multichannel needs channel.gains(_db)");
    const RateModel& base = require_channel(cfg);
    const MultiRateModel model(base.bandwidth(), base.noise_density(), base.gap(),
                               cfg.multi_gains);
    const MultiOfflineSolution sol = solve_offline_mc(require_profile(cfg), model, cfg.circuit);
    const json summary{{"i_ee", sol.scalar.i_ee},
                       {"p_ee_w", sol.scalar.p_ee_w},
                       {"channels", model.channel_count()},
                       {"throughput_bits", sol.throughput_bits}};
    write_or_print(args.out_dir, "multichannel_schedule.csv",
                   multi_schedule_csv(sol.schedule, cfg.circuit));
    write_or_print(args.out_dir, "multichannel_summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_online(const CommonArgs& args) {
    const ExperimentConfig cfg = load_with_overrides(args, Scenario::online);
    const RateModel& model = require_channel(cfg);
    if (!(cfg.arrival_rate_per_s > 0.0 && cfg.mean_energy_j > 0.0))
        throw std::invalid_argument("config: online needs stats");
    const ArrivalStats stats(cfg.arrival_rate_per_s, cfg.mean_energy_j);

    EnergyProfile profile = [&] {
        if (cfg.profile) return *cfg.profile;
        if (!cfg.generate_seed)
            throw std::invalid_argument("config: online needs a profile or generate.seed");
        return gen_compound_poisson(stats, cfg.horizon_s, *cfg.generate_seed,
                                    cfg.initial_energy_j);
    }();

    const SimOptions options{cfg.time_step_s, true};
    const SimTrace trace =
        simulate(cfg.online_policy, profile, model, cfg.circuit, stats, options);
    const json summary{{"policy", std::string(policy_name(cfg.online_policy))},
                       {"time_step_s", cfg.time_step_s},
                       {"throughput_bits", trace.throughput_bits},
                       {"residual_energy_j", trace.residual_energy_j},
                       {"enp_degenerate", trace.enp_degenerate}};
    write_or_print(args.out_dir, "online_trace.csv", trace_csv(trace));
    write_or_print(args.out_dir, "online_summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_sweep(const CommonArgs& args, Scenario scenario) {
    if (args.out_dir.empty()) throw std::invalid_argument("sweeps need --out");
    const ExperimentConfig cfg = load_with_overrides(args, scenario);
    ExperimentResult result;
    switch (scenario) {
        case Scenario::sweep_lambda: result = run_sweep_lambda(cfg); break;
        case Scenario::sweep_horizon: result = run_sweep_horizon(cfg); break;
        default: result = run_ofdma(cfg); break;
    }
    emit(result, args.out_dir);
    std::cout << "wrote " << result.rows.size() << " rows to " << args.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transmit-power scheduling for an energy-harvesting transmitter"};
    app.require_subcommand(1);

    CommonArgs args;
    const auto add_common = [&args](CLI::App* cmd, bool needs_out) {
        cmd->add_option("--config", args.config_path, "JSON config path")
            ->required()
            ->check(CLI::ExistingFile);
        auto* out = cmd->add_option("--out", args.out_dir, "output directory");
        if (needs_out) out->required();
        cmd->add_option("--seed", args.seed, "override base_seed");
        cmd->add_option("--trials", args.trials, "override trials");
        cmd->add_option("--step", args.step, "override time_step_s");
    };

    add_common(app.add_subcommand("pee", "EE-maximizing power for a channel"), false);
    add_common(app.add_subcommand("offline", "two-phase optimal schedule"), false);
    add_common(app.add_subcommand("staircase", "always-on staircase baseline"), false);
    add_common(app.add_subcommand("multichannel", "nested multi-channel schedule"), false);
    add_common(app.add_subcommand("online", "simulate one causal policy"), false);
    add_common(app.add_subcommand("sweep_lambda", "throughput vs arrival rate"), true);
    add_common(app.add_subcommand("sweep_horizon", "throughput vs block duration"), true);
    add_common(app.add_subcommand("ofdma", "OFDMA cell sweep"), true);

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "pee") return run_pee(args);
        if (cmd == "offline") return run_offline_like(args, Scenario::offline);
        if (cmd == "staircase") return run_offline_like(args, Scenario::staircase);
        if (cmd == "multichannel") return run_multichannel(args);
        if (cmd == "online") return run_online(args);
        return run_sweep(args, parse_scenario(cmd));
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"type", "runtime"}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
}
