#include "ehsched/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ehsched/eeopt.hpp"
#include "ehsched/multichannel.hpp"
#include "ehsched/offline.hpp"

namespace ehsched {

namespace {

using nlohmann::json;

double require_number(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw std::invalid_argument("config: " + ctx + "." + key + " missing or not a number");
    return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw std::invalid_argument("config: " + key + " must be a number");
    return obj[key].get<double>();
}

// Accepts either a linear field or its dB/dBm twin, never both.
double linear_or_db(const json& obj, const std::string& linear_key, const std::string& db_key,
                    const std::string& ctx, bool dbm_per_hz = false) {
    const bool has_linear = obj.contains(linear_key);
    const bool has_db = obj.contains(db_key);
    if (has_linear == has_db)
        throw std::invalid_argument("config: " + ctx + " needs exactly one of " + linear_key +
                                    " / " + db_key);
    if (has_linear) return require_number(obj, linear_key, ctx);
    const double db = require_number(obj, db_key, ctx);
    return dbm_per_hz ? dbm_per_hz_to_w_per_hz(db) : db_to_linear(db);
}

EnergyProfile parse_profile(const json& doc) {
    const double horizon = require_number(doc, "horizon_s", "profile");
    const double e0 = number_or(doc, "initial_energy_j", 0.0);
    std::vector<Arrival> arrivals;
    if (doc.contains("arrivals")) {
        if (!doc["arrivals"].is_array())
            throw std::invalid_argument("config: profile.arrivals must be an array");
        for (const auto& a : doc["arrivals"]) {
            arrivals.push_back(
                {require_number(a, "time_s", "arrival"), require_number(a, "energy_j", "arrival")});
        }
    }
    return validate_profile(e0, std::move(arrivals), horizon);
}

CellConfig parse_cell(const json& doc) {
    CellConfig cell;
    cell.radius_m = require_number(doc, "radius_m", "cell");
    cell.user_density_per_m2 = require_number(doc, "user_density_per_m2", "cell");
    cell.ref_loss = linear_or_db(doc, "ref_loss", "ref_loss_db", "cell");
    cell.ref_distance_m = require_number(doc, "ref_distance_m", "cell");
    cell.pathloss_exponent = require_number(doc, "pathloss_exponent", "cell");
    cell.total_bandwidth_hz = require_number(doc, "total_bandwidth_hz", "cell");
    cell.noise_density_w_per_hz =
        linear_or_db(doc, "noise_density_w_per_hz", "noise_density_dbm_per_hz", "cell", true);
    if (doc.contains("gap") || doc.contains("gap_db")) {
        cell.gap = linear_or_db(doc, "gap", "gap_db", "cell");
    }
    cell.circuit_power_w = require_number(doc, "circuit_power_w", "cell");
    cell.validate();
    return cell;
}

std::vector<double> parse_grid(const json& doc, const std::string& key) {
    if (!doc.contains(key) || !doc[key].is_array() || doc[key].empty())
        throw std::invalid_argument("config: " + key + " must be a non-empty array");
    std::vector<double> grid;
    for (const auto& v : doc[key]) {
        if (!v.is_number() || !(v.get<double>() > 0.0))
            throw std::invalid_argument("config: " + key + " entries must be positive numbers");
        grid.push_back(v.get<double>());
    }
    return grid;
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
    if (name == "pee") return Scenario::pee;
    if (name == "offline") return Scenario::offline;
    if (name == "staircase") return Scenario::staircase;
    if (name == "multichannel") return Scenario::multichannel;
    if (name == "online") return Scenario::online;
    if (name == "sweep_lambda") return Scenario::sweep_lambda;
    if (name == "sweep_horizon") return Scenario::sweep_horizon;
    if (name == "ofdma") return Scenario::ofdma;
    throw std::invalid_argument("config: unknown scenario: " + name);
}

std::string scenario_name(Scenario scenario) {
    switch (scenario) {
        case Scenario::pee: return "pee";
        case Scenario::offline: return "offline";
        case Scenario::staircase: return "staircase";
        case Scenario::multichannel: return "multichannel";
        case Scenario::online: return "online";
        case Scenario::sweep_lambda: return "sweep_lambda";
        case Scenario::sweep_horizon: return "sweep_horizon";
        case Scenario::ofdma: return "ofdma";
    }
    return "?";
}

ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& default_scenario) {
    ExperimentConfig cfg;
    if (doc.contains("scenario") && doc["scenario"].is_string()) {
        cfg.scenario = parse_scenario(doc["scenario"].get<std::string>());
    } else if (!default_scenario.empty()) {
        cfg.scenario = parse_scenario(default_scenario);
    } else {
        throw std::invalid_argument("config: scenario missing");
    }

    if (doc.contains("channel")) {
        const json& ch = doc["channel"];
        const double bandwidth = require_number(ch, "bandwidth_hz", "channel");
        const double noise =
            linear_or_db(ch, "noise_density_w_per_hz", "noise_density_dbm_per_hz", "channel", true);
        double gap = 1.0;
        if (ch.contains("gap") || ch.contains("gap_db")) gap = linear_or_db(ch, "gap", "gap_db", "channel");
        if (ch.contains("gains") || ch.contains("gains_db")) {
            const bool in_db = ch.contains("gains_db");
            const json& list = in_db ? ch["gains_db"] : ch["gains"];
            if (!list.is_array() || list.empty())
                throw std::invalid_argument("config: channel gains must be a non-empty array");
            for (const auto& g : list) {
                const double v = g.get<double>();
                cfg.multi_gains.push_back(in_db ? db_to_linear(v) : v);
            }
        }
        if (ch.contains("gain") || ch.contains("gain_db")) {
            cfg.channel = RateModel(bandwidth, noise, gap,
                                    linear_or_db(ch, "gain", "gain_db", "channel"));
        } else if (!cfg.multi_gains.empty()) {
            // keep bandwidth/noise/gap for the multichannel model
            cfg.channel = RateModel(bandwidth, noise, gap, 1.0);
        } else {
            throw std::invalid_argument("config: channel needs gain(_db) or gains(_db)");
        }
    }

    if (doc.contains("circuit")) {
        cfg.circuit = CircuitModel(require_number(doc["circuit"], "alpha_w", "circuit"));
    }
    if (doc.contains("profile")) cfg.profile = parse_profile(doc["profile"]);
    if (doc.contains("stats")) {
        cfg.arrival_rate_per_s = number_or(doc["stats"], "arrival_rate_per_s", 0.0);
        cfg.mean_energy_j = number_or(doc["stats"], "mean_energy_j", 0.0);
    }
    if (doc.contains("policy"))
        cfg.online_policy = parse_policy(doc["policy"].get<std::string>());
    if (doc.contains("policies")) {
        for (const auto& p : doc["policies"]) {
            const std::string name = p.get<std::string>();
            if (name != "offline" && name != "proposed" && name != "eep" && name != "enp")
                throw std::invalid_argument("config: unknown sweep policy: " + name);
            cfg.policies.push_back(name);
        }
        if (cfg.policies.empty()) throw std::invalid_argument("config: policies must be non-empty");
    } else {
        cfg.policies = {"offline", "proposed", "eep", "enp"};
    }

    const double trials = number_or(doc, "trials", 200.0);
    if (!(trials >= 1.0)) throw std::invalid_argument("config: trials must be >= 1");
    cfg.trials = static_cast<std::size_t>(trials);
    cfg.base_seed = static_cast<std::uint64_t>(number_or(doc, "base_seed", 1.0));
    cfg.time_step_s = number_or(doc, "time_step_s", 0.01);
    if (!(cfg.time_step_s > 0.0)) throw std::invalid_argument("config: time_step_s must be positive");
    cfg.horizon_s = number_or(doc, "horizon_s", 20.0);
    if (!(cfg.horizon_s > 0.0)) throw std::invalid_argument("config: horizon_s must be positive");
    cfg.initial_energy_j = number_or(doc, "initial_energy_j", 0.0);
    if (cfg.initial_energy_j < 0.0)
        throw std::invalid_argument("config: initial_energy_j must be non-negative");

    if (cfg.scenario == Scenario::sweep_lambda || cfg.scenario == Scenario::ofdma)
        cfg.lambda_grid = parse_grid(doc, "lambda_grid_per_s");
    if (cfg.scenario == Scenario::sweep_horizon) cfg.horizon_grid = parse_grid(doc, "horizon_grid_s");
    if (doc.contains("cell")) cfg.cell = parse_cell(doc["cell"]);
    if (doc.contains("generate")) {
        cfg.generate_seed =
            static_cast<std::uint64_t>(require_number(doc["generate"], "seed", "generate"));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& default_scenario) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + path + ": " + e.what());
    }
    if (doc.contains("profile_path")) {
        const auto profile_path =
            std::filesystem::path(path).parent_path() / doc["profile_path"].get<std::string>();
        std::ifstream pin(profile_path);
        if (!pin)
            throw std::invalid_argument("config: referenced file does not exist: " +
                                        profile_path.string());
        json pdoc;
        pin >> pdoc;
        doc["profile"] = pdoc;
    }
    return parse_config(doc, default_scenario);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t point_index,
                         std::uint64_t stream_offset, std::size_t trial) {
    return Rng::derive_seed(base_seed, 2 * static_cast<std::uint64_t>(point_index) + stream_offset,
                            static_cast<std::uint64_t>(trial));
}

namespace {

double now_ms_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

struct PointSpec {
    double sweep_value;
    double lambda;
    double horizon;
};

ExperimentResult run_single_channel_sweep(const ExperimentConfig& cfg,
                                          const std::vector<PointSpec>& points,
                                          const std::string& scenario) {
    if (!cfg.channel) throw std::invalid_argument("config: sweep needs a channel");
    if (!(cfg.mean_energy_j > 0.0))
        throw std::invalid_argument("config: sweep needs stats.mean_energy_j");
    const RateModel& model = *cfg.channel;
    const CircuitModel& circuit = cfg.circuit;
    const double p_ee =
        circuit.alpha_w > 0.0 ? compute_p_ee(model, circuit).p_ee_w : 0.0;

    ExperimentResult result;
    result.scenario = scenario;
    const SimOptions options{cfg.time_step_s, /*record_trace=*/false};

    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const PointSpec& point = points[pi];
        const ArrivalStats stats(point.lambda, cfg.mean_energy_j);
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t seed =
                trial_seed(cfg.base_seed, pi, seed_streams::kProfile, trial);
            const EnergyProfile profile =
                gen_compound_poisson(stats, point.horizon, seed, cfg.initial_energy_j);
            for (const std::string& policy : cfg.policies) {
                const auto t0 = std::chrono::steady_clock::now();
                double bits = 0.0;
                if (policy == "offline") {
                    bits = solve_offline(profile, model, circuit).throughput_bits;
                } else {
                    bits = simulate_rate_fn(parse_policy(policy), profile, model.as_fn(), circuit,
                                            stats, p_ee, options)
                               .throughput_bits;
                }
                result.rows.push_back({point.sweep_value, seed, policy, bits, now_ms_since(t0)});
            }
        }
    }
    result.aggregates = aggregate_rows(result.rows);
    return result;
}

}  // namespace

ExperimentResult run_sweep_lambda(const ExperimentConfig& cfg) {
    std::vector<PointSpec> points;
    for (double lambda : cfg.lambda_grid) points.push_back({lambda, lambda, cfg.horizon_s});
    if (points.empty()) throw std::invalid_argument("config: sweep_lambda needs lambda_grid_per_s");
    return run_single_channel_sweep(cfg, points, "sweep_lambda");
}

ExperimentResult run_sweep_horizon(const ExperimentConfig& cfg) {
    if (!(cfg.arrival_rate_per_s > 0.0))
        throw std::invalid_argument("config: sweep_horizon needs stats.arrival_rate_per_s");
    std::vector<PointSpec> points;
    for (double horizon : cfg.horizon_grid)
        points.push_back({horizon, cfg.arrival_rate_per_s, horizon});
    if (points.empty()) throw std::invalid_argument("config: sweep_horizon needs horizon_grid_s");
    return run_single_channel_sweep(cfg, points, "sweep_horizon");
}

ExperimentResult run_ofdma(const ExperimentConfig& cfg) {
    if (!cfg.cell) throw std::invalid_argument("config: ofdma needs a cell");
    if (!(cfg.mean_energy_j > 0.0))
        throw std::invalid_argument("config: ofdma needs stats.mean_energy_j");
    const CellConfig& cell = *cfg.cell;
    const CircuitModel circuit(cell.circuit_power_w);

    ExperimentResult result;
    result.scenario = "ofdma";
    const SimOptions options{cfg.time_step_s, /*record_trace=*/false};

    for (std::size_t pi = 0; pi < cfg.lambda_grid.size(); ++pi) {
        const double lambda = cfg.lambda_grid[pi];
        const ArrivalStats stats(lambda, cfg.mean_energy_j);
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t cell_seed =
                trial_seed(cfg.base_seed, pi, seed_streams::kCell, trial);
            const std::uint64_t profile_seed =
                trial_seed(cfg.base_seed, pi, seed_streams::kProfile, trial);
            const auto users = gen_hppp_users(cell, cell_seed);
            const auto model = cell_to_multimodel(users, cell);
            const EnergyProfile profile =
                gen_compound_poisson(stats, cfg.horizon_s, profile_seed, cfg.initial_energy_j);

            if (!model) {
                // Empty cell: recorded as zero-throughput rows, not resampled.
                for (const std::string& policy : cfg.policies)
                    result.rows.push_back({lambda, profile_seed, policy, 0.0, 0.0});
                continue;
            }
            const auto rbar = [&m = *model](double p) { return reduced_rate(m, p); };
            const double p_ee = compute_p_ee_mc(*model, circuit).p_ee_w;
            for (const std::string& policy : cfg.policies) {
                const auto t0 = std::chrono::steady_clock::now();
                double bits = 0.0;
                if (policy == "offline") {
                    bits = solve_offline_reduced(profile, rbar, p_ee, circuit).throughput_bits;
                } else {
                    bits = simulate_rate_fn(parse_policy(policy), profile, rbar, circuit, stats,
                                            p_ee, options)
                               .throughput_bits;
                }
                result.rows.push_back({lambda, profile_seed, policy, bits, now_ms_since(t0)});
            }
        }
    }
    result.aggregates = aggregate_rows(result.rows);
    return result;
}

std::vector<Aggregate> aggregate_rows(const std::vector<TrialRow>& rows) {
    // Keyed by (sweep value, policy) in first-appearance order.
    std::vector<Aggregate> out;
    std::map<std::pair<double, std::string>, std::size_t> index;
    std::vector<std::vector<double>> samples;
    for (const TrialRow& row : rows) {
        const auto key = std::make_pair(row.sweep_value, row.policy);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            out.push_back({row.sweep_value, row.policy, 0, 0.0, 0.0});
            samples.emplace_back();
        }
        samples[it->second].push_back(row.throughput_bits);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& xs = samples[i];
        KahanSum sum;
        for (double x : xs) sum.add(x);
        const double n = static_cast<double>(xs.size());
        const double mean = sum.value() / n;
        KahanSum sq;
        for (double x : xs) sq.add((x - mean) * (x - mean));
        out[i].trials = xs.size();
        out[i].mean_bits = mean;
        out[i].stderr_bits = xs.size() > 1 ? std::sqrt(sq.value() / (n - 1.0) / n) : 0.0;
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string to_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const TrialRow& row : result.rows) {
        out << format_double(row.sweep_value) << ',' << row.seed << ',' << row.policy << ','
            << format_double(row.throughput_bits) << ',' << format_double(row.runtime_ms) << '\n';
    }
    return out.str();
}

nlohmann::json summary_json(const ExperimentResult& result) {
    json aggregates = json::array();
    for (const Aggregate& a : result.aggregates) {
        aggregates.push_back({{"sweep_value", a.sweep_value},
                              {"policy", a.policy},
                              {"trials", a.trials},
                              {"mean_bits", a.mean_bits},
                              {"stderr_bits", a.stderr_bits}});
    }
    return json{{"schema_version", kResultSchemaVersion},
                {"scenario", result.scenario},
                {"row_count", result.rows.size()},
                {"aggregates", std::move(aggregates)}};
}

void emit(const ExperimentResult& result, const std::string& out_dir) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / (result.scenario + "_rows.csv"), std::ios::binary);
        if (!csv) throw std::runtime_error("emit: cannot write CSV under " + out_dir);
        csv << to_csv(result);
    }
    {
        std::ofstream js(dir / (result.scenario + "_summary.json"), std::ios::binary);
        if (!js) throw std::runtime_error("emit: cannot write summary under " + out_dir);
        js << summary_json(result).dump(2) << '\n';
    }
}

}  // namespace ehsched
