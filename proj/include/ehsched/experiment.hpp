// Experiment orchestration: JSON config ingestion, the Monte-Carlo sweep
// scenarios (throughput vs arrival rate, vs block duration, and the OFDMA
// cell), and CSV/JSON result emission. Everything is deterministic given the
// config and base seed; trial RNG streams are derived per (sweep point, trial).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehsched/model.hpp"
#include "ehsched/online.hpp"
#include "ehsched/stochastics.hpp"

namespace ehsched {

enum class Scenario {
    pee,
    offline,
    staircase,
    multichannel,
    online,
    sweep_lambda,
    sweep_horizon,
    ofdma,
};

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario scenario);

struct ExperimentConfig {
    Scenario scenario = Scenario::pee;
    std::optional<RateModel> channel;
    std::vector<double> multi_gains;  // multichannel scenario, linear
    CircuitModel circuit;
    std::optional<EnergyProfile> profile;

    double mean_energy_j = 0.0;      // Ebar for generators and policies
    double arrival_rate_per_s = 0.0; // fixed lambda where the scenario needs one
    Policy online_policy = Policy::proposed;
    std::vector<std::string> policies;  // sweep subset of {offline, proposed, eep, enp}

    std::size_t trials = 200;
    std::uint64_t base_seed = 1;
    double time_step_s = 0.01;
    double horizon_s = 20.0;
    double initial_energy_j = 0.0;  // initial store for generated profiles

    std::vector<double> lambda_grid;   // sweep_lambda / ofdma x-axis
    std::vector<double> horizon_grid;  // sweep_horizon x-axis

    std::optional<CellConfig> cell;
    std::optional<std::uint64_t> generate_seed;  // online scenario: generate the profile
};

/// Parses and validates a config document; throws std::invalid_argument with
/// a field-qualified message on any violation. dB / dBm fields are converted
/// to linear units here and nowhere else. A non-empty default_scenario fills
/// in a missing "scenario" field (the CLI passes its subcommand).
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& default_scenario = "");
ExperimentConfig load_config(const std::string& path, const std::string& default_scenario = "");

struct TrialRow {
    double sweep_value = 0.0;
    std::uint64_t seed = 0;
    std::string policy;
    double throughput_bits = 0.0;
    double runtime_ms = 0.0;
};

struct Aggregate {
    double sweep_value = 0.0;
    std::string policy;
    std::size_t trials = 0;
    double mean_bits = 0.0;
    double stderr_bits = 0.0;
};

struct ExperimentResult {
    std::string scenario;
    std::vector<TrialRow> rows;
    std::vector<Aggregate> aggregates;
};

/// Average throughput vs energy arrival rate at a fixed block duration.
ExperimentResult run_sweep_lambda(const ExperimentConfig& config);
/// Average throughput vs block duration at a fixed arrival rate.
ExperimentResult run_sweep_horizon(const ExperimentConfig& config);
/// Single-cell OFDMA downlink with an energy-harvesting base station:
/// per-trial HPPP user drop, per-user subchannels, policies driven by the
/// multi-channel reduced rate.
ExperimentResult run_ofdma(const ExperimentConfig& config);

std::vector<Aggregate> aggregate_rows(const std::vector<TrialRow>& rows);

// Shortest round-trippable decimal form of a double; used for every numeric
// field so emitted files are bit-stable for identical results.
std::string format_double(double value);

std::string to_csv(const ExperimentResult& result);
nlohmann::json summary_json(const ExperimentResult& result);

/// Writes <scenario>_rows.csv and <scenario>_summary.json under out_dir.
void emit(const ExperimentResult& result, const std::string& out_dir);

inline constexpr const char* kCsvHeader = "sweep_value,seed,policy,throughput_bits,runtime_ms";
inline constexpr int kResultSchemaVersion = 1;

namespace seed_streams {
// Child-stream ids for Rng::derive_seed: stream = 2 * point_index + offset.
inline constexpr std::uint64_t kProfile = 0;  // energy arrivals
inline constexpr std::uint64_t kCell = 1;     // HPPP user drop
}  // namespace seed_streams

/// Seed for a trial's generator: derive_seed(base, stream_of(point, kind), trial).
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t point_index,
                         std::uint64_t stream_offset, std::size_t trial);

}  // namespace ehsched
