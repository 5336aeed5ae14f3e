// Core domain types for energy-harvesting transmit scheduling: arrival
// profiles and their epochs, rate and circuit-power models, piecewise-constant
// power schedules, and schedule evaluation.
//
// Unit convention: Watts, Joules, seconds, Hz, bits everywhere. dB / dBm / mW
// conversions happen only at config ingestion (see db_to_linear and friends).
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ehsched {

// Absolute tolerance for harvesting-constraint checks, in Joules.
inline constexpr double kFeasibilityTolJ = 1e-9;

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_per_hz_to_w_per_hz(double dbm_per_hz);

// Compensated (Kahan) accumulator. Window averages over epochs are compared
// against thresholds; naive summation can flip those comparisons.
class KahanSum {
public:
    void add(double x) {
        double y = x - compensation_;
        double t = sum_ + y;
        compensation_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

double kahan_total(const std::vector<double>& xs, std::size_t first, std::size_t last);

struct Arrival {
    double time_s = 0.0;
    double energy_j = 0.0;
};

/// Energy arrivals over one scheduling block (0, horizon].
///
/// Construction validates all invariants (strictly increasing arrival times
/// inside the horizon, positive amounts, non-negative initial store) and
/// derives the epochs. Epoch i (0-based, i = 0..N-1) spans
/// (epoch_start(i), epoch_end(i)]; epoch_energy(i) is the energy credited at
/// the epoch start (the initial store for epoch 0). Immutable once built.
class EnergyProfile {
public:
    EnergyProfile(double initial_energy_j, std::vector<Arrival> arrivals, double horizon_s);

    double initial_energy() const { return initial_energy_; }
    const std::vector<Arrival>& arrivals() const { return arrivals_; }
    double horizon() const { return horizon_; }

    std::size_t epoch_count() const { return lengths_.size(); }
    double epoch_start(std::size_t i) const { return starts_[i]; }
    double epoch_end(std::size_t i) const;
    double epoch_length(std::size_t i) const { return lengths_[i]; }
    double epoch_energy(std::size_t i) const { return energies_[i]; }

    // Kahan-compensated sums over the epoch index range [first, last).
    double window_energy(std::size_t first, std::size_t last) const;
    double window_length(std::size_t first, std::size_t last) const;
    double total_energy() const { return window_energy(0, epoch_count()); }

private:
    double initial_energy_;
    std::vector<Arrival> arrivals_;
    double horizon_;
    std::vector<double> starts_;
    std::vector<double> lengths_;
    std::vector<double> energies_;
};

/// Validates the raw profile fields and derives epochs; throws
/// std::invalid_argument naming the offending arrival index on violation.
EnergyProfile validate_profile(double initial_energy_j, std::vector<Arrival> arrivals,
                               double horizon_s);

/// On/off transmitter consumption model: a transmitter that is "on"
/// (transmit power > 0) draws transmit power plus the circuit power alpha;
/// an "off" transmitter draws nothing. The RF-chain efficiency and the
/// off-mode draw are representable in the model but fixed at 1 and 0.
struct CircuitModel {
    CircuitModel() = default;
    explicit CircuitModel(double alpha);

    double alpha_w = 0.0;
    static constexpr double eta = 1.0;
    static constexpr double beta_w = 0.0;

    // Total consumed power for a commanded transmit power.
    double total_power(double transmit_power_w) const {
        return transmit_power_w > 0.0 ? transmit_power_w + alpha_w : 0.0;
    }
};

// Scalar rate function contract shared by the single-channel model and the
// multi-channel reduced rate: rate(0) = 0, strictly increasing, strictly
// concave in power. Only the AWGN instantiation is implemented; solvers take
// a RateFn so other families can be plugged in.
using RateFn = std::function<double(double)>;

/// Band-limited AWGN link: rate(P) = W log2(1 + h P / (gap W N0)) bits/s.
class RateModel {
public:
    RateModel(double bandwidth_hz, double noise_density_w_per_hz, double gap, double gain);

    double rate(double power_w) const;             // throws on negative power
    double rate_derivative(double power_w) const;  // dR/dP, Watts^-1 * bits/s
    double snr_per_watt() const { return snr_per_watt_; }  // h / (gap W N0)

    double bandwidth() const { return bandwidth_hz_; }
    double noise_density() const { return noise_density_; }
    double gap() const { return gap_; }
    double gain() const { return gain_; }

    RateFn as_fn() const;

private:
    double bandwidth_hz_;
    double noise_density_;
    double gap_;
    double gain_;
    double snr_per_watt_;
};

/// K parallel AWGN subchannels with a common per-subchannel bandwidth.
class MultiRateModel {
public:
    MultiRateModel(double bandwidth_hz, double noise_density_w_per_hz, double gap,
                   std::vector<double> gains);

    std::size_t channel_count() const { return gains_.size(); }
    const std::vector<double>& gains() const { return gains_; }
    double bandwidth() const { return bandwidth_hz_; }
    double noise_density() const { return noise_density_; }
    double gap() const { return gap_; }

    // gap * W * N0 / h_k; only valid for channels with positive gain.
    double noise_floor(std::size_t k) const;
    // Rate of channel k carrying power q.
    double channel_rate(std::size_t k, double power_w) const;

private:
    double bandwidth_hz_;
    double noise_density_;
    double gap_;
    std::vector<double> gains_;
};

struct Segment {
    double start_s = 0.0;
    double end_s = 0.0;
    double power_w = 0.0;  // transmit power; 0 encodes "off"

    double length() const { return end_s - start_s; }
};

/// Piecewise-constant transmit power over (0, horizon]. Segments are
/// half-open (start, end], must tile the block exactly (contiguous,
/// first start 0, last end = horizon) and carry non-negative powers.
/// Off intervals are explicit zero-power segments, never gaps.
/// Default construction gives the empty placeholder (horizon 0); every
/// usable schedule comes from the validating constructor.
class PowerSchedule {
public:
    PowerSchedule() = default;
    PowerSchedule(std::vector<Segment> segments, double horizon_s);

    const std::vector<Segment>& segments() const { return segments_; }
    double horizon() const { return horizon_; }

    double power_at(double t) const;  // value on the segment with start < t <= end

    static PowerSchedule all_off(double horizon_s);

private:
    std::vector<Segment> segments_;
    double horizon_ = 0.0;
};

struct MultiSegment {
    double start_s = 0.0;
    double end_s = 0.0;
    std::vector<double> powers_w;  // one entry per channel

    double length() const { return end_s - start_s; }
    double total_power() const;
};

/// Vector-power variant of PowerSchedule for K parallel channels.
class MultiPowerSchedule {
public:
    MultiPowerSchedule() = default;
    MultiPowerSchedule(std::vector<MultiSegment> segments, double horizon_s);

    const std::vector<MultiSegment>& segments() const { return segments_; }
    double horizon() const { return horizon_; }
    std::size_t channel_count() const { return channel_count_; }

private:
    std::vector<MultiSegment> segments_;
    double horizon_ = 0.0;
    std::size_t channel_count_ = 0;
};

struct ScheduleEvaluation {
    double throughput_bits = 0.0;
    bool feasible = true;
    double max_violation_j = 0.0;  // worst exceedance over all arrival instants
};

/// Total throughput of a schedule plus a harvesting-constraint audit: at
/// every epoch boundary t_i (including the horizon) the consumed energy
/// must not exceed the energy harvested strictly before t_i, within
/// kFeasibilityTolJ. Throws if the schedule horizon differs from the
/// profile horizon.
ScheduleEvaluation evaluate_schedule(const PowerSchedule& schedule, const RateModel& model,
                                     const CircuitModel& circuit, const EnergyProfile& profile);
ScheduleEvaluation evaluate_schedule(const PowerSchedule& schedule, const RateFn& rate,
                                     const CircuitModel& circuit, const EnergyProfile& profile);

}  // namespace ehsched
