// Causal-ESI transmission policies (the proposed expected-power heuristic,
// EEP, ENP), the closed-form offline initial power used as a cross-check,
// and the discrete-time block simulator that tracks stored energy.
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ehsched/model.hpp"

namespace ehsched {

/// First and second-order statistics of the energy arrival process, assumed
/// known at the transmitter.
struct ArrivalStats {
    ArrivalStats() = default;
    ArrivalStats(double rate_per_s, double mean_energy_j);

    double rate_per_s = 0.0;     // lambda_e
    double mean_energy_j = 0.0;  // Ebar

    double mean_power() const { return rate_per_s * mean_energy_j; }
};

struct OnlineState {
    double time_s = 0.0;
    double stored_energy_j = 0.0;
    double horizon_s = 0.0;
};

/// Closed-form optimal offline power at t = 0:
/// max(min_i(prefix energy / prefix duration) - alpha, p_ee). Needs the full
/// non-causal profile; used to validate the online approximation, not as a
/// policy.
double p_star_zero(const EnergyProfile& profile, double p_ee_w, const CircuitModel& circuit);

/// Proposed online policy: max(E_s/(T-t) + lambda*Ebar - alpha, p_ee) while
/// energy is stored, else 0. The expected-available-power term may be
/// negative, in which case p_ee wins the max.
double online_power(const OnlineState& state, const ArrivalStats& stats, double p_ee_w,
                    const CircuitModel& circuit);

/// Energy Efficient Policy: transmit at p_ee whenever energy is stored.
double eep_power(const OnlineState& state, double p_ee_w);

struct EnpDecision {
    double power_w = 0.0;
    // Set when lambda*Ebar <= alpha: the long-term energy-neutral power is
    // non-positive and the policy stays off.
    bool degenerate = false;
};

/// Energy Neutralization Policy: transmit at lambda*Ebar - alpha (the
/// power matching the long-term harvested rate) whenever energy is stored.
EnpDecision enp_power(const OnlineState& state, const ArrivalStats& stats,
                      const CircuitModel& circuit);

enum class Policy { proposed, eep, enp, fixed_schedule };

Policy parse_policy(std::string_view name);
std::string_view policy_name(Policy policy);

struct TraceRecord {
    double time_s = 0.0;
    double stored_energy_j = 0.0;   // at interval start, after crediting arrivals
    double commanded_power_w = 0.0;
    double on_fraction = 0.0;       // fraction of the interval actually transmitting
    double bits = 0.0;
    double interval_s = 0.0;
    double credited_j = 0.0;        // energy credited at the interval start
};

struct SimTrace {
    std::vector<TraceRecord> records;
    double throughput_bits = 0.0;
    double residual_energy_j = 0.0;
    double credited_energy_j = 0.0;  // total, including the initial store
    double consumed_energy_j = 0.0;
    bool enp_degenerate = false;
};

struct SimOptions {
    double time_step_s = 0.01;
    bool record_trace = true;
};

/// Steps through [0, horizon): arrivals are credited at their exact times by
/// splitting the containing step, the policy is queried at each sub-interval
/// start, and consumption (power + alpha) is debited while energy lasts. If
/// the stored energy cannot cover a full sub-interval the transmitter stays
/// on exactly for the affordable fraction and off for the remainder, so the
/// energy ledger closes exactly and the store never goes negative.
///
/// Policy::fixed_schedule replays `fixed` (required in that case); steps are
/// additionally split at its segment boundaries so the replay is exact.
SimTrace simulate(Policy policy, const EnergyProfile& realized, const RateModel& model,
                  const CircuitModel& circuit, const ArrivalStats& stats,
                  const SimOptions& options = {}, const PowerSchedule* fixed = nullptr);

/// Same simulator against an arbitrary scalar rate (e.g. the multi-channel
/// reduced rate), with the policy anchor p_ee supplied by the caller.
SimTrace simulate_rate_fn(Policy policy, const EnergyProfile& realized, const RateFn& rate,
                          const CircuitModel& circuit, const ArrivalStats& stats, double p_ee_w,
                          const SimOptions& options = {}, const PowerSchedule* fixed = nullptr);

}  // namespace ehsched
