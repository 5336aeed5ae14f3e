// Offline-optimal single-channel scheduling with non-causal energy state
// information: the two-phase solver (EE-maximizing on-off phase followed by
// an always-on non-decreasing staircase), the always-on staircase baseline,
// and a discretized dynamic-programming oracle for certifying optimality at
// desk scale.
#pragma once

#include <cstddef>
#include <vector>

#include "ehsched/model.hpp"

namespace ehsched {

struct IeeResult {
    // Number of leading epochs in the EE phase; 0 means the phase is empty
    // and the whole block is staircase.
    std::size_t i_ee = 0;
    // Intermediate boundaries of the windowed-average recursion, as epoch
    // counts (the last one equals i_ee when non-empty).
    std::vector<std::size_t> boundaries;
};

/// Runs the windowed-average recursion that ends the EE phase: starting from
/// boundary 0, each step finds the smallest epoch count i whose window
/// average power (energy credited in [prev, i) over the window duration)
/// minus alpha is <= p_ee, and advances to it; stops when no such i exists.
IeeResult compute_i_ee(const EnergyProfile& profile, double p_ee_w, const CircuitModel& circuit);

struct StaircaseGroup {
    std::size_t first_epoch = 0;  // [first_epoch, last_epoch) 0-based
    std::size_t last_epoch = 0;
    double avg_total_power_w = 0.0;  // windowed average consumption rate
    double transmit_power_w = 0.0;   // avg - alpha, clamped at 0
};

struct TwoPhaseSolution {
    std::size_t i_ee = 0;
    double p_ee_w = 0.0;                     // 0 in the alpha == 0 regime
    std::vector<double> ee_on_times_s;       // one per epoch 0..i_ee-1
    std::vector<StaircaseGroup> staircase;   // groups covering epochs i_ee..N-1
    std::vector<double> epoch_powers_w;      // per-epoch positive power level (0 if fully off)
    PowerSchedule schedule;
    double throughput_bits = 0.0;
};

/// Two-phase optimal offline schedule. Phase 1 (epochs < i_ee) transmits at
/// p_ee with on-periods packed at each epoch start; phase 2 is always-on with
/// the non-decreasing staircase given by the windowed-average argmin
/// recursion. alpha == 0 delegates entirely to the staircase solver.
TwoPhaseSolution solve_offline(const EnergyProfile& profile, const RateModel& model,
                               const CircuitModel& circuit);

/// Same solver against an arbitrary scalar rate satisfying the RateFn
/// contract (used by the multi-channel reduction); p_ee is supplied by the
/// caller because its computation depends on the rate family.
TwoPhaseSolution solve_offline_reduced(const EnergyProfile& profile, const RateFn& rate,
                                       double p_ee_w, const CircuitModel& circuit);

/// Always-on baseline: every epoch fully on, powers from the same staircase
/// recursion applied from epoch 0 (the ideal-circuit-power optimum applied
/// verbatim with the transmitter forced on). Group powers whose window
/// average falls below alpha are clamped to 0.
PowerSchedule solve_staircase(const EnergyProfile& profile, const RateModel& model,
                              const CircuitModel& circuit);

/// The staircase group decomposition for epochs [from_epoch, N).
std::vector<StaircaseGroup> staircase_groups(const EnergyProfile& profile, std::size_t from_epoch,
                                             const CircuitModel& circuit);

struct DpOracleResult {
    double throughput_bits = 0.0;
    PowerSchedule schedule;
    double energy_bin_j = 0.0;  // quantum actually used
    std::size_t slot_count = 0;
};

/// Independent verification oracle: exact dynamic program over time slots of
/// length time_step_s and a quantized stored-energy state, with per-slot
/// powers restricted to power_grid_w. Consumption is rounded up to the
/// energy quantum and arrival credits down, so the returned value is a lower
/// bound on the continuous optimum that converges to it as the grids refine.
/// The quantum is min(energy_bin_j, total_energy / 20000).
///
/// Preconditions: horizon / time_step <= 2000 slots; power_grid contains 0.
/// Throws std::invalid_argument when the state-space budget is exceeded.
DpOracleResult dp_oracle(const EnergyProfile& profile, const RateModel& model,
                         const CircuitModel& circuit, double time_step_s,
                         const std::vector<double>& power_grid_w, double energy_bin_j = 1e-4);
DpOracleResult dp_oracle(const EnergyProfile& profile, const RateFn& rate,
                         const CircuitModel& circuit, double time_step_s,
                         const std::vector<double>& power_grid_w, double energy_bin_j = 1e-4);

/// Convenience grid for the oracle: 0, p_ee, and a linear spread up to
/// 1.3x the largest plausible power level (max window average minus alpha,
/// or p_ee if larger).
std::vector<double> make_oracle_power_grid(const EnergyProfile& profile, double p_ee_w,
                                           const CircuitModel& circuit, std::size_t points);

}  // namespace ehsched
