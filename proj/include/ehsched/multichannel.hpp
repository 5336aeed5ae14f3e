// Multi-channel extension by nested optimization: the vector power problem
// over K parallel AWGN channels reduces to a scalar total-power problem
// through the water-filling reduced rate, is solved with the single-channel
// machinery, and the resulting totals are split back per channel.
#pragma once

#include <cstddef>
#include <vector>

#include "ehsched/model.hpp"
#include "ehsched/offline.hpp"

namespace ehsched {

struct WaterFillResult {
    std::vector<double> allocations_w;     // per channel; 0 for inactive / zero-gain
    double water_level_w = 0.0;            // common level nu
    std::vector<std::size_t> active_set;   // channels with positive allocation
};

/// Splits a total power across channels to maximize the sum rate:
/// Q_k = max(0, nu - noise_floor_k) with nu located by bisection and the
/// active-set level then solved exactly. Channels with zero gain are
/// excluded a priori. Throws on negative total power.
WaterFillResult water_fill(const MultiRateModel& model, double total_power_w);

/// Sum rate achieved by water-filling a total power: the reduced rate
/// R̄(P), which satisfies the scalar RateFn contract (zero at zero,
/// strictly increasing, strictly concave).
double reduced_rate(const MultiRateModel& model, double total_power_w);

struct MultiEePower {
    double p_ee_w = 0.0;
    std::vector<double> q_ee_w;  // water-filling split of p_ee
    double ee_bits_per_joule = 0.0;
    int iterations = 0;
    double residual_w = 0.0;
};

/// EE-maximizing total power for the multi-channel case: bisection on the
/// sign of d/dP [R̄(P)/(P+alpha)] with the R̄ derivative estimated by a
/// central difference (step 1e-6 * max(P, 1e-6)). Throws std::domain_error
/// when alpha == 0.
MultiEePower compute_p_ee_mc(const MultiRateModel& model, const CircuitModel& circuit);

struct MultiOfflineSolution {
    TwoPhaseSolution scalar;      // total-power solution under the reduced rate
    MultiPowerSchedule schedule;  // per-channel split of every segment
    double throughput_bits = 0.0;
};

/// Table-II style nested solve: run the two-phase solver against the reduced
/// rate to get the scalar total-power trajectory, then water-fill each
/// segment. Per-segment channel powers sum to the scalar power exactly.
MultiOfflineSolution solve_offline_mc(const EnergyProfile& profile, const MultiRateModel& model,
                                      const CircuitModel& circuit);

}  // namespace ehsched
