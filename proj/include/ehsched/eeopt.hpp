// Energy-efficiency maximizing power (the bits-per-Joule optimum of
// R(P)/(P + alpha)) and the single-epoch closed-form throughput solver.
#pragma once

#include "ehsched/model.hpp"

namespace ehsched {

struct EePower {
    double p_ee_w = 0.0;
    double ee_bits_per_joule = 0.0;  // R(p_ee) / (p_ee + alpha)
    int iterations = 0;
    double residual_w = 0.0;  // bracket width at termination
};

/// Unique interior maximizer of the quasi-concave ratio R(P)/(P + alpha),
/// located by bisection on the sign of the ratio derivative. The initial
/// bracket [1e-9 W, 1 W] is doubled until the derivative changes sign;
/// terminates at bracket width <= 1e-7 W.
/// Throws std::domain_error when alpha == 0 (the ratio supremum is at
/// P -> 0 with no interior maximizer).
EePower compute_p_ee(const RateModel& model, const CircuitModel& circuit);

/// Generic form for any scalar rate satisfying the RateFn contract.
/// ratio_slope must return a value with the sign of d/dP [rate(P)/(P+alpha)].
EePower compute_p_ee_generic(const RateFn& rate, const std::function<double(double)>& ratio_slope,
                             double alpha_w);

struct SingleEpochSolution {
    double p_star_w = 0.0;  // meaningless when on_time_s == 0
    double on_time_s = 0.0;
};

/// Throughput-optimal constant power and on-duration for a single epoch:
/// p* = max(p_ee, e0/horizon - alpha), on-time = e0 / (p* + alpha), which
/// exhausts the stored energy exactly. e0 == 0 degenerates to the all-off
/// schedule (on_time 0).
SingleEpochSolution solve_single_epoch(double e0_j, double horizon_s, const RateModel& model,
                                       const CircuitModel& circuit);

}  // namespace ehsched
