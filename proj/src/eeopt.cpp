#include "ehsched/eeopt.hpp"

#include <cmath>
#include <stdexcept>

namespace ehsched {

namespace {

constexpr double kBracketLo = 1e-9;  // Watts
constexpr double kBracketHi = 1.0;
constexpr int kMaxDoublings = 40;
constexpr double kBracketTol = 1e-7;  // Watts

}  // namespace

EePower compute_p_ee_generic(const RateFn& rate, const std::function<double(double)>& ratio_slope,
                             double alpha_w) {
    if (alpha_w <= 0.0)
        throw std::domain_error("p_ee: EE supremum at P -> 0, no interior maximizer (alpha == 0)");

    double lo = kBracketLo;
    double hi = kBracketHi;
    int iterations = 0;

    // The slope at tiny P is positive for any concave rate with alpha > 0;
    // expand geometrically until the maximizer is bracketed.
    int doublings = 0;
    while (ratio_slope(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        ++iterations;
        if (++doublings > kMaxDoublings)
            throw std::runtime_error("p_ee: failed to bracket the EE maximizer");
    }

    while (hi - lo > kBracketTol) {
        const double mid = 0.5 * (lo + hi);
        if (ratio_slope(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++iterations;
    }

    EePower out;
    out.p_ee_w = 0.5 * (lo + hi);
    out.ee_bits_per_joule = rate(out.p_ee_w) / (out.p_ee_w + alpha_w);
    out.iterations = iterations;
    out.residual_w = hi - lo;
    return out;
}

EePower compute_p_ee(const RateModel& model, const CircuitModel& circuit) {
    const double alpha = circuit.alpha_w;
    // Sign of d/dP [R(P)/(P+a)] equals the sign of R'(P)(P+a) - R(P).
    auto slope = [&model, alpha](double p) {
        return model.rate_derivative(p) * (p + alpha) - model.rate(p);
    };
    return compute_p_ee_generic(model.as_fn(), slope, alpha);
}

SingleEpochSolution solve_single_epoch(double e0_j, double horizon_s, const RateModel& model,
                                       const CircuitModel& circuit) {
    if (e0_j < 0.0) throw std::invalid_argument("single epoch: energy must be non-negative");
    if (!(horizon_s > 0.0)) throw std::invalid_argument("single epoch: horizon must be positive");
    SingleEpochSolution out;
    if (e0_j == 0.0) return out;  // all-off

    const double p_ee = compute_p_ee(model, circuit).p_ee_w;
    out.p_star_w = std::max(p_ee, e0_j / horizon_s - circuit.alpha_w);
    out.on_time_s = e0_j / (out.p_star_w + circuit.alpha_w);
    if (out.on_time_s > horizon_s) out.on_time_s = horizon_s;
    return out;
}

}  // namespace ehsched
