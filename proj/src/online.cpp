#include "ehsched/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ehsched/eeopt.hpp"

namespace ehsched {

ArrivalStats::ArrivalStats(double rate, double mean_energy)
    : rate_per_s(rate), mean_energy_j(mean_energy) {
    if (!(rate_per_s > 0.0)) throw std::invalid_argument("stats: arrival rate must be positive");
    if (!(mean_energy_j > 0.0))
        throw std::invalid_argument("stats: mean energy must be positive");
}

double p_star_zero(const EnergyProfile& profile, double p_ee_w, const CircuitModel& circuit) {
    double min_avg = std::numeric_limits<double>::infinity();
    const std::size_t n = profile.epoch_count();
    for (std::size_t i = 1; i <= n; ++i) {
        min_avg = std::min(min_avg, profile.window_energy(0, i) / profile.window_length(0, i));
    }
    return std::max(min_avg - circuit.alpha_w, p_ee_w);
}

double online_power(const OnlineState& state, const ArrivalStats& stats, double p_ee_w,
                    const CircuitModel& circuit) {
    if (state.stored_energy_j <= 0.0) return 0.0;
    const double remaining = state.horizon_s - state.time_s;
    // The expected available power can be negative; p_ee then wins the max.
    const double expected = state.stored_energy_j / remaining + stats.mean_power() - circuit.alpha_w;
    return std::max(expected, p_ee_w);
}

double eep_power(const OnlineState& state, double p_ee_w) {
    return state.stored_energy_j > 0.0 ? p_ee_w : 0.0;
}

EnpDecision enp_power(const OnlineState& state, const ArrivalStats& stats,
                      const CircuitModel& circuit) {
    EnpDecision out;
    const double neutral = stats.mean_power() - circuit.alpha_w;
    if (neutral <= 0.0) {
        out.degenerate = true;
        return out;  // stays off: neutralizing power would be non-positive
    }
    out.power_w = state.stored_energy_j > 0.0 ? neutral : 0.0;
    return out;
}

Policy parse_policy(std::string_view name) {
    if (name == "proposed") return Policy::proposed;
    if (name == "eep") return Policy::eep;
    if (name == "enp") return Policy::enp;
    if (name == "fixed-schedule" || name == "fixed_schedule") return Policy::fixed_schedule;
    throw std::invalid_argument("unknown policy: " + std::string(name));
}

std::string_view policy_name(Policy policy) {
    switch (policy) {
        case Policy::proposed: return "proposed";
        case Policy::eep: return "eep";
        case Policy::enp: return "enp";
        case Policy::fixed_schedule: return "fixed-schedule";
    }
    return "?";
}

SimTrace simulate(Policy policy, const EnergyProfile& realized, const RateModel& model,
                  const CircuitModel& circuit, const ArrivalStats& stats,
                  const SimOptions& options, const PowerSchedule* fixed) {
    double p_ee = 0.0;
    if (policy == Policy::proposed || policy == Policy::eep) {
        p_ee = compute_p_ee(model, circuit).p_ee_w;
    }
    return simulate_rate_fn(policy, realized, model.as_fn(), circuit, stats, p_ee, options, fixed);
}

SimTrace simulate_rate_fn(Policy policy, const EnergyProfile& realized, const RateFn& rate,
                          const CircuitModel& circuit, const ArrivalStats& stats, double p_ee_w,
                          const SimOptions& options, const PowerSchedule* fixed) {
    if (!(options.time_step_s > 0.0))
        throw std::invalid_argument("simulate: step must be positive");
    if (policy == Policy::fixed_schedule) {
        if (fixed == nullptr)
            throw std::invalid_argument("simulate: fixed-schedule policy needs a schedule");
        if (fixed->horizon() != realized.horizon())
            throw std::invalid_argument("simulate: schedule and profile horizons differ");
    }
    if ((policy == Policy::proposed || policy == Policy::enp) &&
        !(stats.rate_per_s > 0.0 && stats.mean_energy_j > 0.0)) {
        throw std::invalid_argument("simulate: policy needs valid arrival statistics");
    }

    const double horizon = realized.horizon();
    const double step = options.time_step_s;
    const std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-12));

    SimTrace trace;
    trace.enp_degenerate =
        policy == Policy::enp && stats.mean_power() <= circuit.alpha_w;

    double stored = realized.initial_energy();
    KahanSum bits;
    KahanSum credited;
    KahanSum consumed;
    credited.add(stored);

    const auto& arrivals = realized.arrivals();
    std::size_t next_arrival = 0;

    // Positions where the fixed schedule changes power; steps are split there
    // so a replay reproduces the continuous schedule exactly.
    std::vector<double> seg_bounds;
    std::size_t next_bound = 0;
    if (policy == Policy::fixed_schedule) {
        for (const Segment& s : fixed->segments()) {
            if (s.start_s > 0.0) seg_bounds.push_back(s.start_s);
        }
    }

    constexpr double kTimeEps = 1e-12;
    for (std::size_t s = 0; s < steps; ++s) {
        const double t_lo = static_cast<double>(s) * step;
        const double t_hi = std::min(static_cast<double>(s + 1) * step, horizon);

        // Sub-interval boundaries inside this step: arrival instants and, for
        // replays, schedule switch points. Each boundary also carries the
        // energy to credit at it.
        double cursor = t_lo;
        while (cursor < t_hi - kTimeEps) {
            double credit_here = 0.0;
            while (next_arrival < arrivals.size() &&
                   arrivals[next_arrival].time_s <= cursor + kTimeEps) {
                credit_here += arrivals[next_arrival].energy_j;
                ++next_arrival;
            }
            if (credit_here > 0.0) {
                stored += credit_here;
                credited.add(credit_here);
            }

            double until = t_hi;
            if (next_arrival < arrivals.size() &&
                arrivals[next_arrival].time_s < until - kTimeEps) {
                until = arrivals[next_arrival].time_s;
            }
            while (next_bound < seg_bounds.size() && seg_bounds[next_bound] <= cursor + kTimeEps)
                ++next_bound;
            if (next_bound < seg_bounds.size() && seg_bounds[next_bound] < until - kTimeEps) {
                until = seg_bounds[next_bound];
            }

            const double duration = until - cursor;
            const OnlineState state{cursor, stored, horizon};
            double power = 0.0;
            switch (policy) {
                case Policy::proposed: power = online_power(state, stats, p_ee_w, circuit); break;
                case Policy::eep: power = eep_power(state, p_ee_w); break;
                case Policy::enp: power = enp_power(state, stats, circuit).power_w; break;
                case Policy::fixed_schedule:
                    power = fixed->power_at(0.5 * (cursor + until));
                    break;
            }

            double on_fraction = 0.0;
            double delivered = 0.0;
            if (power > 0.0) {
                const double need = circuit.total_power(power) * duration;
                if (need <= stored) {
                    on_fraction = 1.0;
                    stored -= need;
                    consumed.add(need);
                } else if (stored > 0.0) {
                    on_fraction = stored / need;
                    consumed.add(stored);
                    stored = 0.0;  // drained exactly; off for the remainder
                }
                delivered = on_fraction * duration * rate(power);
                bits.add(delivered);
            }

            if (options.record_trace) {
                trace.records.push_back(
                    {cursor, state.stored_energy_j, power, on_fraction, delivered, duration,
                     credit_here});
            }
            cursor = until;
        }
    }

    trace.throughput_bits = bits.value();
    trace.residual_energy_j = stored;
    trace.credited_energy_j = credited.value();
    trace.consumed_energy_j = consumed.value();
    return trace;
}

}  // namespace ehsched
