#include "ehsched/multichannel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ehsched/eeopt.hpp"

namespace ehsched {

WaterFillResult water_fill(const MultiRateModel& model, double total_power_w) {
    if (total_power_w < 0.0)
        throw std::invalid_argument("water fill: total power must be non-negative");

    const std::size_t k_all = model.channel_count();
    WaterFillResult out;
    out.allocations_w.assign(k_all, 0.0);

    // Zero-gain channels never receive power and would have infinite floors.
    std::vector<std::size_t> usable;
    std::vector<double> floors;
    double min_floor = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_all; ++k) {
        if (model.gains()[k] > 0.0) {
            usable.push_back(k);
            floors.push_back(model.noise_floor(k));
            min_floor = std::min(min_floor, floors.back());
        }
    }

    if (total_power_w == 0.0) {
        out.water_level_w = min_floor;
        return out;
    }

    // Allocated power is continuous and increasing in the level; bracket and
    // bisect, then solve the level exactly over the detected active set.
    double lo = min_floor;
    double hi = min_floor + total_power_w;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double nu = 0.5 * (lo + hi);
        double allocated = 0.0;
        for (double f : floors) allocated += std::max(0.0, nu - f);
        if (allocated > total_power_w) {
            hi = nu;
        } else {
            lo = nu;
        }
    }
    double nu = 0.5 * (lo + hi);
    std::vector<bool> active(floors.size());
    for (std::size_t idx = 0; idx < floors.size(); ++idx) active[idx] = floors[idx] < nu;

    // Solve the level exactly over the detected set; a floor within rounding
    // distance of the bisected level can fall out again, so iterate until
    // every member sits strictly below the solved level.
    for (;;) {
        KahanSum floor_sum;
        std::size_t count = 0;
        for (std::size_t idx = 0; idx < floors.size(); ++idx) {
            if (active[idx]) {
                floor_sum.add(floors[idx]);
                ++count;
            }
        }
        if (count == 0) {  // degenerate bracket collapse; lowest floor wins
            for (std::size_t idx = 0; idx < floors.size(); ++idx)
                active[idx] = floors[idx] == min_floor;
            continue;
        }
        nu = (total_power_w + floor_sum.value()) / static_cast<double>(count);
        bool stable = true;
        for (std::size_t idx = 0; idx < floors.size(); ++idx) {
            if (active[idx] && floors[idx] >= nu) {
                active[idx] = false;
                stable = false;
            }
        }
        if (stable) break;
    }

    out.water_level_w = nu;
    KahanSum assigned;
    std::size_t last_active = 0;
    for (std::size_t idx = 0; idx < floors.size(); ++idx) {
        if (active[idx]) {
            const double q = nu - floors[idx];
            out.allocations_w[usable[idx]] = q;
            out.active_set.push_back(usable[idx]);
            assigned.add(q);
            last_active = usable[idx];
        }
    }
    // Absorb the closing rounding error into one active channel so the
    // allocations sum to the request exactly.
    out.allocations_w[last_active] =
        std::max(out.allocations_w[last_active] + (total_power_w - assigned.value()), 0.0);
    return out;
}

double reduced_rate(const MultiRateModel& model, double total_power_w) {
    if (total_power_w <= 0.0) {
        if (total_power_w < 0.0)
            throw std::invalid_argument("reduced rate: power must be non-negative");
        return 0.0;
    }
    const WaterFillResult wf = water_fill(model, total_power_w);
    KahanSum bits;
    for (std::size_t k = 0; k < model.channel_count(); ++k)
        bits.add(model.channel_rate(k, wf.allocations_w[k]));
    return bits.value();
}

MultiEePower compute_p_ee_mc(const MultiRateModel& model, const CircuitModel& circuit) {
    const double alpha = circuit.alpha_w;
    auto rbar = [&model](double p) { return reduced_rate(model, p); };
    // Central-difference slope of the EE ratio numerator; the difference step
    // scales with P so bracket expansion stays accurate over many decades.
    auto slope = [&rbar, alpha](double p) {
        const double h = 1e-6 * std::max(p, 1e-6);
        const double d = (rbar(p + h) - rbar(std::max(p - h, 0.0))) / (2.0 * h);
        return d * (p + alpha) - rbar(p);
    };
    const EePower ee = compute_p_ee_generic(rbar, slope, alpha);

    MultiEePower out;
    out.p_ee_w = ee.p_ee_w;
    out.ee_bits_per_joule = ee.ee_bits_per_joule;
    out.iterations = ee.iterations;
    out.residual_w = ee.residual_w;
    out.q_ee_w = water_fill(model, ee.p_ee_w).allocations_w;
    return out;
}

MultiOfflineSolution solve_offline_mc(const EnergyProfile& profile, const MultiRateModel& model,
                                      const CircuitModel& circuit) {
    if (!(circuit.alpha_w > 0.0))
        throw std::domain_error("multichannel offline: alpha must be positive");

    auto rbar = [&model](double p) { return reduced_rate(model, p); };
    const double p_ee = compute_p_ee_mc(model, circuit).p_ee_w;

    MultiOfflineSolution out;
    out.scalar = solve_offline_reduced(profile, rbar, p_ee, circuit);

    std::vector<MultiSegment> segments;
    segments.reserve(out.scalar.schedule.segments().size());
    for (const Segment& s : out.scalar.schedule.segments()) {
        MultiSegment ms;
        ms.start_s = s.start_s;
        ms.end_s = s.end_s;
        if (s.power_w > 0.0) {
            ms.powers_w = water_fill(model, s.power_w).allocations_w;
        } else {
            ms.powers_w.assign(model.channel_count(), 0.0);
        }
        segments.push_back(std::move(ms));
    }
    out.schedule = MultiPowerSchedule(std::move(segments), profile.horizon());
    out.throughput_bits = out.scalar.throughput_bits;
    return out;
}

}  // namespace ehsched
