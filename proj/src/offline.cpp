#include "ehsched/offline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "ehsched/eeopt.hpp"

namespace ehsched {

IeeResult compute_i_ee(const EnergyProfile& profile, double p_ee_w, const CircuitModel& circuit) {
    IeeResult out;
    const std::size_t n = profile.epoch_count();
    const double threshold = p_ee_w + circuit.alpha_w;
    std::size_t prev = 0;
    while (prev < n) {
        std::size_t found = 0;
        bool any = false;
        for (std::size_t i = prev + 1; i <= n; ++i) {
            const double avg =
                profile.window_energy(prev, i) / profile.window_length(prev, i);
            if (avg <= threshold) {
                found = i;
                any = true;
                break;
            }
        }
        if (!any) break;
        out.boundaries.push_back(found);
        prev = found;
    }
    out.i_ee = prev;
    return out;
}

std::vector<StaircaseGroup> staircase_groups(const EnergyProfile& profile, std::size_t from_epoch,
                                             const CircuitModel& circuit) {
    std::vector<StaircaseGroup> out;
    const std::size_t n = profile.epoch_count();
    std::size_t prev = from_epoch;
    while (prev < n) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = prev + 1;
        for (std::size_t j = prev + 1; j <= n; ++j) {
            const double avg =
                profile.window_energy(prev, j) / profile.window_length(prev, j);
            // <= extends each constant-power group maximally on ties
            if (avg <= best) {
                best = avg;
                best_j = j;
            }
        }
        StaircaseGroup g;
        g.first_epoch = prev;
        g.last_epoch = best_j;
        g.avg_total_power_w = best;
        g.transmit_power_w = std::max(best - circuit.alpha_w, 0.0);
        out.push_back(g);
        prev = best_j;
    }
    return out;
}

namespace {

double schedule_throughput(const PowerSchedule& schedule, const RateFn& rate) {
    KahanSum bits;
    for (const Segment& s : schedule.segments()) bits.add(s.length() * rate(s.power_w));
    return bits.value();
}

TwoPhaseSolution assemble_two_phase(const EnergyProfile& profile, const RateFn& rate,
                                    const CircuitModel& circuit, double p_ee_w,
                                    const IeeResult& iee) {
    const std::size_t n = profile.epoch_count();
    const double on_cost = p_ee_w + circuit.alpha_w;

    TwoPhaseSolution sol;
    sol.i_ee = iee.i_ee;
    sol.p_ee_w = p_ee_w;
    sol.epoch_powers_w.assign(n, 0.0);

    std::vector<Segment> segments;
    KahanSum spent_on;  // total on-time so far in the EE phase

    // EE phase: on-period packed at each epoch start, budget carried forward.
    for (std::size_t i = 0; i < iee.i_ee; ++i) {
        const double budget = profile.window_energy(0, i + 1) / on_cost - spent_on.value();
        const double on = std::clamp(budget, 0.0, profile.epoch_length(i));
        sol.ee_on_times_s.push_back(on);
        spent_on.add(on);
        sol.epoch_powers_w[i] = on > 0.0 ? p_ee_w : 0.0;

        const double start = profile.epoch_start(i);
        const double end = profile.epoch_end(i);
        if (on >= profile.epoch_length(i)) {
            segments.push_back({start, end, p_ee_w});
        } else if (on > 0.0) {
            const double mid = std::min(start + on, end);
            segments.push_back({start, mid, p_ee_w});
            segments.push_back({mid, end, 0.0});
        } else {
            segments.push_back({start, end, 0.0});
        }
    }

    // Staircase phase: always on, one segment per constant-power group.
    sol.staircase = staircase_groups(profile, iee.i_ee, circuit);
    for (const StaircaseGroup& g : sol.staircase) {
        segments.push_back({profile.epoch_start(g.first_epoch),
                            profile.epoch_end(g.last_epoch - 1), g.transmit_power_w});
        for (std::size_t i = g.first_epoch; i < g.last_epoch; ++i)
            sol.epoch_powers_w[i] = g.transmit_power_w;
    }

    sol.schedule = PowerSchedule(std::move(segments), profile.horizon());
    sol.throughput_bits = schedule_throughput(sol.schedule, rate);
    return sol;
}

}  // namespace

TwoPhaseSolution solve_offline_reduced(const EnergyProfile& profile, const RateFn& rate,
                                       double p_ee_w, const CircuitModel& circuit) {
    IeeResult iee;
    if (circuit.alpha_w > 0.0) {
        iee = compute_i_ee(profile, p_ee_w, circuit);
    } else {
        p_ee_w = 0.0;  // no EE phase; the whole block is the staircase regime
    }
    return assemble_two_phase(profile, rate, circuit, p_ee_w, iee);
}

TwoPhaseSolution solve_offline(const EnergyProfile& profile, const RateModel& model,
                               const CircuitModel& circuit) {
    const double p_ee =
        circuit.alpha_w > 0.0 ? compute_p_ee(model, circuit).p_ee_w : 0.0;
    return solve_offline_reduced(profile, model.as_fn(), p_ee, circuit);
}

PowerSchedule solve_staircase(const EnergyProfile& profile, const RateModel& model,
                              const CircuitModel& circuit) {
    (void)model;
    std::vector<Segment> segments;
    for (const StaircaseGroup& g : staircase_groups(profile, 0, circuit)) {
        segments.push_back({profile.epoch_start(g.first_epoch),
                            profile.epoch_end(g.last_epoch - 1), g.transmit_power_w});
    }
    return PowerSchedule(std::move(segments), profile.horizon());
}

namespace {

constexpr std::size_t kMaxSlots = 2000;
constexpr std::size_t kMaxStates = 300'000'000;  // slots x energy bins

}  // namespace

DpOracleResult dp_oracle(const EnergyProfile& profile, const RateModel& model,
                         const CircuitModel& circuit, double time_step_s,
                         const std::vector<double>& power_grid_w, double energy_bin_j) {
    return dp_oracle(profile, model.as_fn(), circuit, time_step_s, power_grid_w, energy_bin_j);
}

DpOracleResult dp_oracle(const EnergyProfile& profile, const RateFn& rate,
                         const CircuitModel& circuit, double time_step_s,
                         const std::vector<double>& power_grid_w, double energy_bin_j) {
    if (!(time_step_s > 0.0)) throw std::invalid_argument("dp oracle: step must be positive");
    if (!(energy_bin_j > 0.0)) throw std::invalid_argument("dp oracle: bin must be positive");

    std::vector<double> grid = power_grid_w;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.empty() || grid.front() != 0.0)
        throw std::invalid_argument("dp oracle: power grid must contain 0");
    if (grid.back() < 0.0 || grid.size() > 255)
        throw std::invalid_argument("dp oracle: power grid out of range");

    const double horizon = profile.horizon();
    const std::size_t slots = static_cast<std::size_t>(std::ceil(horizon / time_step_s - 1e-9));
    if (slots == 0 || slots > kMaxSlots)
        throw std::invalid_argument("dp oracle: state-space budget exceeded (slots)");

    DpOracleResult out;
    out.slot_count = slots;

    const double total = profile.total_energy();
    if (total <= 0.0) {
        out.schedule = PowerSchedule::all_off(horizon);
        out.energy_bin_j = energy_bin_j;
        return out;
    }
    const double bin = std::min({energy_bin_j, 1e-4, total / 20000.0});
    out.energy_bin_j = bin;

    auto boundary = [&](std::size_t s) { return std::min(static_cast<double>(s) * time_step_s, horizon); };

    // Credits land on the first slot boundary at or after the arrival time;
    // amounts round down to whole bins so the quantized system never admits
    // more energy than the real one.
    std::vector<std::int64_t> credits(slots + 1, 0);
    credits[0] = static_cast<std::int64_t>(std::floor(profile.initial_energy() / bin));
    for (const Arrival& a : profile.arrivals()) {
        auto s = static_cast<std::size_t>(std::ceil(a.time_s / time_step_s - 1e-12));
        s = std::min(s, slots);
        credits[s] += static_cast<std::int64_t>(std::floor(a.energy_j / bin));
    }
    std::int64_t cap = 0;
    for (std::int64_t c : credits) cap += c;
    const std::size_t states = static_cast<std::size_t>(cap) + 1;
    if (states * slots > kMaxStates)
        throw std::invalid_argument("dp oracle: state-space budget exceeded (energy bins)");

    // Consumption rounds up to whole bins; a separate column handles the
    // (possibly shorter) final slot.
    const double last_dur = boundary(slots) - boundary(slots - 1);
    const std::size_t k_powers = grid.size();
    std::vector<std::int64_t> cost_full(k_powers), cost_last(k_powers);
    std::vector<double> gain_full(k_powers), gain_last(k_powers);
    for (std::size_t k = 0; k < k_powers; ++k) {
        const double p_total = circuit.total_power(grid[k]);
        cost_full[k] = static_cast<std::int64_t>(std::ceil(p_total * time_step_s / bin - 1e-9));
        cost_last[k] = static_cast<std::int64_t>(std::ceil(p_total * last_dur / bin - 1e-9));
        gain_full[k] = time_step_s * rate(grid[k]);
        gain_last[k] = last_dur * rate(grid[k]);
    }

    std::vector<double> value(states, 0.0);   // V at slot s, post-credit
    std::vector<double> shifted(states, 0.0); // V at slot s+1 seen from slot s
    std::vector<std::uint8_t> choice(states * slots, 0);

    for (std::size_t s = slots; s-- > 0;) {
        const bool last = (s + 1 == slots);
        const auto& cost = last ? cost_last : cost_full;
        const auto& gain = last ? gain_last : gain_full;

        const std::int64_t credit_next = credits[s + 1];
        if (credit_next == 0) {
            shifted.swap(value);
        } else {
            for (std::size_t e = 0; e < states; ++e)
                shifted[e] = value[std::min<std::size_t>(e + credit_next, states - 1)];
        }

        std::uint8_t* slot_choice = choice.data() + s * states;
        // Power 0 (cost 0, gain 0) is always admissible.
        std::copy(shifted.begin(), shifted.end(), value.begin());
        std::fill(slot_choice, slot_choice + states, 0);
        for (std::size_t k = 1; k < k_powers; ++k) {
            const std::int64_t c = cost[k];
            if (c <= 0 || static_cast<std::size_t>(c) >= states) continue;
            const double g = gain[k];
            for (std::size_t e = static_cast<std::size_t>(c); e < states; ++e) {
                const double cand = shifted[e - c] + g;
                if (cand > value[e]) {
                    value[e] = cand;
                    slot_choice[e] = static_cast<std::uint8_t>(k);
                }
            }
        }
    }

    const std::size_t start_state = static_cast<std::size_t>(credits[0]);
    out.throughput_bits = value[start_state];

    // Reconstruct the slot decisions and merge equal-power runs.
    std::vector<Segment> segments;
    std::int64_t e = credits[0];
    for (std::size_t s = 0; s < slots; ++s) {
        const bool last = (s + 1 == slots);
        const std::size_t k = choice[s * states + static_cast<std::size_t>(e)];
        const double p = grid[k];
        const double lo = boundary(s);
        const double hi = boundary(s + 1);
        if (!segments.empty() && segments.back().power_w == p) {
            segments.back().end_s = hi;
        } else {
            segments.push_back({lo, hi, p});
        }
        e -= last ? cost_last[k] : cost_full[k];
        e = std::min(e + credits[s + 1], cap);
    }
    out.schedule = PowerSchedule(std::move(segments), horizon);
    return out;
}

std::vector<double> make_oracle_power_grid(const EnergyProfile& profile, double p_ee_w,
                                           const CircuitModel& circuit, std::size_t points) {
    if (points < 4) throw std::invalid_argument("oracle grid: too few points");
    double max_avg = 0.0;
    const std::size_t n = profile.epoch_count();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b <= n; ++b)
            max_avg = std::max(max_avg,
                               profile.window_energy(a, b) / profile.window_length(a, b));

    const double cap = 1.3 * std::max(p_ee_w, max_avg - circuit.alpha_w);
    std::vector<double> grid{0.0};
    if (p_ee_w > 0.0) grid.push_back(p_ee_w);
    if (cap > 0.0) {
        const std::size_t lin = points - grid.size();
        for (std::size_t k = 1; k <= lin; ++k)
            grid.push_back(cap * static_cast<double>(k) / static_cast<double>(lin));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

}  // namespace ehsched
