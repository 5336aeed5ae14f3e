// Shared fixtures for the test suites: the band-limited AWGN example setup
// used throughout (1 MHz, -80 dB gain, alpha = 115.9 mW, the 7-epoch arrival
// profile over 20 s) and seeded random-instance generators.
#pragma once

#include <cstdint>
#include <vector>

#include "ehsched/model.hpp"
#include "ehsched/stochastics.hpp"

namespace test_support {

inline ehsched::RateModel example_model() { return {1e6, 1e-16, 1.0, 1e-8}; }

inline ehsched::CircuitModel example_circuit() { return ehsched::CircuitModel(0.1159); }

inline ehsched::EnergyProfile example_profile() {
    return ehsched::validate_profile(
        0.5, {{4.0, 0.5}, {6.0, 0.5}, {11.0, 1.0}, {14.0, 0.5}, {16.0, 0.75}, {18.0, 0.5}}, 20.0);
}

struct ProfileParams {
    std::size_t max_arrivals = 6;
    double horizon_lo = 4.0;
    double horizon_hi = 20.0;
    double amount_lo = 0.05;
    double amount_hi = 1.0;
    double e0_lo = 0.0;
    double e0_hi = 1.0;
};

inline ehsched::EnergyProfile random_profile(ehsched::Rng& rng, const ProfileParams& params = {}) {
    const double horizon = rng.uniform(params.horizon_lo, params.horizon_hi);
    const auto count =
        static_cast<std::size_t>(rng.uniform_open01() * static_cast<double>(params.max_arrivals + 1));
    for (;;) {
        std::vector<double> times(count);
        for (auto& t : times) t = rng.uniform(0.0, horizon);
        std::sort(times.begin(), times.end());
        bool distinct = true;
        for (std::size_t i = 1; i < times.size(); ++i)
            distinct = distinct && times[i] > times[i - 1];
        if (!distinct) continue;
        std::vector<ehsched::Arrival> arrivals(count);
        for (std::size_t i = 0; i < count; ++i)
            arrivals[i] = {times[i], rng.uniform(params.amount_lo, params.amount_hi)};
        return ehsched::validate_profile(rng.uniform(params.e0_lo, params.e0_hi),
                                         std::move(arrivals), horizon);
    }
}

// A channel in the same family as the example but with randomized SNR slope
// and circuit power, for property tests that should not depend on one setup.
inline ehsched::RateModel random_model(ehsched::Rng& rng) {
    const double gain_db = rng.uniform(-90.0, -70.0);
    return {1e6, 1e-16, 1.0, ehsched::db_to_linear(gain_db)};
}

inline ehsched::CircuitModel random_circuit(ehsched::Rng& rng) {
    return ehsched::CircuitModel(rng.uniform(0.02, 0.4));
}

}  // namespace test_support
