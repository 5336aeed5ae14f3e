#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ehsched/model.hpp"
#include "ehsched/stochastics.hpp"
#include "test_support.hpp"

using namespace ehsched;

TEST_SUITE_BEGIN("model");

TEST_CASE("example profile validates into seven epochs") {
    const EnergyProfile profile = test_support::example_profile();
    REQUIRE(profile.epoch_count() == 7);
    const double expected_lengths[] = {4, 2, 5, 3, 2, 2, 2};
    const double expected_energy[] = {0.5, 0.5, 0.5, 1.0, 0.5, 0.75, 0.5};
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(profile.epoch_length(i) == doctest::Approx(expected_lengths[i]).epsilon(1e-15));
        CHECK(profile.epoch_energy(i) == expected_energy[i]);
    }
    CHECK(profile.epoch_start(3) == 11.0);
    CHECK(profile.epoch_end(6) == 20.0);
    CHECK(profile.total_energy() == doctest::Approx(4.25).epsilon(1e-15));
}

TEST_CASE("profile with no arrivals is a single epoch") {
    const EnergyProfile profile = validate_profile(1.0, {}, 10.0);
    REQUIRE(profile.epoch_count() == 1);
    CHECK(profile.epoch_length(0) == 10.0);
    CHECK(profile.epoch_energy(0) == 1.0);
}

TEST_CASE("profile validation reports the offending arrival") {
    CHECK_THROWS_WITH_AS(validate_profile(0.5, {{5.0, 0.2}, {5.0, 0.2}}, 10.0),
                         doctest::Contains("arrival 1"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_profile(0.5, {{10.0, 0.2}}, 10.0),
                         doctest::Contains("inside the horizon"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_profile(0.5, {{2.0, 0.0}}, 10.0),
                         doctest::Contains("positive"), std::invalid_argument);
    CHECK_THROWS_AS(validate_profile(-0.1, {}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(validate_profile(0.5, {}, 0.0), std::invalid_argument);
}

TEST_CASE("epoch lengths tile the horizon exactly on random profiles") {
    Rng rng(20240101);
    for (int i = 0; i < 200; ++i) {
        const EnergyProfile profile = test_support::random_profile(rng);
        KahanSum total;
        for (std::size_t e = 0; e < profile.epoch_count(); ++e) total.add(profile.epoch_length(e));
        CHECK(std::abs(total.value() - profile.horizon()) <= 1e-12 * profile.horizon());
        CHECK(profile.window_length(0, profile.epoch_count()) ==
              doctest::Approx(profile.horizon()).epsilon(1e-14));
    }
}

TEST_CASE("awgn rate formula") {
    const RateModel model = test_support::example_model();
    CHECK(model.snr_per_watt() == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(model.rate(0.0) == 0.0);
    // effective SNR 100/W: 10 mW doubles the argument of the log
    CHECK(model.rate(0.01) == doctest::Approx(1e6).epsilon(1e-12));
    CHECK(model.rate(0.0792) == doctest::Approx(3157043.7101455806).epsilon(1e-12));
    CHECK_THROWS_AS(model.rate(-0.001), std::invalid_argument);
    CHECK_THROWS_AS(RateModel(1e6, 1e-16, 0.5, 1e-8), std::invalid_argument);
}

TEST_CASE("rate is strictly increasing and midpoint-concave on a grid") {
    Rng rng(7);
    const RateModel model = test_support::example_model();
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double p = 0.002 * i;
        const double r = model.rate(p);
        CHECK(r > prev);
        prev = r;
    }
    for (int i = 0; i < 500; ++i) {
        const double a = rng.uniform(0.0, 2.0);
        const double b = rng.uniform(0.0, 2.0);
        if (std::abs(a - b) < 1e-12 * std::max(a, b)) continue;
        const double mid = model.rate(0.5 * (a + b));
        const double chord = 0.5 * (model.rate(a) + model.rate(b));
        CHECK(mid > chord);
    }
}

TEST_CASE("all-off schedule has zero throughput and is feasible") {
    const auto eval = evaluate_schedule(PowerSchedule::all_off(20.0), test_support::example_model(),
                                        test_support::example_circuit(),
                                        test_support::example_profile());
    CHECK(eval.throughput_bits == 0.0);
    CHECK(eval.feasible);
    CHECK(eval.max_violation_j == 0.0);
}

TEST_CASE("overdraw before the first arrival is reported with its magnitude") {
    // One epoch of budget E0 = 0.5 J; burning 0.5 + eps J before t_1 = 4 s.
    const EnergyProfile profile = test_support::example_profile();
    const CircuitModel circuit = test_support::example_circuit();
    const double eps = 1e-3;
    const double power = (0.5 + eps) / 2.0 - circuit.alpha_w;  // over 2 s
    PowerSchedule schedule({{0.0, 2.0, power}, {2.0, 20.0, 0.0}}, 20.0);
    const auto eval =
        evaluate_schedule(schedule, test_support::example_model(), circuit, profile);
    CHECK_FALSE(eval.feasible);
    CHECK(eval.max_violation_j == doctest::Approx(eps).epsilon(1e-9));
}

TEST_CASE("evaluation rejects mismatched horizons") {
    CHECK_THROWS_AS(evaluate_schedule(PowerSchedule::all_off(19.0), test_support::example_model(),
                                      test_support::example_circuit(),
                                      test_support::example_profile()),
                    std::invalid_argument);
}

TEST_CASE("throughput is invariant under splitting a segment") {
    Rng rng(99);
    const RateModel model = test_support::example_model();
    const CircuitModel circuit = test_support::example_circuit();
    for (int i = 0; i < 100; ++i) {
        const EnergyProfile profile = test_support::random_profile(rng);
        const double horizon = profile.horizon();
        const double cut = rng.uniform(0.1 * horizon, 0.9 * horizon);
        const double p1 = rng.uniform(0.0, 0.3);
        const double p2 = rng.uniform(0.0, 0.3);
        PowerSchedule whole({{0.0, cut, p1}, {cut, horizon, p2}}, horizon);
        // split the first segment into two equal-power halves
        PowerSchedule split({{0.0, 0.5 * cut, p1}, {0.5 * cut, cut, p1}, {cut, horizon, p2}},
                            horizon);
        const auto a = evaluate_schedule(whole, model, circuit, profile);
        const auto b = evaluate_schedule(split, model, circuit, profile);
        CHECK(a.throughput_bits == doctest::Approx(b.throughput_bits).epsilon(1e-12));
        CHECK(a.feasible == b.feasible);
    }
}

TEST_CASE("schedule tiling violations are rejected") {
    CHECK_THROWS_AS(PowerSchedule({{0.0, 5.0, 0.1}}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(PowerSchedule({{1.0, 10.0, 0.1}}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(PowerSchedule({{0.0, 5.0, 0.1}, {6.0, 10.0, 0.1}}, 10.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(PowerSchedule({{0.0, 5.0, -0.1}, {5.0, 10.0, 0.1}}, 10.0),
                    std::invalid_argument);
}

TEST_CASE("unit conversions") {
    CHECK(db_to_linear(-80.0) == doctest::Approx(1e-8).epsilon(1e-12));
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(dbm_per_hz_to_w_per_hz(-174.0) == doctest::Approx(3.9810717055349565e-21).epsilon(1e-12));
}

TEST_SUITE_END();
