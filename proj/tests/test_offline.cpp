#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ehsched/eeopt.hpp"
#include "ehsched/offline.hpp"
#include "ehsched/stochastics.hpp"
#include "test_support.hpp"

using namespace ehsched;

TEST_SUITE_BEGIN("offline");

namespace {

double p_ee_example() {
    return compute_p_ee(test_support::example_model(), test_support::example_circuit()).p_ee_w;
}

EnergyProfile random_small_instance(Rng& rng) {
    // N <= 3 epochs, arrival times on a 0.1 s lattice so slot boundaries of
    // the oracle grids (0.05 and 0.025 s) line up with the arrivals.
    const double horizon = 0.1 * std::floor(rng.uniform(30.0, 100.0));
    const auto n_arrivals = static_cast<std::size_t>(rng.uniform_open01() * 3.0);
    for (;;) {
        std::vector<double> times(n_arrivals);
        for (auto& t : times) t = 0.1 * std::floor(rng.uniform(5.0, horizon * 10.0 - 5.0));
        std::sort(times.begin(), times.end());
        bool ok = true;
        for (std::size_t i = 1; i < times.size(); ++i) ok = ok && times[i] > times[i - 1];
        if (!ok) continue;
        std::vector<Arrival> arrivals(n_arrivals);
        for (std::size_t i = 0; i < n_arrivals; ++i)
            arrivals[i] = {times[i], rng.uniform(0.05, 0.4)};
        return validate_profile(rng.uniform(0.05, 0.5), std::move(arrivals), horizon);
    }
}

}  // namespace

TEST_CASE("example profile ends its EE phase at the third arrival") {
    const auto result =
        compute_i_ee(test_support::example_profile(), p_ee_example(), test_support::example_circuit());
    CHECK(result.i_ee == 3);
    REQUIRE(result.boundaries.size() == 2);
    CHECK(result.boundaries[0] == 1);
    CHECK(result.boundaries[1] == 3);
    CHECK(test_support::example_profile().epoch_start(result.i_ee) == 11.0);
}

TEST_CASE("huge initial store leaves no EE phase") {
    const EnergyProfile profile = validate_profile(50.0, {{5.0, 1.0}}, 10.0);
    const auto result = compute_i_ee(profile, p_ee_example(), test_support::example_circuit());
    CHECK(result.i_ee == 0);
    CHECK(result.boundaries.empty());
}

TEST_CASE("single lean epoch is fully EE phase") {
    const EnergyProfile profile = validate_profile(0.5, {}, 20.0);
    const auto result = compute_i_ee(profile, p_ee_example(), test_support::example_circuit());
    CHECK(result.i_ee == 1);
}

TEST_CASE("example schedule reaches 63.14 Mbits with the two-phase shape") {
    const RateModel model = test_support::example_model();
    const CircuitModel circuit = test_support::example_circuit();
    const EnergyProfile profile = test_support::example_profile();
    const TwoPhaseSolution sol = solve_offline(profile, model, circuit);

    CHECK(sol.i_ee == 3);
    CHECK(std::abs(sol.throughput_bits - 63.14e6) <= 0.02e6);

    // phase 2 staircase over (11, 20]: non-decreasing group powers
    REQUIRE(sol.staircase.size() == 2);
    CHECK(sol.staircase[0].transmit_power_w <= sol.staircase[1].transmit_power_w);
    CHECK(sol.staircase[0].avg_total_power_w == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(sol.staircase[1].avg_total_power_w == doctest::Approx(0.3125).epsilon(1e-12));

    const auto eval = evaluate_schedule(sol.schedule, model, circuit, profile);
    CHECK(eval.feasible);
    CHECK(eval.throughput_bits == doctest::Approx(sol.throughput_bits).epsilon(1e-12));
}

TEST_CASE("single-epoch profile reduces to the closed form") {
    const RateModel model = test_support::example_model();
    const CircuitModel circuit = test_support::example_circuit();
    const EnergyProfile profile = validate_profile(0.5, {}, 20.0);
    const TwoPhaseSolution sol = solve_offline(profile, model, circuit);
    const auto single = solve_single_epoch(0.5, 20.0, model, circuit);
    REQUIRE(sol.ee_on_times_s.size() == 1);
    CHECK(sol.ee_on_times_s[0] == doctest::Approx(single.on_time_s).epsilon(1e-12));
    CHECK(sol.schedule.segments().front().power_w == doctest::Approx(single.p_star_w).epsilon(1e-12));
    CHECK(sol.throughput_bits ==
          doctest::Approx(single.on_time_s * model.rate(single.p_star_w)).epsilon(1e-12));
}

TEST_CASE("baseline staircase achieves 55.80 Mbits on the example") {
    const RateModel model = test_support::example_model();
    const CircuitModel circuit = test_support::example_circuit();
    const EnergyProfile profile = test_support::example_profile();
    const PowerSchedule schedule = solve_staircase(profile, model, circuit);
    const auto eval = evaluate_schedule(schedule, model, circuit, profile);
    CHECK(eval.feasible);
    CHECK(std::abs(eval.throughput_bits - 55.80e6) <= 0.02e6);

    double prev = -1.0;
    for (const Segment& s : schedule.segments()) {
        CHECK(s.power_w >= prev);
        prev = s.power_w;
    }
}

TEST_CASE("ideal-circuit staircase on one epoch is constant power") {
    const RateModel model = test_support::example_model();
    const EnergyProfile profile = validate_profile(1.0, {}, 10.0);
    const PowerSchedule schedule = solve_staircase(profile, model, CircuitModel(0.0));
    REQUIRE(schedule.segments().size() == 1);
    CHECK(schedule.segments()[0].power_w == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("staircase group minima match direct enumeration") {
    Rng rng(41);
    for (int inst = 0; inst < 100; ++inst) {
        const EnergyProfile profile = test_support::random_profile(rng);
        const CircuitModel circuit = test_support::random_circuit(rng);
        const auto groups = staircase_groups(profile, 0, circuit);
        REQUIRE(!groups.empty());
        CHECK(groups.front().first_epoch == 0);
        CHECK(groups.back().last_epoch == profile.epoch_count());
        double prev = -1e300;
        for (const auto& g : groups) {
            CHECK(g.avg_total_power_w >= prev);
            prev = g.avg_total_power_w;
            // the group boundary is an argmin of the window average
            double min_avg = 1e300;
            for (std::size_t j = g.first_epoch + 1; j <= profile.epoch_count(); ++j) {
                min_avg = std::min(min_avg, profile.window_energy(g.first_epoch, j) /
                                                profile.window_length(g.first_epoch, j));
            }
            CHECK(g.avg_total_power_w == doctest::Approx(min_avg).epsilon(1e-12));
        }
    }
}

TEST_CASE("equal window averages tie-break to the longest group") {
    // Two epochs of 5 s fed 1 J each: both prefixes average 0.2 W.
    const EnergyProfile profile = validate_profile(1.0, {{5.0, 1.0}}, 10.0);
    const CircuitModel circuit(0.05);
    const auto groups = staircase_groups(profile, 0, circuit);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].last_epoch == 2);
    CHECK(groups[0].avg_total_power_w == doctest::Approx(0.2).epsilon(1e-15));

    // Splitting at the tie instead gives the same throughput.
    const RateModel model = test_support::example_model();
    const double tied = model.rate(0.2 - 0.05) * 10.0;
    const double split = model.rate(0.2 - 0.05) * 5.0 + model.rate(0.2 - 0.05) * 5.0;
    CHECK(tied == doctest::Approx(split).epsilon(1e-15));
}

TEST_CASE("structural invariants hold on randomized instances") {
    Rng rng(53);
    const RateModel model = test_support::example_model();
    for (int inst = 0; inst < 300; ++inst) {
        const CircuitModel circuit = test_support::random_circuit(rng);
        const EnergyProfile profile = test_support::random_profile(rng);
        const TwoPhaseSolution sol = solve_offline(profile, model, circuit);
        const double p_ee = sol.p_ee_w;

        // at most one positive level per epoch, equal to p_ee inside the EE phase
        for (std::size_t i = 0; i < sol.i_ee; ++i) {
            if (sol.ee_on_times_s[i] > 0.0)
                CHECK(sol.epoch_powers_w[i] == doctest::Approx(p_ee).epsilon(1e-12));
        }
        // the EE phase consumes exactly the energy credited before its end
        if (sol.i_ee > 0) {
            KahanSum on_total;
            for (double t : sol.ee_on_times_s) on_total.add(t);
            const double consumed = (p_ee + circuit.alpha_w) * on_total.value();
            CHECK(std::abs(consumed - profile.window_energy(0, sol.i_ee)) <= 1e-9);
        }
        // feasibility at every arrival instant and full exhaustion at T
        const auto eval = evaluate_schedule(sol.schedule, model, circuit, profile);
        CHECK(eval.feasible);
        KahanSum consumed_total;
        for (const Segment& s : sol.schedule.segments())
            consumed_total.add(s.length() * circuit.total_power(s.power_w));
        CHECK(std::abs(consumed_total.value() - profile.total_energy()) <= 1e-9);

        // staircase phase powers non-decreasing
        for (std::size_t g = 1; g < sol.staircase.size(); ++g)
            CHECK(sol.staircase[g].transmit_power_w >= sol.staircase[g - 1].transmit_power_w);

        // baseline never beats the optimum
        const auto base = evaluate_schedule(solve_staircase(profile, model, circuit), model,
                                            circuit, profile);
        CHECK(base.feasible);
        CHECK(sol.throughput_bits >= base.throughput_bits - 1e-6 * std::max(1.0, base.throughput_bits));
        CHECK(base.throughput_bits >= 0.0);
    }
}

TEST_CASE("dp oracle on a single slot picks the affordable maximum") {
    const RateModel model = test_support::example_model();
    const CircuitModel circuit = test_support::example_circuit();
    const EnergyProfile profile = validate_profile(0.05, {}, 1.0);
    // 0.05 J buys (0.05 - alpha) ... nothing at 0.1 W for a full second;
    // the DP may still transmit: cost(0.1 + alpha) = 0.2159 J > 0.05 J, so off.
    const auto res = dp_oracle(profile, model, circuit, 1.0, {0.0, 0.1});
    CHECK(res.throughput_bits == 0.0);

    const EnergyProfile rich = validate_profile(0.5, {}, 1.0);
    const auto res2 = dp_oracle(rich, model, circuit, 1.0, {0.0, 0.1});
    CHECK(res2.throughput_bits == doctest::Approx(model.rate(0.1)).epsilon(1e-12));
    CHECK(res2.schedule.segments().front().power_w == 0.1);
}

TEST_CASE("dp oracle certifies the two-phase solver on a toy instance") {
    const RateModel model = test_support::example_model();
    const CircuitModel circuit = test_support::example_circuit();
    const EnergyProfile profile = validate_profile(0.3, {{5.0, 0.3}}, 10.0);
    const TwoPhaseSolution sol = solve_offline(profile, model, circuit);
    const auto grid = make_oracle_power_grid(profile, sol.p_ee_w, circuit, 64);
    const auto res = dp_oracle(profile, model, circuit, 0.05, grid);
    CHECK(res.throughput_bits <= sol.throughput_bits * (1 + 1e-12));
    CHECK((sol.throughput_bits - res.throughput_bits) / sol.throughput_bits <= 0.01);
    // the oracle schedule is feasible in continuous time
    const auto eval = evaluate_schedule(res.schedule, model, circuit, profile);
    CHECK(eval.feasible);
    CHECK(eval.throughput_bits == doctest::Approx(res.throughput_bits).epsilon(1e-9));
}

TEST_CASE("dp oracle matches the staircase solver when alpha = 0") {
    const RateModel model = test_support::example_model();
    const CircuitModel circuit(0.0);
    const EnergyProfile profile = validate_profile(0.3, {{4.0, 0.2}}, 8.0);
    const PowerSchedule stairs = solve_staircase(profile, model, circuit);
    const double best = evaluate_schedule(stairs, model, circuit, profile).throughput_bits;
    const auto grid = make_oracle_power_grid(profile, 0.0, circuit, 64);
    const auto res = dp_oracle(profile, model, circuit, 0.05, grid);
    CHECK(res.throughput_bits <= best * (1 + 1e-12));
    CHECK((best - res.throughput_bits) / best <= 0.01);
}

TEST_CASE("random 3-epoch instances stay within the oracle gap") {
    Rng rng(67);
    const RateModel model = test_support::example_model();
    const CircuitModel circuit = test_support::example_circuit();
    for (int inst = 0; inst < 10; ++inst) {
        const EnergyProfile profile = random_small_instance(rng);
        const TwoPhaseSolution sol = solve_offline(profile, model, circuit);
        const auto grid = make_oracle_power_grid(profile, sol.p_ee_w, circuit, 64);
        const auto res = dp_oracle(profile, model, circuit, 0.05, grid);
        CHECK(res.throughput_bits <= sol.throughput_bits * (1 + 1e-12));
        CHECK((sol.throughput_bits - res.throughput_bits) <= 0.01 * sol.throughput_bits);
    }
}

TEST_CASE("dp oracle rejects an oversized state space") {
    const RateModel model = test_support::example_model();
    const CircuitModel circuit = test_support::example_circuit();
    const EnergyProfile profile = validate_profile(0.5, {}, 10.0);
    CHECK_THROWS_AS(dp_oracle(profile, model, circuit, 1e-4, {0.0, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(dp_oracle(profile, model, circuit, 0.05, {0.1}), std::invalid_argument);
}

TEST_SUITE_END();
