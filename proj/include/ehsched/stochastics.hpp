// Seeded random generation for the stochastic experiments: compound-Poisson
// energy arrivals and the OFDMA cell scenario (HPPP user drop + pathloss).
//
// All generators are pure functions of (parameters, seed). The generator is
// std::mt19937_64 with an explicit 53-bit uniform mapping, so identical
// seeds give identical outputs on any conforming standard library. Child
// streams for independent trials are derived with Rng::derive_seed
// (splitmix64 mixing of base seed, stream id and trial index).
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ehsched/model.hpp"
#include "ehsched/online.hpp"

namespace ehsched {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1); both endpoints excluded so draws
    // can be scaled to strictly-positive quantities.
    double uniform_open01();
    double uniform(double lo, double hi);  // open interval (lo, hi)
    double exponential(double rate);
    // Exact Poisson sampling: pmf inversion for small means, arrival
    // counting of a unit-rate process otherwise. No approximation.
    std::uint64_t poisson(double mean);

    static std::uint64_t splitmix64(std::uint64_t x);
    // Deterministic child-stream rule: one stream per (stream, index) pair.
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                     std::uint64_t index);

private:
    std::mt19937_64 engine_;
};

/// Compound-Poisson block: arrival count ~ Poisson(rate * horizon), times
/// i.i.d. uniform on (0, horizon) then sorted (the conditional construction
/// of the Poisson process), amounts i.i.d. Uniform(0, 2 * mean_energy).
/// Deterministic given the seed. The initial store defaults to zero.
EnergyProfile gen_compound_poisson(const ArrivalStats& stats, double horizon_s,
                                   std::uint64_t seed, double initial_energy_j = 0.0);

struct CellConfig {
    double radius_m = 0.0;
    double user_density_per_m2 = 0.0;
    double ref_loss = 0.0;          // pathloss at the reference distance, linear
    double ref_distance_m = 0.0;
    double pathloss_exponent = 0.0; // >= 2
    double total_bandwidth_hz = 0.0;
    double noise_density_w_per_hz = 0.0;
    double gap = 1.0;
    double circuit_power_w = 0.0;

    void validate() const;  // throws std::invalid_argument
};

struct UserLink {
    double distance_m = 0.0;
    double gain = 0.0;  // linear power gain
};

/// Distance-dependent channel gain: ref_loss * (r / ref_distance)^-exponent.
double pathloss_gain(const CellConfig& config, double distance_m);

/// Drops K ~ Poisson(density * pi * radius^2) users uniformly on the disk
/// (radius via sqrt-uniform scaling) and attaches pathloss gains.
/// Deterministic given the seed; an empty draw is a valid realization.
std::vector<UserLink> gen_hppp_users(const CellConfig& config, std::uint64_t seed);

/// OFDMA view of a user drop: the total bandwidth split equally across the
/// K users, one subchannel each. Empty cells have no model (the experiment
/// records a zero-throughput trial).
std::optional<MultiRateModel> cell_to_multimodel(const std::vector<UserLink>& users,
                                                 const CellConfig& config);

}  // namespace ehsched
