#include "ehsched/stochastics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ehsched {

double Rng::uniform_open01() {
    // 52 random bits centered in the cell: lands in [2^-53, 1 - 2^-53].
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open01(); }

double Rng::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("rng: exponential rate must be positive");
    return -std::log(uniform_open01()) / rate;
}

std::uint64_t Rng::poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("rng: poisson mean must be non-negative");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        // pmf inversion by sequential search
        const double l = std::exp(-mean);
        std::uint64_t k = 0;
        double p = uniform_open01();
        double pmf = l;
        double cdf = l;
        while (p > cdf) {
            ++k;
            pmf *= mean / static_cast<double>(k);
            cdf += pmf;
            if (pmf < 1e-320) break;  // deep tail; cdf is numerically 1
        }
        return k;
    }
    // Count unit-rate exponential inter-arrivals within [0, mean]; exact for
    // any mean without pmf underflow.
    std::uint64_t count = 0;
    double acc = exponential(1.0);
    while (acc <= mean) {
        ++count;
        acc += exponential(1.0);
    }
    return count;
}

std::uint64_t Rng::splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t Rng::derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(base) ^ stream) ^ index);
}

EnergyProfile gen_compound_poisson(const ArrivalStats& stats, double horizon_s,
                                   std::uint64_t seed, double initial_energy_j) {
    if (!(stats.rate_per_s > 0.0 && stats.mean_energy_j > 0.0))
        throw std::invalid_argument("compound poisson: invalid arrival statistics");
    if (!(horizon_s > 0.0)) throw std::invalid_argument("compound poisson: invalid horizon");

    Rng rng(seed);
    for (;;) {
        const std::uint64_t count = rng.poisson(stats.rate_per_s * horizon_s);
        std::vector<double> times(count);
        for (auto& t : times) t = rng.uniform(0.0, horizon_s);
        std::sort(times.begin(), times.end());
        // Coincident instants (measure-zero) would break the strict-ordering
        // invariant; redraw the block rather than nudging values.
        if (std::adjacent_find(times.begin(), times.end()) != times.end()) continue;

        std::vector<Arrival> arrivals(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            arrivals[i] = {times[i], rng.uniform(0.0, 2.0 * stats.mean_energy_j)};
        }
        return EnergyProfile(initial_energy_j, std::move(arrivals), horizon_s);
    }
}

void CellConfig::validate() const {
    if (!(radius_m > 0.0)) throw std::invalid_argument("cell: radius must be positive");
    if (!(user_density_per_m2 > 0.0))
        throw std::invalid_argument("cell: user density must be positive");
    if (!(ref_loss > 0.0)) throw std::invalid_argument("cell: reference loss must be positive");
    if (!(ref_distance_m > 0.0))
        throw std::invalid_argument("cell: reference distance must be positive");
    if (!(pathloss_exponent >= 2.0))
        throw std::invalid_argument("cell: pathloss exponent must be >= 2");
    if (!(total_bandwidth_hz > 0.0))
        throw std::invalid_argument("cell: total bandwidth must be positive");
    if (!(noise_density_w_per_hz > 0.0))
        throw std::invalid_argument("cell: noise density must be positive");
    if (!(gap >= 1.0)) throw std::invalid_argument("cell: gap must be >= 1");
    if (!(circuit_power_w > 0.0))
        throw std::invalid_argument("cell: circuit power must be positive");
}

double pathloss_gain(const CellConfig& config, double distance_m) {
    return config.ref_loss *
           std::pow(distance_m / config.ref_distance_m, -config.pathloss_exponent);
}

std::vector<UserLink> gen_hppp_users(const CellConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    const double area = M_PI * config.radius_m * config.radius_m;
    const std::uint64_t count = rng.poisson(config.user_density_per_m2 * area);
    std::vector<UserLink> users(count);
    for (auto& u : users) {
        // sqrt-uniform radius gives a uniform drop on the disk
        u.distance_m = config.radius_m * std::sqrt(rng.uniform_open01());
        u.gain = pathloss_gain(config, u.distance_m);
    }
    return users;
}

std::optional<MultiRateModel> cell_to_multimodel(const std::vector<UserLink>& users,
                                                 const CellConfig& config) {
    if (users.empty()) return std::nullopt;
    std::vector<double> gains(users.size());
    for (std::size_t k = 0; k < users.size(); ++k) gains[k] = users[k].gain;
    const double per_user_bandwidth = config.total_bandwidth_hz / static_cast<double>(users.size());
    return MultiRateModel(per_user_bandwidth, config.noise_density_w_per_hz, config.gap,
                          std::move(gains));
}

}  // namespace ehsched
