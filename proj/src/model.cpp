#include "ehsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ehsched {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double dbm_per_hz_to_w_per_hz(double dbm_per_hz) {
    return std::pow(10.0, (dbm_per_hz - 30.0) / 10.0);
}

double kahan_total(const std::vector<double>& xs, std::size_t first, std::size_t last) {
    KahanSum sum;
    for (std::size_t i = first; i < last; ++i) sum.add(xs[i]);
    return sum.value();
}

EnergyProfile::EnergyProfile(double initial_energy_j, std::vector<Arrival> arrivals,
                             double horizon_s)
    : initial_energy_(initial_energy_j), arrivals_(std::move(arrivals)), horizon_(horizon_s) {
    if (!(horizon_ > 0.0)) throw std::invalid_argument("profile: horizon must be positive");
    if (initial_energy_ < 0.0)
        throw std::invalid_argument("profile: initial energy must be non-negative");
    double prev = 0.0;
    for (std::size_t i = 0; i < arrivals_.size(); ++i) {
        const Arrival& a = arrivals_[i];
        if (!(a.time_s > prev))
            throw std::invalid_argument("profile: arrival " + std::to_string(i) +
                                        ": times must be strictly increasing from 0");
        if (!(a.time_s < horizon_))
            throw std::invalid_argument("profile: arrival " + std::to_string(i) +
                                        ": time must lie strictly inside the horizon");
        if (!(a.energy_j > 0.0))
            throw std::invalid_argument("profile: arrival " + std::to_string(i) +
                                        ": amount must be positive");
        prev = a.time_s;
    }
    const std::size_t n = arrivals_.size() + 1;
    starts_.resize(n);
    lengths_.resize(n);
    energies_.resize(n);
    starts_[0] = 0.0;
    energies_[0] = initial_energy_;
    for (std::size_t i = 0; i < arrivals_.size(); ++i) {
        starts_[i + 1] = arrivals_[i].time_s;
        energies_[i + 1] = arrivals_[i].energy_j;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double end = (i + 1 < n) ? starts_[i + 1] : horizon_;
        lengths_[i] = end - starts_[i];
    }
}

double EnergyProfile::epoch_end(std::size_t i) const {
    return (i + 1 < starts_.size()) ? starts_[i + 1] : horizon_;
}

double EnergyProfile::window_energy(std::size_t first, std::size_t last) const {
    return kahan_total(energies_, first, last);
}

double EnergyProfile::window_length(std::size_t first, std::size_t last) const {
    return kahan_total(lengths_, first, last);
}

EnergyProfile validate_profile(double initial_energy_j, std::vector<Arrival> arrivals,
                               double horizon_s) {
    return EnergyProfile(initial_energy_j, std::move(arrivals), horizon_s);
}

CircuitModel::CircuitModel(double alpha) : alpha_w(alpha) {
    if (alpha_w < 0.0) throw std::invalid_argument("circuit: alpha must be non-negative");
}

RateModel::RateModel(double bandwidth_hz, double noise_density_w_per_hz, double gap, double gain)
    : bandwidth_hz_(bandwidth_hz), noise_density_(noise_density_w_per_hz), gap_(gap), gain_(gain) {
    if (!(bandwidth_hz_ > 0.0)) throw std::invalid_argument("rate model: bandwidth must be positive");
    if (!(noise_density_ > 0.0))
        throw std::invalid_argument("rate model: noise density must be positive");
    if (!(gap_ >= 1.0)) throw std::invalid_argument("rate model: gap must be >= 1");
    if (!(gain_ > 0.0)) throw std::invalid_argument("rate model: gain must be positive");
    snr_per_watt_ = gain_ / (gap_ * bandwidth_hz_ * noise_density_);
}

double RateModel::rate(double power_w) const {
    if (power_w < 0.0) throw std::invalid_argument("rate: power must be non-negative");
    if (power_w == 0.0) return 0.0;
    return bandwidth_hz_ * std::log2(1.0 + snr_per_watt_ * power_w);
}

double RateModel::rate_derivative(double power_w) const {
    if (power_w < 0.0) throw std::invalid_argument("rate: power must be non-negative");
    return bandwidth_hz_ * snr_per_watt_ / ((1.0 + snr_per_watt_ * power_w) * M_LN2);
}

RateFn RateModel::as_fn() const {
    return [*this](double p) { return rate(p); };
}

MultiRateModel::MultiRateModel(double bandwidth_hz, double noise_density_w_per_hz, double gap,
                               std::vector<double> gains)
    : bandwidth_hz_(bandwidth_hz),
      noise_density_(noise_density_w_per_hz),
      gap_(gap),
      gains_(std::move(gains)) {
    if (!(bandwidth_hz_ > 0.0))
        throw std::invalid_argument("multi rate model: bandwidth must be positive");
    if (!(noise_density_ > 0.0))
        throw std::invalid_argument("multi rate model: noise density must be positive");
    if (!(gap_ >= 1.0)) throw std::invalid_argument("multi rate model: gap must be >= 1");
    if (gains_.empty()) throw std::invalid_argument("multi rate model: needs at least one channel");
    bool any_positive = false;
    for (std::size_t k = 0; k < gains_.size(); ++k) {
        if (gains_[k] < 0.0)
            throw std::invalid_argument("multi rate model: channel " + std::to_string(k) +
                                        ": gain must be non-negative");
        any_positive = any_positive || gains_[k] > 0.0;
    }
    if (!any_positive)
        throw std::invalid_argument("multi rate model: at least one channel gain must be positive");
}

double MultiRateModel::noise_floor(std::size_t k) const {
    return gap_ * bandwidth_hz_ * noise_density_ / gains_[k];
}

double MultiRateModel::channel_rate(std::size_t k, double power_w) const {
    if (power_w <= 0.0 || gains_[k] <= 0.0) return 0.0;
    return bandwidth_hz_ * std::log2(1.0 + power_w / noise_floor(k));
}

namespace {

void check_tiling(double first_start, double last_end, double horizon, bool contiguous,
                  bool powers_ok, bool lengths_ok) {
    if (first_start != 0.0) throw std::invalid_argument("schedule: first segment must start at 0");
    if (last_end != horizon)
        throw std::invalid_argument("schedule: last segment must end at the horizon");
    if (!contiguous) throw std::invalid_argument("schedule: segments must tile without gaps");
    if (!lengths_ok) throw std::invalid_argument("schedule: segments must have positive length");
    if (!powers_ok) throw std::invalid_argument("schedule: powers must be non-negative");
}

}  // namespace

PowerSchedule::PowerSchedule(std::vector<Segment> segments, double horizon_s)
    : segments_(std::move(segments)), horizon_(horizon_s) {
    if (!(horizon_ > 0.0)) throw std::invalid_argument("schedule: horizon must be positive");
    if (segments_.empty()) throw std::invalid_argument("schedule: needs at least one segment");
    bool contiguous = true, powers_ok = true, lengths_ok = true;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i].length() <= 0.0) lengths_ok = false;
        if (segments_[i].power_w < 0.0) powers_ok = false;
        if (i > 0 && segments_[i].start_s != segments_[i - 1].end_s) contiguous = false;
    }
    check_tiling(segments_.front().start_s, segments_.back().end_s, horizon_, contiguous,
                 powers_ok, lengths_ok);
}

double PowerSchedule::power_at(double t) const {
    if (segments_.empty()) throw std::logic_error("schedule: empty placeholder has no power");
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                               [](const Segment& s, double v) { return s.end_s < v; });
    if (it == segments_.end()) return segments_.back().power_w;
    return it->power_w;
}

PowerSchedule PowerSchedule::all_off(double horizon_s) {
    return PowerSchedule({Segment{0.0, horizon_s, 0.0}}, horizon_s);
}

double MultiSegment::total_power() const {
    KahanSum sum;
    for (double p : powers_w) sum.add(p);
    return sum.value();
}

MultiPowerSchedule::MultiPowerSchedule(std::vector<MultiSegment> segments, double horizon_s)
    : segments_(std::move(segments)), horizon_(horizon_s) {
    if (!(horizon_ > 0.0)) throw std::invalid_argument("schedule: horizon must be positive");
    if (segments_.empty()) throw std::invalid_argument("schedule: needs at least one segment");
    channel_count_ = segments_.front().powers_w.size();
    bool contiguous = true, powers_ok = true, lengths_ok = true;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const MultiSegment& s = segments_[i];
        if (s.powers_w.size() != channel_count_)
            throw std::invalid_argument("schedule: inconsistent channel count across segments");
        if (s.length() <= 0.0) lengths_ok = false;
        for (double p : s.powers_w)
            if (p < 0.0) powers_ok = false;
        if (i > 0 && s.start_s != segments_[i - 1].end_s) contiguous = false;
    }
    check_tiling(segments_.front().start_s, segments_.back().end_s, horizon_, contiguous,
                 powers_ok, lengths_ok);
}

ScheduleEvaluation evaluate_schedule(const PowerSchedule& schedule, const RateModel& model,
                                     const CircuitModel& circuit, const EnergyProfile& profile) {
    return evaluate_schedule(schedule, model.as_fn(), circuit, profile);
}

ScheduleEvaluation evaluate_schedule(const PowerSchedule& schedule, const RateFn& rate,
                                     const CircuitModel& circuit, const EnergyProfile& profile) {
    if (schedule.horizon() != profile.horizon())
        throw std::invalid_argument("evaluate: schedule and profile horizons differ");

    ScheduleEvaluation out;
    KahanSum bits;
    for (const Segment& s : schedule.segments()) bits.add(s.length() * rate(s.power_w));
    out.throughput_bits = bits.value();

    // Consumption audited at every epoch boundary t_1..t_N (t_N = horizon):
    // energy consumed on (0, t_i] may not exceed energy credited at t_0..t_{i-1}.
    const std::size_t n = profile.epoch_count();
    KahanSum consumed;
    KahanSum harvested;
    std::size_t seg = 0;
    double seg_pos = 0.0;  // time up to which the current segment was accounted
    out.max_violation_j = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        harvested.add(profile.epoch_energy(i));
        const double boundary = profile.epoch_end(i);
        while (seg < schedule.segments().size()) {
            const Segment& s = schedule.segments()[seg];
            const double from = std::max(s.start_s, seg_pos);
            const double to = std::min(s.end_s, boundary);
            if (to > from) {
                consumed.add((to - from) * circuit.total_power(s.power_w));
                seg_pos = to;
            }
            if (s.end_s <= boundary) {
                ++seg;
            } else {
                break;
            }
        }
        const double violation = consumed.value() - harvested.value();
        out.max_violation_j = std::max(out.max_violation_j, violation);
    }
    out.feasible = out.max_violation_j <= kFeasibilityTolJ;
    if (out.max_violation_j < 0.0) out.max_violation_j = 0.0;
    return out;
}

}  // namespace ehsched
