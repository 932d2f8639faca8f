#include "gasfc/synthgen.hpp"

#include <cmath>
#include <numbers>

#include "gasfc/errors.hpp"
#include "gasfc/features.hpp"
#include "gasfc/rng.hpp"

namespace gasfc::synth {

namespace {

constexpr double kTempMean = 13.0;
constexpr double kTempAmplitude = 9.0;
constexpr double kTempNoiseStd = 2.0;
constexpr double kYearPeriod = 365.25;
constexpr int kWinterPeakYearday = 15;

double seasonal_cos(const CivilDate& d, double harmonics) {
    const double phase = 2.0 * std::numbers::pi *
                         (static_cast<double>(yearday(d)) - kWinterPeakYearday) / kYearPeriod;
    return std::cos(harmonics * phase);
}

/// Shared deterministic core: realized temperature (seed-dependent when
/// noise is on) and the noise-free demand mean given that temperature.
struct Paths {
    std::vector<double> temperature;
    std::vector<double> demand_mean;
};

Paths generate_paths(const SynthSpec& spec, const DateInterval& range) {
    if (range.last < range.first) throw ValidationError("generate: empty date range");
    const long n = range.length_days();
    Paths out;
    out.temperature.reserve(static_cast<std::size_t>(n));
    out.demand_mean.reserve(static_cast<std::size_t>(n));

    // Independent sub-streams keep the temperature path reproducible
    // regardless of how many demand draws happen.
    Rng temp_rng(mix_seed(spec.seed, 1));
    const bool noisy = spec.noise_std > 0.0;

    for (CivilDate d = range.first; d <= range.last; d = add_days(d, 1)) {
        double temp = kTempMean - kTempAmplitude * seasonal_cos(d, 1.0);
        if (noisy) temp += kTempNoiseStd * temp_rng.next_gaussian();
        out.temperature.push_back(temp);

        double seasonal = spec.yearly_amplitude * seasonal_cos(d, 1.0);
        if (spec.kind == SeriesKind::Tgd)
            seasonal += 0.5 * spec.yearly_amplitude * seasonal_cos(d, 2.0);
        const double weekday_mult =
            spec.weekly_amplitudes[static_cast<std::size_t>(weekday(d))];
        double mean = spec.base_level * weekday_mult * (1.0 + seasonal);
        if (is_holiday(d)) mean *= spec.holiday_multiplier;
        mean += spec.weather_gain * (spec.kind == SeriesKind::Tgd ? hcdd(temp) : hdd(temp));
        out.demand_mean.push_back(std::max(mean, 0.0));
    }
    return out;
}

}  // namespace

SynthSpec SynthSpec::defaults_for(SeriesKind kind) {
    SynthSpec s;
    s.kind = kind;
    switch (kind) {
        case SeriesKind::Rgd:
            s.base_level = 120.0;
            s.weekly_amplitudes = {1.0, 1.0, 1.0, 1.0, 0.99, 0.96, 0.95};
            s.yearly_amplitude = 0.25;
            s.weather_gain = 3.0;
            s.holiday_multiplier = 0.9;
            s.noise_std = 3.0;
            s.seed = 11;
            break;
        case SeriesKind::Igd:
            s.base_level = 80.0;
            s.weekly_amplitudes = {1.05, 1.05, 1.05, 1.05, 1.0, 0.8, 0.75};
            s.yearly_amplitude = 0.2;
            s.weather_gain = 1.0;
            s.holiday_multiplier = 0.55;
            s.noise_std = 2.0;
            s.seed = 12;
            break;
        case SeriesKind::Tgd:
            s.base_level = 90.0;
            s.weekly_amplitudes = {1.05, 1.05, 1.05, 1.02, 1.0, 0.85, 0.8};
            s.yearly_amplitude = 0.1;
            s.weather_gain = 2.0;
            s.holiday_multiplier = 0.7;
            s.noise_std = 3.0;
            s.seed = 13;
            break;
    }
    return s;
}

DailySeries generate(const SynthSpec& spec, const DateInterval& range) {
    const Paths paths = generate_paths(spec, range);
    Rng demand_rng(mix_seed(spec.seed, 2));
    const bool noisy = spec.noise_std > 0.0;

    DailySeries series;
    series.kind = spec.kind;
    series.records.reserve(paths.temperature.size());
    std::size_t i = 0;
    for (CivilDate d = range.first; d <= range.last; d = add_days(d, 1), ++i) {
        double demand = paths.demand_mean[i];
        if (noisy) demand += spec.noise_std * demand_rng.next_gaussian();
        series.records.push_back(
            DailyRecord{d, paths.temperature[i], std::max(demand, 0.0)});
    }
    return series;
}

std::vector<double> oracle_forecast(const SynthSpec& spec, const DateInterval& range) {
    return generate_paths(spec, range).demand_mean;
}

nlohmann::json SynthSpec::to_json() const {
    return {{"kind", gasfc::to_string(kind)},
            {"base_level", base_level},
            {"weekly_amplitudes", weekly_amplitudes},
            {"yearly_amplitude", yearly_amplitude},
            {"weather_gain", weather_gain},
            {"holiday_multiplier", holiday_multiplier},
            {"noise_std", noise_std},
            {"seed", seed}};
}

SynthSpec SynthSpec::from_json(const nlohmann::json& j) {
    SynthSpec s;
    for (const char* field : {"kind", "base_level", "weekly_amplitudes", "yearly_amplitude",
                              "weather_gain", "holiday_multiplier", "noise_std", "seed"})
        if (!j.contains(field))
            throw ValidationError(std::string("synth spec: missing field '") + field + "'");
    s.kind = series_kind_from_string(j.at("kind").get<std::string>());
    s.base_level = j.at("base_level").get<double>();
    const auto weekly = j.at("weekly_amplitudes").get<std::vector<double>>();
    if (weekly.size() != 7)
        throw ValidationError("synth spec: weekly_amplitudes must have 7 entries");
    std::copy(weekly.begin(), weekly.end(), s.weekly_amplitudes.begin());
    s.yearly_amplitude = j.at("yearly_amplitude").get<double>();
    s.weather_gain = j.at("weather_gain").get<double>();
    s.holiday_multiplier = j.at("holiday_multiplier").get<double>();
    s.noise_std = j.at("noise_std").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();

    if (s.base_level <= 0) throw ValidationError("synth spec: base_level must be > 0");
    for (double w : s.weekly_amplitudes)
        if (w <= 0) throw ValidationError("synth spec: weekly_amplitudes must be > 0");
    if (s.holiday_multiplier <= 0 || s.holiday_multiplier > 1)
        throw ValidationError("synth spec: holiday_multiplier must be in (0, 1]");
    if (s.noise_std < 0) throw ValidationError("synth spec: noise_std must be >= 0");
    return s;
}

}  // namespace gasfc::synth
