#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gasfc/errors.hpp"
#include "gasfc/features.hpp"
#include "gasfc/synthgen.hpp"
#include "oracles.hpp"

using namespace gasfc;
using namespace gasfc::synth;

namespace {

const DateInterval kRange{{2007, 1, 1}, {2010, 12, 31}};

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(n);
    mb /= double(n);
    double num = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("flat spec with no noise and no weather gain is constant at base level") {
    SynthSpec spec;
    spec.kind = SeriesKind::Igd;
    spec.base_level = 50.0;
    spec.weekly_amplitudes = {1, 1, 1, 1, 1, 1, 1};
    spec.yearly_amplitude = 0.0;
    spec.weather_gain = 0.0;
    spec.holiday_multiplier = 1.0;
    spec.noise_std = 0.0;
    const DailySeries s = generate(spec, kRange);
    for (const auto& r : s.records) CHECK(r.demand_mscm == 50.0);
}

TEST_CASE("same spec and seed give identical series") {
    const SynthSpec spec = SynthSpec::defaults_for(SeriesKind::Igd);
    const DailySeries a = generate(spec, kRange);
    const DailySeries b = generate(spec, kRange);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].demand_mscm == b.records[i].demand_mscm);
        CHECK(a.records[i].temperature_c == b.records[i].temperature_c);
    }

    SynthSpec other = spec;
    other.seed += 1;
    const DailySeries c = generate(other, kRange);
    CHECK(a.records[0].demand_mscm != c.records[0].demand_mscm);
}

TEST_CASE("generated series pass the loader's validation") {
    for (SeriesKind kind : {SeriesKind::Rgd, SeriesKind::Igd, SeriesKind::Tgd}) {
        const DailySeries s = generate(SynthSpec::defaults_for(kind), kRange);
        CHECK(s.records.size() == static_cast<std::size_t>(kRange.length_days()));
        for (const auto& r : s.records) {
            CHECK(r.demand_mscm >= 0.0);
            CHECK(std::isfinite(r.temperature_c));
        }
    }
}

TEST_CASE("IGD-like periodogram peaks at 7 days and about a year") {
    const DailySeries s = generate(SynthSpec::defaults_for(SeriesKind::Igd),
                                   DateInterval{{2007, 1, 1}, {2018, 12, 31}});
    std::vector<double> demand;
    for (const auto& r : s.records) demand.push_back(r.demand_mscm);

    auto spectrum = oracles::periodogram(demand);
    // Keep periods > 2 days, rank by power.
    spectrum.erase(std::remove_if(spectrum.begin(), spectrum.end(),
                                  [](const auto& p) { return p.first <= 2.0; }),
                   spectrum.end());
    std::sort(spectrum.begin(), spectrum.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });

    const double p0 = spectrum[0].first;
    const double p1 = spectrum[1].first;
    const double weekly = std::min(p0, p1);
    const double yearly = std::max(p0, p1);
    CHECK(std::abs(weekly - 7.0) <= 0.1);
    CHECK(std::abs(yearly - 365.0) <= 10.0);
}

TEST_CASE("IGD-like correlations have the expected signs") {
    const DailySeries s = generate(SynthSpec::defaults_for(SeriesKind::Igd),
                                   DateInterval{{2007, 1, 1}, {2018, 12, 31}});
    std::vector<double> demand, temperature, heating;
    for (const auto& r : s.records) {
        demand.push_back(r.demand_mscm);
        temperature.push_back(r.temperature_c);
        heating.push_back(hdd(r.temperature_c));
    }
    CHECK(correlation(demand, temperature) < 0.0);
    CHECK(correlation(demand, heating) > 0.0);
}

TEST_CASE("holidays sit strictly below the same weekday a week earlier when noiseless") {
    for (SeriesKind kind : {SeriesKind::Rgd, SeriesKind::Igd, SeriesKind::Tgd}) {
        SynthSpec spec = SynthSpec::defaults_for(kind);
        spec.noise_std = 0.0;
        const DailySeries s = generate(spec, kRange);
        for (const auto& r : s.records) {
            if (!is_holiday(r.date)) continue;
            const CivilDate week_before = add_days(r.date, -7);
            if (!s.covers(week_before)) continue;
            if (is_holiday(week_before)) continue;  // e.g. Jan 1 vs Dec 25
            CHECK(r.demand_mscm < s.at(week_before).demand_mscm);
        }
    }
}

TEST_CASE("oracle MAE is zero without noise and sigma*sqrt(2/pi) with it") {
    SynthSpec spec = SynthSpec::defaults_for(SeriesKind::Igd);
    spec.noise_std = 0.0;
    DailySeries clean = generate(spec, kRange);
    std::vector<double> oracle = oracle_forecast(spec, kRange);
    REQUIRE(oracle.size() == clean.records.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(clean.records[i].demand_mscm == doctest::Approx(oracle[i]).epsilon(1e-12));

    const double sigma = 3.0;
    spec.noise_std = sigma;
    const DailySeries noisy = generate(spec, kRange);
    oracle = oracle_forecast(spec, kRange);
    double abs_err = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i)
        abs_err += std::abs(noisy.records[i].demand_mscm - oracle[i]);
    abs_err /= double(oracle.size());
    const double theory = sigma * std::sqrt(2.0 / 3.14159265358979323846);
    CHECK(abs_err == doctest::Approx(theory).epsilon(0.05));
}

TEST_CASE("synth spec JSON round-trip and field validation") {
    const SynthSpec spec = SynthSpec::defaults_for(SeriesKind::Tgd);
    const SynthSpec back = SynthSpec::from_json(spec.to_json());
    CHECK(back.kind == spec.kind);
    CHECK(back.base_level == spec.base_level);
    CHECK(back.seed == spec.seed);
    CHECK(back.weekly_amplitudes == spec.weekly_amplitudes);

    nlohmann::json missing = spec.to_json();
    missing.erase("seed");
    CHECK_THROWS_WITH_AS(SynthSpec::from_json(missing), doctest::Contains("seed"),
                         gasfc::ValidationError);
}
