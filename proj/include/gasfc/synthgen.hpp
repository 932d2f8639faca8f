#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "gasfc/dataset.hpp"

namespace gasfc::synth {

/// Generator parameters for one synthetic series. The default specs give
/// each kind the qualitative shape of its real counterpart: strong weekly
/// pattern and winter peak for the IGD-like series, dominant weather
/// dependence for the RGD-like one, and a second (summer) seasonal bump on
/// the TGD-like series so its degree-day dependence is identifiable.
struct SynthSpec {
    SeriesKind kind = SeriesKind::Igd;
    double base_level = 100.0;                // MSCM
    std::array<double, 7> weekly_amplitudes;  // multiplier per weekday, Monday first
    double yearly_amplitude = 0.2;            // seasonal modulation of the base term
    double weather_gain = 1.0;                // MSCM per HDD (RGD/IGD) or HCDD (TGD)
    double holiday_multiplier = 0.6;          // in (0, 1]
    double noise_std = 2.0;                   // MSCM; 0 turns off all stochastic terms
    std::uint64_t seed = 1;

    SynthSpec() { weekly_amplitudes = {1.05, 1.05, 1.05, 1.05, 1.0, 0.8, 0.75}; }

    static SynthSpec defaults_for(SeriesKind kind);
    static SynthSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Daily temperature and demand over [range.first, range.last].
///
/// temperature(t) = 13 - 9 cos(2 pi (yearday - 15) / 365.25) + N(0, 2) noise
/// demand(t)      = base * weekly[wd] * (1 + seasonal(t)) * holiday_mult(t)
///                  + weather_gain * degree_days(T(t)) + N(0, noise_std)
/// clipped at zero. seasonal(t) is the same winter-peaking cosine scaled by
/// yearly_amplitude, plus a second harmonic (half amplitude) for TGD-like
/// series. Noise comes from the documented splitmix64 + Box-Muller stream,
/// so any port with the same seed reproduces the series bit-for-bit; with
/// noise_std = 0 the generator is fully deterministic (temperature noise
/// included).
DailySeries generate(const SynthSpec& spec, const DateInterval& range);

/// Noise-free demand mean given the realized temperature path: the
/// best-possible predictor in expectation. Its MAE against the generated
/// series is E|N(0, noise_std)| = noise_std * sqrt(2/pi).
std::vector<double> oracle_forecast(const SynthSpec& spec, const DateInterval& range);

}  // namespace gasfc::synth
