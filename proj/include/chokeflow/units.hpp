#pragma once

namespace chokeflow::units {

inline constexpr double gas_constant = 8.31446261815324;  // J/(mol K)

inline constexpr double pa_per_psi = 6894.757293168361;
inline constexpr double pa_per_bar = 1.0e5;
inline constexpr double kelvin_offset = 273.15;
inline constexpr double rankine_per_kelvin = 1.8;

constexpr double psia_to_pa(double p) { return p * pa_per_psi; }
constexpr double pa_to_psia(double p) { return p / pa_per_psi; }
constexpr double bar_to_pa(double p) { return p * pa_per_bar; }
constexpr double pa_to_bar(double p) { return p / pa_per_bar; }
constexpr double rankine_to_kelvin(double t) { return t / rankine_per_kelvin; }
constexpr double kelvin_to_rankine(double t) { return t * rankine_per_kelvin; }
constexpr double celsius_to_kelvin(double t) { return t + kelvin_offset; }
constexpr double kelvin_to_celsius(double t) { return t - kelvin_offset; }

}  // namespace chokeflow::units
