#pragma once

#include <cmath>

namespace mmwc {

// dB/dBm conversions live at the configuration boundary; everything past the
// config parser works in linear units (watts, unitless gains).

constexpr double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

constexpr double linear_to_db(double x) { return 10.0 * std::log10(x); }

constexpr double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

constexpr double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// Thermal noise over a bandwidth: -174 dBm/Hz floor plus the receiver noise figure.
inline double noise_power_watts(double bandwidth_hz, double noise_figure_db) {
    return dbm_to_watts(-174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

// Free-space path-loss intercept at 1 m, (c / 4 pi f)^2.
inline double free_space_intercept(double carrier_hz) {
    constexpr double c = 299792458.0;
    const double x = c / (4.0 * M_PI * carrier_hz);
    return x * x;
}

}  // namespace mmwc
