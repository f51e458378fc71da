#pragma once

// Antenna pattern, path loss and Shannon-rate helpers. Quantities are linear
// (not dB) unless the name says otherwise.

#include "meo/errors.hpp"
#include "meo/geometry.hpp"

#include <cmath>
#include <numbers>

namespace meo {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kBesselJ1FirstZero = 3.8317059702075123;

template <typename Scalar>
Scalar db_to_linear(Scalar db) {
    return std::pow(Scalar(10), db / Scalar(10));
}

template <typename Scalar>
Scalar linear_to_db(Scalar x) {
    return Scalar(10) * std::log10(x);
}

template <typename Scalar>
struct AntennaConfigT {
    Scalar aperture_ratio{15};  // r_ant / lambda
    Scalar max_gain{1};         // linear
    Scalar carrier_frequency_hz{20e9};

    friend bool operator==(const AntennaConfigT&, const AntennaConfigT&) = default;
};

using AntennaConfig = AntennaConfigT<double>;

/// Peak gain of a uniformly illuminated circular aperture, (2*pi*r/lambda)^2 * efficiency.
template <typename Scalar>
Scalar aperture_gain(Scalar aperture_ratio, Scalar efficiency) {
    const Scalar k = Scalar(2) * std::numbers::pi_v<Scalar> * aperture_ratio;
    return k * k * efficiency;
}

template <typename Scalar>
struct LinkBudgetT {
    Scalar channel_gain{1};
    Scalar noise_psd{1};  // W/Hz
};

using LinkBudget = LinkBudgetT<double>;

/// Bessel J1.
template <typename Scalar>
Scalar bessel_j1(Scalar x) {
    return std::cyl_bessel_j(Scalar(1), x);
}

/// Normalized circular-aperture pattern 4|J1(u)/u|^2, u = 2*pi*(r/lambda)*sin(theta).
template <typename Scalar>
Scalar normalized_pattern_gain(Scalar theta_rad, Scalar aperture_ratio) {
    if (!(theta_rad >= 0 && theta_rad <= std::numbers::pi_v<Scalar> / 2)) {
        throw DomainError("normalized_pattern_gain: theta outside [0, pi/2]");
    }
    if (theta_rad == 0) return Scalar(1);
    const Scalar u = Scalar(2) * std::numbers::pi_v<Scalar> * aperture_ratio * std::sin(theta_rad);
    const Scalar ratio = bessel_j1(u) / u;
    return Scalar(4) * ratio * ratio;
}

/// Full 3-dB beamwidth in degrees: twice the main-lobe angle where the
/// normalized pattern equals 0.5.
template <typename Scalar>
Scalar half_power_beamwidth(Scalar aperture_ratio) {
    if (!(aperture_ratio > Scalar(0.5))) {
        throw DomainError("half_power_beamwidth: aperture ratio must exceed 0.5");
    }
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar null_sin = Scalar(kBesselJ1FirstZero) / (Scalar(2) * pi * aperture_ratio);
    Scalar lo = 0;
    Scalar hi = null_sin >= 1 ? pi / 2 : std::asin(null_sin);
    if (normalized_pattern_gain(hi, aperture_ratio) > Scalar(0.5)) {
        throw std::logic_error("half_power_beamwidth: half-power point not bracketed");
    }
    // main lobe is monotone on [0, hi]
    while (hi - lo > Scalar(1e-13)) {
        const Scalar mid = (lo + hi) / 2;
        if (normalized_pattern_gain(mid, aperture_ratio) > Scalar(0.5)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return Scalar(2) * rad2deg((lo + hi) / 2);
}

/// Free-space path gain (lambda / (4*pi*d))^2, distance in km.
template <typename Scalar>
Scalar free_space_path_loss(Scalar distance_km, Scalar carrier_frequency_hz) {
    if (!(distance_km > 0)) throw DomainError("free_space_path_loss: distance must be positive");
    const Scalar lambda = Scalar(kSpeedOfLight) / carrier_frequency_hz;
    const Scalar x = lambda / (Scalar(4) * std::numbers::pi_v<Scalar> * distance_km * Scalar(1000));
    return x * x;
}

/// g_max * G(boresight) * FSPL(slant range) * rx_gain.
template <typename Scalar>
Scalar channel_gain(const Vec3<Scalar>& sat, const SurfacePointT<Scalar>& beam_center,
                    const SurfacePointT<Scalar>& user, const AntennaConfigT<Scalar>& ant, Scalar rx_gain) {
    if (elevation_angle(user, sat) < 0) throw DomainError("channel_gain: user below the horizon");
    const Scalar theta = boresight_angle(sat, beam_center, user);
    return ant.max_gain * normalized_pattern_gain(theta, ant.aperture_ratio) *
           free_space_path_loss(slant_range(sat, user), ant.carrier_frequency_hz) * rx_gain;
}

template <typename Scalar>
Scalar noise_psd(Scalar system_temperature_k) {
    if (!(system_temperature_k > 0)) throw DomainError("noise_psd: temperature must be positive");
    return Scalar(kBoltzmann) * system_temperature_k;
}

/// B * log2(1 + P*h / (B*sigma^2)); zero bandwidth carries zero rate.
template <typename Scalar>
Scalar shannon_rate(Scalar bandwidth_hz, Scalar power_w, const LinkBudgetT<Scalar>& link) {
    if (bandwidth_hz <= 0) return Scalar(0);
    return bandwidth_hz * std::log1p(power_w * link.channel_gain / (bandwidth_hz * link.noise_psd)) /
           std::numbers::ln2_v<Scalar>;
}

}  // namespace meo
