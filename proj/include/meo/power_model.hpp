#pragma once

// Payload power accounting: RF power, DC share of processed bandwidth and
// HPA losses, aggregated over the constellation.

#include <cstddef>
#include <optional>
#include <span>

namespace meo {

struct PowerParams {
    double hpa_efficiency{0.6};         // DC -> RF
    double dc_power_max_w{5000.0};      // DC power at full processed bandwidth
    double bandwidth_total_hz{2.5e9};   // per satellite
    double rf_power_max_w{800.0};       // per satellite

    /// (rho + 1) / rho: cost of one watt radiated, counting HPA losses.
    double power_coeff() const { return (hpa_efficiency + 1.0) / hpa_efficiency; }
    /// DC watts consumed per Hz of processed bandwidth.
    double bw_coeff() const { return dc_power_max_w / bandwidth_total_hz; }

    friend bool operator==(const PowerParams&, const PowerParams&) = default;
};

/// Sum of the per-user RF powers served by one satellite.
double meo_rf_power(std::span<const double> per_user_power);

/// DC share of the assigned bandwidth plus RF power at the HPA input.
/// Throws CapacityError when assigned_bw exceeds the satellite bandwidth.
double meo_hw_power(double assigned_bw_hz, double rf_power_w, const PowerParams& params);

/// Constellation-wide power written per user: sum of power_coeff*P + bw_coeff*B.
double total_power(std::span<const double> per_user_bw, std::span<const double> per_user_power,
                   const PowerParams& params);

/// Same quantity composed satellite by satellite: sum of hardware power of
/// every satellite plus the radiated power of every served user. Users with
/// no satellite contribute nothing; idle satellites contribute zero.
double total_power_by_satellite(std::span<const double> per_user_bw, std::span<const double> per_user_power,
                                std::span<const std::optional<std::size_t>> user_satellite,
                                std::size_t num_satellites, const PowerParams& params);

}  // namespace meo
