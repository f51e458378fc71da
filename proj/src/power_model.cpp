#include "meo/power_model.hpp"

#include "meo/errors.hpp"

#include <numeric>
#include <vector>

namespace meo {

double meo_rf_power(std::span<const double> per_user_power) {
    return std::accumulate(per_user_power.begin(), per_user_power.end(), 0.0);
}

double meo_hw_power(double assigned_bw_hz, double rf_power_w, const PowerParams& params) {
    if (assigned_bw_hz > params.bandwidth_total_hz) {
        throw CapacityError("meo_hw_power: assigned bandwidth exceeds the satellite total");
    }
    return params.dc_power_max_w * (assigned_bw_hz / params.bandwidth_total_hz) + rf_power_w / params.hpa_efficiency;
}

double total_power(std::span<const double> per_user_bw, std::span<const double> per_user_power,
                   const PowerParams& params) {
    const double pc = params.power_coeff();
    const double bc = params.bw_coeff();
    double sum = 0.0;
    for (std::size_t k = 0; k < per_user_power.size(); ++k) sum += pc * per_user_power[k] + bc * per_user_bw[k];
    return sum;
}

double total_power_by_satellite(std::span<const double> per_user_bw, std::span<const double> per_user_power,
                                std::span<const std::optional<std::size_t>> user_satellite,
                                std::size_t num_satellites, const PowerParams& params) {
    std::vector<double> bw(num_satellites, 0.0);
    std::vector<std::vector<double>> powers(num_satellites);
    double radiated = 0.0;
    for (std::size_t k = 0; k < user_satellite.size(); ++k) {
        if (!user_satellite[k]) continue;
        bw[*user_satellite[k]] += per_user_bw[k];
        powers[*user_satellite[k]].push_back(per_user_power[k]);
        radiated += per_user_power[k];
    }
    double hw = 0.0;
    for (std::size_t n = 0; n < num_satellites; ++n) {
        if (powers[n].empty()) continue;  // switched off
        hw += meo_hw_power(bw[n], meo_rf_power(powers[n]), params);
    }
    return hw + radiated;
}

}  // namespace meo
