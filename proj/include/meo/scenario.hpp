#pragma once

#include "meo/geometry.hpp"
#include "meo/power_model.hpp"
#include "meo/rf_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace meo {

struct City {
    std::string name;
    SurfacePoint center;
    int min_users{20};
    int max_users{50};

    friend bool operator==(const City&, const City&) = default;
};

struct ReceiverConfig {
    double gain_dbi{41.45};
    double temperature_k{224.5};

    double gain_linear() const { return db_to_linear(gain_dbi); }

    friend bool operator==(const ReceiverConfig&, const ReceiverConfig&) = default;
};

/// Sinusoidal diurnal demand: A * (1 + sin(2*pi*(t + phase) / day)) / 2 + noise, clipped at 0.
struct DemandModel {
    double amplitude_min_bps{50e6};
    double amplitude_max_bps{250e6};
    double noise_std_bps{5e6};
    double phase_jitter_s{3600.0};  // per-user uniform jitter in [-j, j]
    double day_length_s{86400.0};

    friend bool operator==(const DemandModel&, const DemandModel&) = default;
};

struct ScenarioConfig {
    std::vector<SatelliteOrbit> satellites;
    PowerParams power_params;
    AntennaConfig antenna;
    double aperture_efficiency{0.55};
    ReceiverConfig receiver;
    double min_elevation_deg{5.0};
    double timeslot_duration_s{360.0};
    int num_timeslots{150};
    double beam_bw_cap_hz{500e6};
    double beam_power_cap_w{160.0};
    double eta_bps{1e6};
    std::uint64_t rng_seed{1};
    double user_position_std_km{50.0};
    DemandModel demand;
    std::vector<City> cities;

    double slot_time(int t) const { return timeslot_duration_s * t; }

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct UserTerminal {
    std::size_t id{0};
    SurfacePoint position;
    Eigen::VectorXd demand;  // bps per timeslot
};

/// Equally spaced equatorial constellation with the relative Keplerian drift rate.
std::vector<SatelliteOrbit> uniform_constellation(int count, double altitude_km, double first_longitude_deg = 0.0);

/// Config with every Table-I style default filled in and the 15-satellite
/// constellation; cities are left empty.
ScenarioConfig default_config();

/// Checks every invariant, throwing ConfigError with the field path.
void validate(const ScenarioConfig& config);

/// Users around every city, with their demand series. Deterministic in
/// config.rng_seed.
std::vector<UserTerminal> generate_users(const ScenarioConfig& config);

/// Demand series for one user at `position`, drawing from `rng`.
Eigen::VectorXd generate_demand(const SurfacePoint& position, const ScenarioConfig& config, std::mt19937_64& rng);

/// K x T matrix of user demands.
Eigen::MatrixXd demand_matrix(const std::vector<UserTerminal>& users);

nlohmann::json to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const nlohmann::json& doc);

ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path);

}  // namespace meo
