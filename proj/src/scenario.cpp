#include "meo/scenario.hpp"

#include "meo/errors.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>
#include <sstream>

namespace meo {

using nlohmann::json;

std::vector<SatelliteOrbit> uniform_constellation(int count, double altitude_km, double first_longitude_deg) {
    std::vector<SatelliteOrbit> sats;
    sats.reserve(static_cast<std::size_t>(count));
    const double rate = relative_longitude_rate(altitude_km);
    for (int n = 0; n < count; ++n) {
        sats.push_back({wrap_longitude(first_longitude_deg + 360.0 * n / count), altitude_km, rate});
    }
    return sats;
}

ScenarioConfig default_config() {
    ScenarioConfig c;
    c.satellites = uniform_constellation(15, 8062.0);
    c.antenna.aperture_ratio = 15.0;
    c.antenna.carrier_frequency_hz = 20e9;
    c.antenna.max_gain = aperture_gain(c.antenna.aperture_ratio, c.aperture_efficiency);
    return c;
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field, what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0; }
bool finite_non_negative(double x) { return std::isfinite(x) && x >= 0; }

}  // namespace

void validate(const ScenarioConfig& c) {
    require(!c.satellites.empty(), "satellites", "at least one satellite is required");
    for (std::size_t n = 0; n < c.satellites.size(); ++n) {
        const auto& s = c.satellites[n];
        const std::string path = "satellites[" + std::to_string(n) + "]";
        require(finite_positive(s.altitude_km), path + ".altitude_km", "must be positive");
        require(std::isfinite(s.initial_longitude_deg), path + ".initial_longitude_deg", "must be finite");
        require(std::isfinite(s.longitude_rate_deg_s), path + ".longitude_rate_deg_per_s", "must be finite");
    }
    const auto& p = c.power_params;
    require(finite_positive(p.hpa_efficiency) && p.hpa_efficiency <= 1.0, "power.hpa_efficiency", "must be in (0, 1]");
    require(finite_positive(p.dc_power_max_w), "power.dc_power_max_w", "must be positive");
    require(finite_positive(p.bandwidth_total_hz), "power.bandwidth_total_hz", "must be positive");
    require(finite_positive(p.rf_power_max_w), "power.rf_power_max_w", "must be positive");

    require(std::isfinite(c.antenna.aperture_ratio) && c.antenna.aperture_ratio > 0.5, "antenna.aperture_ratio",
            "must exceed 0.5");
    require(std::isfinite(c.antenna.max_gain) && c.antenna.max_gain >= 1.0, "antenna.max_gain_linear",
            "must be at least 1");
    require(finite_positive(c.antenna.carrier_frequency_hz), "antenna.carrier_frequency_hz", "must be positive");
    require(finite_positive(c.aperture_efficiency) && c.aperture_efficiency <= 1.0, "antenna.aperture_efficiency",
            "must be in (0, 1]");
    require(std::isfinite(c.receiver.gain_dbi), "receiver.gain_dbi", "must be finite");
    require(finite_positive(c.receiver.temperature_k), "receiver.temperature_k", "must be positive");

    require(std::isfinite(c.min_elevation_deg) && c.min_elevation_deg >= 0 && c.min_elevation_deg < 90,
            "min_elevation_deg", "must be in [0, 90)");
    require(finite_positive(c.timeslot_duration_s), "timeslot_duration_s", "must be positive");
    require(c.num_timeslots >= 1, "num_timeslots", "must be at least 1");
    require(finite_positive(c.beam_bw_cap_hz), "beam.bandwidth_cap_hz", "must be positive");
    require(c.beam_bw_cap_hz <= p.bandwidth_total_hz, "beam.bandwidth_cap_hz",
            "must not exceed power.bandwidth_total_hz");
    require(finite_positive(c.beam_power_cap_w), "beam.power_cap_w", "must be positive");
    require(finite_positive(c.eta_bps), "eta_bps", "must be positive");
    require(finite_non_negative(c.user_position_std_km), "users.position_std_km", "must be non-negative");

    const auto& d = c.demand;
    require(finite_non_negative(d.amplitude_min_bps), "demand.amplitude_min_bps", "must be non-negative");
    require(std::isfinite(d.amplitude_max_bps) && d.amplitude_max_bps >= d.amplitude_min_bps,
            "demand.amplitude_max_bps", "must be at least demand.amplitude_min_bps");
    require(finite_non_negative(d.noise_std_bps), "demand.noise_std_bps", "must be non-negative");
    require(finite_non_negative(d.phase_jitter_s), "demand.phase_jitter_s", "must be non-negative");
    require(finite_positive(d.day_length_s), "demand.day_length_s", "must be positive");

    for (std::size_t i = 0; i < c.cities.size(); ++i) {
        const auto& city = c.cities[i];
        const std::string path = "cities[" + std::to_string(i) + "]";
        require(is_valid(city.center), path, "lat_deg must be in [-90, 90] and lon_deg in [-180, 180]");
        require(city.min_users >= 0, path + ".min_users", "must be non-negative");
        require(city.max_users >= city.min_users, path + ".max_users", "must be at least min_users");
    }
}

Eigen::VectorXd generate_demand(const SurfacePoint& position, const ScenarioConfig& config, std::mt19937_64& rng) {
    const DemandModel& m = config.demand;
    std::uniform_real_distribution<double> amplitude_dist(m.amplitude_min_bps, m.amplitude_max_bps);
    std::uniform_real_distribution<double> jitter_dist(-m.phase_jitter_s, m.phase_jitter_s);
    std::normal_distribution<double> unit_normal(0.0, 1.0);

    const double amplitude = amplitude_dist(rng);
    // local solar time: 15 degrees of longitude per hour
    const double phase_s = position.lon_deg / 360.0 * m.day_length_s + jitter_dist(rng);

    Eigen::VectorXd demand(config.num_timeslots);
    for (int t = 0; t < config.num_timeslots; ++t) {
        const double angle = 2.0 * std::numbers::pi * (config.slot_time(t) + phase_s) / m.day_length_s;
        const double noise = m.noise_std_bps * unit_normal(rng);
        demand[t] = std::max(0.0, amplitude * (1.0 + std::sin(angle)) / 2.0 + noise);
    }
    return demand;
}

std::vector<UserTerminal> generate_users(const ScenarioConfig& config) {
    std::mt19937_64 rng(config.rng_seed);
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    std::vector<UserTerminal> users;
    for (const City& city : config.cities) {
        std::uniform_int_distribution<int> count_dist(city.min_users, city.max_users);
        const int count = count_dist(rng);
        for (int i = 0; i < count; ++i) {
            const double north = config.user_position_std_km * unit_normal(rng);
            const double east = config.user_position_std_km * unit_normal(rng);
            UserTerminal u;
            u.id = users.size();
            u.position = destination_point(city.center, std::hypot(north, east), std::atan2(east, north));
            u.demand = generate_demand(u.position, config, rng);
            users.push_back(std::move(u));
        }
    }
    return users;
}

Eigen::MatrixXd demand_matrix(const std::vector<UserTerminal>& users) {
    if (users.empty()) return {};
    Eigen::MatrixXd d(static_cast<Eigen::Index>(users.size()), users.front().demand.size());
    for (std::size_t k = 0; k < users.size(); ++k) d.row(static_cast<Eigen::Index>(k)) = users[k].demand.transpose();
    return d;
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const ScenarioConfig& c) {
    json sats = json::array();
    for (const auto& s : c.satellites) {
        sats.push_back({{"initial_longitude_deg", s.initial_longitude_deg},
                        {"altitude_km", s.altitude_km},
                        {"longitude_rate_deg_per_s", s.longitude_rate_deg_s}});
    }
    json cities = json::array();
    for (const auto& city : c.cities) {
        cities.push_back({{"name", city.name},
                          {"lat_deg", city.center.lat_deg},
                          {"lon_deg", city.center.lon_deg},
                          {"min_users", city.min_users},
                          {"max_users", city.max_users}});
    }
    return {
        {"rng_seed", c.rng_seed},
        {"num_timeslots", c.num_timeslots},
        {"timeslot_duration_s", c.timeslot_duration_s},
        {"min_elevation_deg", c.min_elevation_deg},
        {"satellites", sats},
        {"power",
         {{"hpa_efficiency", c.power_params.hpa_efficiency},
          {"dc_power_max_w", c.power_params.dc_power_max_w},
          {"bandwidth_total_hz", c.power_params.bandwidth_total_hz},
          {"rf_power_max_w", c.power_params.rf_power_max_w}}},
        {"antenna",
         {{"aperture_ratio", c.antenna.aperture_ratio},
          {"aperture_efficiency", c.aperture_efficiency},
          {"max_gain_linear", c.antenna.max_gain},
          {"carrier_frequency_hz", c.antenna.carrier_frequency_hz}}},
        {"receiver", {{"gain_dbi", c.receiver.gain_dbi}, {"temperature_k", c.receiver.temperature_k}}},
        {"beam", {{"bandwidth_cap_hz", c.beam_bw_cap_hz}, {"power_cap_w", c.beam_power_cap_w}}},
        {"eta_bps", c.eta_bps},
        {"users", {{"position_std_km", c.user_position_std_km}}},
        {"demand",
         {{"amplitude_min_bps", c.demand.amplitude_min_bps},
          {"amplitude_max_bps", c.demand.amplitude_max_bps},
          {"noise_std_bps", c.demand.noise_std_bps},
          {"phase_jitter_s", c.demand.phase_jitter_s},
          {"day_length_s", c.demand.day_length_s}}},
        {"cities", cities},
    };
}

namespace {

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!keys.contains(key)) throw ConfigError(join(path, key), "unknown field");
    }
}

const json* child_object(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return nullptr;
    const json& v = obj.at(key);
    if (!v.is_object()) throw ConfigError(join(path, key), "expected an object");
    return &v;
}

void read_number(const json* obj, const std::string& key, const std::string& path, double& out) {
    if (obj == nullptr || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
    out = v.get<double>();
}

template <typename Int>
void read_integer(const json* obj, const std::string& key, const std::string& path, Int& out) {
    if (obj == nullptr || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
        if (v.is_number_unsigned()) {
            out = v.get<Int>();
        } else {
            const auto s = v.get<std::int64_t>();
            if (s < 0) throw ConfigError(join(path, key), "must be non-negative");
            out = static_cast<Int>(s);
        }
    } else {
        out = v.get<Int>();
    }
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw ConfigError(join(path, key), "missing mandatory field");
    double out = 0.0;
    read_number(&obj, key, path, out);
    return out;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("", "scenario document must be a JSON object");
    reject_unknown(doc, "",
                   {"rng_seed", "num_timeslots", "timeslot_duration_s", "min_elevation_deg", "constellation",
                    "satellites", "power", "antenna", "receiver", "beam", "eta_bps", "users", "demand", "cities"});

    ScenarioConfig c = default_config();
    read_integer(&doc, "rng_seed", "", c.rng_seed);
    read_integer(&doc, "num_timeslots", "", c.num_timeslots);
    read_number(&doc, "timeslot_duration_s", "", c.timeslot_duration_s);
    read_number(&doc, "min_elevation_deg", "", c.min_elevation_deg);
    read_number(&doc, "eta_bps", "", c.eta_bps);

    if (doc.contains("constellation") && doc.contains("satellites")) {
        throw ConfigError("constellation", "give either constellation or satellites, not both");
    }
    if (const json* con = child_object(doc, "constellation", "")) {
        reject_unknown(*con, "constellation", {"num_satellites", "altitude_km", "first_longitude_deg"});
        int count = 15;
        double altitude = 8062.0;
        double first = 0.0;
        read_integer(con, "num_satellites", "constellation", count);
        read_number(con, "altitude_km", "constellation", altitude);
        read_number(con, "first_longitude_deg", "constellation", first);
        if (count < 1) throw ConfigError("constellation.num_satellites", "must be at least 1");
        if (!(altitude > 0)) throw ConfigError("constellation.altitude_km", "must be positive");
        c.satellites = uniform_constellation(count, altitude, first);
    }
    if (doc.contains("satellites")) {
        const json& arr = doc.at("satellites");
        if (!arr.is_array()) throw ConfigError("satellites", "expected an array");
        c.satellites.clear();
        for (std::size_t n = 0; n < arr.size(); ++n) {
            const std::string path = "satellites[" + std::to_string(n) + "]";
            const json& s = arr[n];
            if (!s.is_object()) throw ConfigError(path, "expected an object");
            reject_unknown(s, path, {"initial_longitude_deg", "altitude_km", "longitude_rate_deg_per_s"});
            SatelliteOrbit orbit;
            orbit.initial_longitude_deg = require_number(s, "initial_longitude_deg", path);
            orbit.altitude_km = require_number(s, "altitude_km", path);
            if (!(orbit.altitude_km > 0)) throw ConfigError(path + ".altitude_km", "must be positive");
            orbit.longitude_rate_deg_s = relative_longitude_rate(orbit.altitude_km);
            read_number(&s, "longitude_rate_deg_per_s", path, orbit.longitude_rate_deg_s);
            c.satellites.push_back(orbit);
        }
    }

    if (const json* p = child_object(doc, "power", "")) {
        reject_unknown(*p, "power", {"hpa_efficiency", "dc_power_max_w", "bandwidth_total_hz", "rf_power_max_w"});
        read_number(p, "hpa_efficiency", "power", c.power_params.hpa_efficiency);
        read_number(p, "dc_power_max_w", "power", c.power_params.dc_power_max_w);
        read_number(p, "bandwidth_total_hz", "power", c.power_params.bandwidth_total_hz);
        read_number(p, "rf_power_max_w", "power", c.power_params.rf_power_max_w);
    }
    bool explicit_gain = false;
    if (const json* a = child_object(doc, "antenna", "")) {
        reject_unknown(*a, "antenna", {"aperture_ratio", "aperture_efficiency", "max_gain_linear", "carrier_frequency_hz"});
        read_number(a, "aperture_ratio", "antenna", c.antenna.aperture_ratio);
        read_number(a, "aperture_efficiency", "antenna", c.aperture_efficiency);
        read_number(a, "carrier_frequency_hz", "antenna", c.antenna.carrier_frequency_hz);
        explicit_gain = a->contains("max_gain_linear");
        read_number(a, "max_gain_linear", "antenna", c.antenna.max_gain);
    }
    if (!explicit_gain) c.antenna.max_gain = aperture_gain(c.antenna.aperture_ratio, c.aperture_efficiency);

    if (const json* r = child_object(doc, "receiver", "")) {
        reject_unknown(*r, "receiver", {"gain_dbi", "temperature_k"});
        read_number(r, "gain_dbi", "receiver", c.receiver.gain_dbi);
        read_number(r, "temperature_k", "receiver", c.receiver.temperature_k);
    }
    if (const json* b = child_object(doc, "beam", "")) {
        reject_unknown(*b, "beam", {"bandwidth_cap_hz", "power_cap_w"});
        read_number(b, "bandwidth_cap_hz", "beam", c.beam_bw_cap_hz);
        read_number(b, "power_cap_w", "beam", c.beam_power_cap_w);
    }
    if (const json* u = child_object(doc, "users", "")) {
        reject_unknown(*u, "users", {"position_std_km"});
        read_number(u, "position_std_km", "users", c.user_position_std_km);
    }
    if (const json* d = child_object(doc, "demand", "")) {
        reject_unknown(*d, "demand",
                       {"amplitude_min_bps", "amplitude_max_bps", "noise_std_bps", "phase_jitter_s", "day_length_s"});
        read_number(d, "amplitude_min_bps", "demand", c.demand.amplitude_min_bps);
        read_number(d, "amplitude_max_bps", "demand", c.demand.amplitude_max_bps);
        read_number(d, "noise_std_bps", "demand", c.demand.noise_std_bps);
        read_number(d, "phase_jitter_s", "demand", c.demand.phase_jitter_s);
        read_number(d, "day_length_s", "demand", c.demand.day_length_s);
    }

    if (!doc.contains("cities")) throw ConfigError("cities", "missing mandatory field");
    const json& cities = doc.at("cities");
    if (!cities.is_array() || cities.empty()) throw ConfigError("cities", "expected a non-empty array");
    for (std::size_t i = 0; i < cities.size(); ++i) {
        const std::string path = "cities[" + std::to_string(i) + "]";
        const json& e = cities[i];
        if (!e.is_object()) throw ConfigError(path, "expected an object");
        reject_unknown(e, path, {"name", "lat_deg", "lon_deg", "min_users", "max_users"});
        City city;
        if (e.contains("name")) {
            if (!e.at("name").is_string()) throw ConfigError(path + ".name", "expected a string");
            city.name = e.at("name").get<std::string>();
        }
        city.center.lat_deg = require_number(e, "lat_deg", path);
        city.center.lon_deg = require_number(e, "lon_deg", path);
        read_integer(&e, "min_users", path, city.min_users);
        read_integer(&e, "max_users", path, city.max_users);
        c.cities.push_back(std::move(city));
    }

    validate(c);
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + ": " + e.what());
    }
    return scenario_from_json(doc);
}

void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scenario file " + path.string());
    out << to_json(config).dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace meo
