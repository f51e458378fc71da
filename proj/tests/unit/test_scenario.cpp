#include <doctest.h>

#include "meo/errors.hpp"
#include "meo/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace meo;

namespace {

ScenarioConfig with_city(ScenarioConfig c, SurfacePoint center, int lo, int hi) {
    c.cities.push_back({"c" + std::to_string(c.cities.size()), center, lo, hi});
    return c;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("meo_test_" + name);
}

ScenarioConfig parse(const std::string& text) { return scenario_from_json(nlohmann::json::parse(text)); }

}  // namespace

TEST_CASE("user generation") {
    SUBCASE("one user near the city centre") {
        const auto config = with_city(default_config(), {10.0, 20.0}, 1, 1);
        const auto users = generate_users(config);
        REQUIRE(users.size() == 1);
        CHECK(great_circle_distance(users[0].position, SurfacePoint{10.0, 20.0}) <=
              5.0 * config.user_position_std_km * std::sqrt(2.0));
        CHECK(users[0].demand.size() == config.num_timeslots);
        CHECK(users[0].id == 0);
    }
    SUBCASE("deterministic in the seed") {
        auto config = with_city(default_config(), {35.0, 139.0}, 20, 50);
        config = with_city(config, {-23.5, -46.6}, 20, 50);
        const auto a = generate_users(config);
        const auto b = generate_users(config);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].position == b[k].position);
            CHECK(a[k].demand == b[k].demand);
        }
        config.rng_seed = 99;
        const auto c = generate_users(config);
        CHECK((c.size() != a.size() || !(c[0].position == a[0].position)));
    }
    SUBCASE("thirty cities") {
        ScenarioConfig config = default_config();
        for (int i = 0; i < 30; ++i) config = with_city(config, {-50.0 + 3.0 * i, -170.0 + 11.0 * i}, 20, 50);
        const auto users = generate_users(config);
        CHECK(users.size() >= 600);
        CHECK(users.size() <= 1500);
    }
}

TEST_CASE("demand series") {
    ScenarioConfig config = with_city(default_config(), {0.0, 0.0}, 1, 1);
    std::mt19937_64 rng(1);

    SUBCASE("zero amplitude, zero noise") {
        config.demand.amplitude_min_bps = config.demand.amplitude_max_bps = 0.0;
        config.demand.noise_std_bps = 0.0;
        CHECK(generate_demand({0, 0}, config, rng).isZero(0.0));
    }
    SUBCASE("noise-free series repeats every day") {
        config.demand.noise_std_bps = 0.0;
        config.num_timeslots = 3 * 240;
        const auto d = generate_demand({5.0, 77.0}, config, rng);
        const int period = static_cast<int>(config.demand.day_length_s / config.timeslot_duration_s);
        CHECK(period == 240);
        for (int t = 0; t + period < config.num_timeslots; ++t) {
            CHECK(d[t + period] == doctest::Approx(d[t]).epsilon(1e-9).scale(1.0));
        }
        CHECK((d.array() >= 0.0).all());
        CHECK(d.maxCoeff() <= config.demand.amplitude_max_bps);
    }
    SUBCASE("aggregate follows a daily cycle") {
        config.num_timeslots = 240;
        Eigen::VectorXd total = Eigen::VectorXd::Zero(240);
        for (int k = 0; k < 400; ++k) total += generate_demand({0.0, 0.0}, config, rng);
        // sum of sinusoids sharing a phase up to jitter: one peak, one trough per day
        Eigen::Index peak, trough;
        total.maxCoeff(&peak);
        total.minCoeff(&trough);
        CHECK(std::abs(static_cast<double>(peak - trough)) == doctest::Approx(120.0).epsilon(0.1));
        CHECK(total.maxCoeff() > 5.0 * total.minCoeff());
        // adjacent slots move little relative to the swing
        const double swing = total.maxCoeff() - total.minCoeff();
        for (int t = 1; t < 240; ++t) CHECK(std::abs(total[t] - total[t - 1]) < 0.1 * swing);
    }
}

TEST_CASE("scenario files") {
    SUBCASE("defaults from a minimal file") {
        const auto c = parse(R"({"cities": [{"lat_deg": 1, "lon_deg": 2}]})");
        CHECK(c.power_params.bandwidth_total_hz == 2.5e9);
        CHECK(c.power_params.rf_power_max_w == 800.0);
        CHECK(c.power_params.hpa_efficiency == 0.6);
        CHECK(c.power_params.dc_power_max_w == 5000.0);
        CHECK(c.min_elevation_deg == 5.0);
        CHECK(c.satellites.size() == 15);
        CHECK(c.satellites[0].altitude_km == 8062.0);
        CHECK(c.antenna.max_gain == doctest::Approx(aperture_gain(15.0, 0.55)));
        CHECK(c.num_timeslots == 150);
        CHECK(c.timeslot_duration_s == 360.0);
        CHECK(c.cities.size() == 1);
        CHECK(c.cities[0].min_users == 20);
        CHECK(c.cities[0].max_users == 50);
    }
    SUBCASE("beam cap above the satellite total") {
        try {
            parse(R"({"beam": {"bandwidth_cap_hz": 3e9}, "cities": [{"lat_deg": 1, "lon_deg": 2}]})");
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "beam.bandwidth_cap_hz");
        }
    }
    SUBCASE("field paths on errors") {
        const auto field_of = [](const std::string& text) {
            try {
                parse(text);
            } catch (const ConfigError& e) {
                return e.field();
            }
            return std::string("<none>");
        };
        CHECK(field_of(R"({"cities": []})") == "cities");
        CHECK(field_of(R"({})") == "cities");
        CHECK(field_of(R"({"bogus": 1, "cities": [{"lat_deg": 1, "lon_deg": 2}]})") == "bogus");
        CHECK(field_of(R"({"cities": [{"lat_deg": 91, "lon_deg": 2}]})") == "cities[0]");
        CHECK(field_of(R"({"cities": [{"lat_deg": 1}]})") == "cities[0].lon_deg");
        CHECK(field_of(R"({"power": {"hpa_efficiency": 0}, "cities": [{"lat_deg": 1, "lon_deg": 2}]})") ==
              "power.hpa_efficiency");
        CHECK(field_of(R"({"num_timeslots": 2.5, "cities": [{"lat_deg": 1, "lon_deg": 2}]})") == "num_timeslots");
        CHECK(field_of(R"({"satellites": [{"altitude_km": 8062}], "cities": [{"lat_deg": 1, "lon_deg": 2}]})") ==
              "satellites[0].initial_longitude_deg");
        CHECK(field_of(R"({"constellation": {}, "satellites": [], "cities": [{"lat_deg": 1, "lon_deg": 2}]})") ==
              "constellation");
        CHECK(field_of(R"({"cities": [{"lat_deg": 1, "lon_deg": 2, "min_users": 5, "max_users": 4}]})") ==
              "cities[0].max_users");
    }
    SUBCASE("constellation shorthand") {
        const auto c = parse(R"({"constellation": {"num_satellites": 3, "first_longitude_deg": 10},
                                 "cities": [{"lat_deg": 1, "lon_deg": 2}]})");
        REQUIRE(c.satellites.size() == 3);
        CHECK(c.satellites[1].initial_longitude_deg == doctest::Approx(130.0));
        CHECK(c.satellites[2].initial_longitude_deg == doctest::Approx(-110.0));
        CHECK(c.satellites[0].longitude_rate_deg_s == relative_longitude_rate(8062.0));
    }
    SUBCASE("save then load") {
        ScenarioConfig c = with_city(default_config(), {12.5, -3.25}, 3, 9);
        c.rng_seed = 12345678901234ULL;
        c.antenna.aperture_ratio = 10.0;
        c.antenna.max_gain = 1234.5;  // explicit gain survives
        c.demand.noise_std_bps = 0.0;
        c.satellites.push_back({33.3, 9000.0, 0.01});
        const auto path = temp_file("roundtrip.json");
        save_scenario(c, path);
        CHECK(load_scenario(path) == c);
        std::filesystem::remove(path);
    }
    SUBCASE("missing and malformed files") {
        CHECK_THROWS_AS(load_scenario(temp_file("does_not_exist.json")), IoError);
        const auto path = temp_file("malformed.json");
        std::ofstream(path) << "{ not json";
        CHECK_THROWS_AS(load_scenario(path), ConfigError);
        std::filesystem::remove(path);
    }
}

TEST_CASE("shipped scenarios load") {
    for (const char* name : {"desk.json", "full.json"}) {
        const auto c = load_scenario(std::filesystem::path(MEO_DATA_DIR) / name);
        CHECK_NOTHROW(validate(c));
    }
}
