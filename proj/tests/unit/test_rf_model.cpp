#include <doctest.h>

#include "meo/errors.hpp"
#include "meo/rf_model.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace meo;

namespace {

// Power series of J1 in long double; accurate well past the first null.
long double j1_series(long double x) {
    long double term = x / 2.0L;
    long double sum = term;
    const long double q = -(x * x) / 4.0L;
    for (int m = 1; m < 80; ++m) {
        term *= q / (static_cast<long double>(m) * static_cast<long double>(m + 1));
        sum += term;
    }
    return sum;
}

// Hankel large-argument expansion, leading corrections only.
double j1_asymptotic(double x) {
    const double w = x - 0.75 * std::numbers::pi;
    const double p = 1.0 + 15.0 / (128.0 * x * x);
    const double q = 0.375 / x;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(w) - q * std::sin(w));
}

long double pattern_series(long double theta, long double ratio) {
    const long double u = 2.0L * std::numbers::pi_v<long double> * ratio * std::sin(theta);
    const long double r = j1_series(u) / u;
    return 4.0L * r * r;
}

// Independent half-power search on the series pattern, in degrees.
double beamwidth_oracle(double ratio) {
    long double lo = 1e-9L;
    long double hi = std::asin(3.8317L / (2.0L * std::numbers::pi_v<long double> * ratio));
    for (int i = 0; i < 200; ++i) {
        const long double mid = (lo + hi) / 2.0L;
        (pattern_series(mid, ratio) > 0.5L ? lo : hi) = mid;
    }
    return static_cast<double>(2.0L * (lo + hi) / 2.0L * 180.0L / std::numbers::pi_v<long double>);
}

}  // namespace

TEST_CASE("bessel J1 against independent expansions") {
    for (double x = 0.0; x <= 12.0; x += 0.01) {
        CHECK(bessel_j1(x) == doctest::Approx(static_cast<double>(j1_series(x))).epsilon(1e-10).scale(1.0));
    }
    for (double x = 200.0; x <= 400.0; x += 3.7) {
        CHECK(std::abs(bessel_j1(x) - j1_asymptotic(x)) < 1e-8);
    }
    CHECK(std::abs(bessel_j1(kBesselJ1FirstZero)) < 1e-14);
}

TEST_CASE("normalized pattern gain") {
    CHECK(normalized_pattern_gain(0.0, 15.0) == 1.0);
    CHECK(normalized_pattern_gain(deg2rad(0.98), 15.0) == doctest::Approx(0.5).epsilon(0.01));

    SUBCASE("small-angle quadratic behaviour") {
        for (double theta : {1e-5, 5e-5, 1e-4}) {
            const double u = 2.0 * std::numbers::pi * 15.0 * std::sin(theta);
            const double g = normalized_pattern_gain(theta, 15.0);
            CHECK((1.0 - g) / (u * u / 4.0) == doctest::Approx(1.0).epsilon(1e-3));
        }
    }
    SUBCASE("matches the series oracle") {
        for (double deg = 0.01; deg < 6.0; deg += 0.037) {
            const double theta = deg2rad(deg);
            CHECK(normalized_pattern_gain(theta, 10.0) ==
                  doctest::Approx(static_cast<double>(pattern_series(theta, 10.0L))).epsilon(1e-9).scale(1.0));
        }
    }
    CHECK_THROWS_AS(normalized_pattern_gain(-0.1, 15.0), DomainError);
    CHECK_THROWS_AS(normalized_pattern_gain(2.0, 15.0), DomainError);
}

TEST_CASE("half-power beamwidth") {
    CHECK(half_power_beamwidth(15.0) == doctest::Approx(1.96).epsilon(0.01 / 1.96));
    CHECK(half_power_beamwidth(10.0) == doctest::Approx(2.94).epsilon(0.01 / 2.94));
    for (double ratio : {5.0, 10.0, 15.0, 20.0, 7.3}) {
        const double theta = half_power_beamwidth(ratio);
        CHECK(theta == doctest::Approx(beamwidth_oracle(ratio)).epsilon(1e-9));
        CHECK(normalized_pattern_gain(deg2rad(theta / 2.0), ratio) == doctest::Approx(0.5).epsilon(1e-10));
    }
    // inverse proportionality in the small-angle regime
    CHECK(half_power_beamwidth(20.0) * 20.0 == doctest::Approx(half_power_beamwidth(10.0) * 10.0).epsilon(1e-3));
    CHECK_THROWS_AS(half_power_beamwidth(0.4), DomainError);
    CHECK_THROWS_AS(half_power_beamwidth(-1.0), DomainError);
}

TEST_CASE("free-space path loss") {
    CHECK(free_space_path_loss(2000.0, 20e9) == doctest::Approx(free_space_path_loss(1000.0, 20e9) / 4.0));
    // 32.45 + 20 log10(d_km) + 20 log10(f_MHz)
    const double hand_db = 32.45 + 20.0 * std::log10(8062.0) + 20.0 * std::log10(20000.0);
    CHECK(-linear_to_db(free_space_path_loss(8062.0, 20e9)) == doctest::Approx(hand_db).epsilon(1e-4));
    CHECK(-linear_to_db(free_space_path_loss(8062.0, 20e9)) == doctest::Approx(196.6).epsilon(1e-3));

    const double lambda = kSpeedOfLight / 20e9;
    CHECK(free_space_path_loss(lambda / (4.0 * std::numbers::pi) / 1000.0, 20e9) == doctest::Approx(1.0));
    CHECK_THROWS_AS(free_space_path_loss(0.0, 20e9), DomainError);
}

TEST_CASE("channel gain") {
    AntennaConfig ant;
    ant.aperture_ratio = 15.0;
    ant.max_gain = aperture_gain(15.0, 0.55);
    const double rx = db_to_linear(41.45);
    const SatelliteOrbit orbit{0.0, 8062.0, 0.0};
    const auto sat = satellite_position(orbit, 0.0);
    const SurfacePoint center{0.0, 0.0};

    CHECK(channel_gain(sat, center, center, ant, rx) ==
          doctest::Approx(ant.max_gain * free_space_path_loss(8062.0, 20e9) * rx));

    // pattern factor alone: a user at the half-power boresight angle gets half
    const double half = deg2rad(half_power_beamwidth(15.0) / 2.0);
    CHECK(normalized_pattern_gain(half, 15.0) == doctest::Approx(0.5 * normalized_pattern_gain(0.0, 15.0)));

    const SurfacePoint user{1.2, -0.7};
    const double theta = boresight_angle(sat, center, user);
    const double product = ant.max_gain * normalized_pattern_gain(theta, 15.0) *
                           free_space_path_loss(slant_range(sat, user), 20e9) * rx;
    CHECK(channel_gain(sat, center, user, ant, rx) == doctest::Approx(product).epsilon(1e-14));

    CHECK_THROWS_AS(channel_gain(sat, center, SurfacePoint{0.0, 180.0}, ant, rx), DomainError);
}

TEST_CASE("noise power spectral density") {
    CHECK(noise_psd(224.5) == doctest::Approx(3.099e-21).epsilon(1e-3));
    CHECK(noise_psd(449.0) == doctest::Approx(2.0 * noise_psd(224.5)));
    CHECK(noise_psd(1.0 / kBoltzmann) == doctest::Approx(1.0));
    CHECK_THROWS_AS(noise_psd(0.0), DomainError);
}

TEST_CASE("shannon rate") {
    const LinkBudget link{1e-15, 3e-21};
    CHECK(shannon_rate(0.0, 10.0, link) == 0.0);
    const double b = 1e8;
    const double p = b * link.noise_psd / link.channel_gain;  // SNR = 1
    CHECK(shannon_rate(b, p, link) == doctest::Approx(b));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> bw(1e6, 1e9), pw(0.1, 200.0);
    for (int i = 0; i < 500; ++i) {
        const double b1 = bw(rng), b2 = bw(rng), p1 = pw(rng), p2 = pw(rng);
        const double mid = shannon_rate((b1 + b2) / 2, (p1 + p2) / 2, link);
        const double avg = (shannon_rate(b1, p1, link) + shannon_rate(b2, p2, link)) / 2;
        CHECK(mid >= avg * (1.0 - 1e-12));
    }
}

TEST_CASE("decibel conversions") {
    CHECK(db_to_linear(30.0) == doctest::Approx(1000.0));
    CHECK(linear_to_db(db_to_linear(41.45)) == doctest::Approx(41.45));
    CHECK(aperture_gain(15.0, 0.55) == doctest::Approx(std::pow(2 * std::numbers::pi * 15, 2) * 0.55));
}
