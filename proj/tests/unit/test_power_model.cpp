#include <doctest.h>

#include "meo/errors.hpp"
#include "meo/power_model.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace meo;

TEST_CASE("radiated power per satellite") {
    CHECK(meo_rf_power({}) == 0.0);
    std::vector<double> p{10, 20, 30};
    CHECK(meo_rf_power(p) == 60.0);
    std::vector<double> shuffled{30, 10, 20};
    CHECK(meo_rf_power(shuffled) == meo_rf_power(p));
}

TEST_CASE("hardware power per satellite") {
    const PowerParams params;
    CHECK(meo_hw_power(0.0, 0.0, params) == 0.0);
    CHECK(meo_hw_power(2.5e9, 0.0, params) == doctest::Approx(5000.0));
    CHECK(meo_hw_power(0.0, 60.0, params) == doctest::Approx(100.0));
    CHECK_THROWS_AS(meo_hw_power(2.6e9, 0.0, params), CapacityError);
}

TEST_CASE("aggregate power") {
    const PowerParams params;
    CHECK(params.power_coeff() == doctest::Approx(1.6 / 0.6));
    CHECK(params.bw_coeff() == doctest::Approx(2e-6));

    std::vector<double> zeros(4, 0.0);
    CHECK(total_power(zeros, zeros, params) == 0.0);

    std::vector<double> bw{100e6};
    std::vector<double> pw{60.0};
    CHECK(total_power(bw, pw, params) == doctest::Approx(360.0));
}

TEST_CASE("aggregate equals the per-satellite composition") {
    const PowerParams params;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> users(0, 40);
    std::uniform_int_distribution<std::size_t> sats(1, 6);
    std::uniform_real_distribution<double> bw(0.0, 80e6), pw(0.0, 25.0), u01(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = users(rng);
        const std::size_t n = sats(rng);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<double> b(k), p(k);
        std::vector<std::optional<std::size_t>> sat(k);
        std::vector<double> served_b, served_p;
        for (int i = 0; i < k; ++i) {
            if (u01(rng) < 0.1) continue;  // unserved users carry nothing
            b[i] = bw(rng);
            p[i] = pw(rng);
            sat[i] = pick(rng);
        }
        const double aggregate = total_power(b, p, params);
        const double composed = total_power_by_satellite(b, p, sat, n, params);
        if (aggregate == 0.0) {
            CHECK(composed == 0.0);
        } else {
            CHECK(std::abs(composed - aggregate) / aggregate <= 1e-9);
        }
    }
}
