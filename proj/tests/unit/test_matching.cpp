#include <doctest.h>

#include "matching_oracle.hpp"
#include "meo/errors.hpp"
#include "meo/matching.hpp"
#include "meo/simplex.hpp"

#include <algorithm>
#include <random>

using namespace meo;
using meo::testing::enumerate_matching;
using meo::testing::random_instance;

namespace {

bool no_worse(const MatchingPlan& a, const MatchingPlan& b) { return !lexicographically_better(b, a); }

}  // namespace

TEST_CASE("linear program solver") {
    // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3
    Eigen::MatrixXd a(3, 2);
    a << 1, 1, 1, 3, 1, 0;
    const Eigen::VectorXd b = Eigen::Vector3d(4, 6, 3);
    const Eigen::VectorXd c = Eigen::Vector2d(3, 2);
    const auto lp = solve_lp_max(a, b, c);
    CHECK(lp.objective == doctest::Approx(11.0));
    CHECK(lp.x[0] == doctest::Approx(3.0));
    CHECK(lp.x[1] == doctest::Approx(1.0));

    // degenerate vertex at the origin
    Eigen::MatrixXd d(3, 2);
    d << 1, -1, -1, 1, 1, 1;
    const auto deg = solve_lp_max(d, Eigen::Vector3d(0, 0, 2), Eigen::Vector2d(1, 1));
    CHECK(deg.objective == doctest::Approx(2.0));
}

TEST_CASE("exact solver") {
    SUBCASE("one cluster, one satellite") {
        auto inst = MatchingInstance::with_caps(1, 1, 1e9, 100.0);
        inst.cost(0, 0) = 42.0;
        inst.bw_load(0, 0) = 1e8;
        inst.power_load(0, 0) = 10.0;
        const auto plan = solve_matching_exact(inst);
        CHECK(plan.assignment[0] == std::optional<std::size_t>(0));
        CHECK(plan.served_count == 1);
        CHECK(plan.total_cost == 42.0);
    }
    SUBCASE("no servable pair") {
        const auto inst = MatchingInstance::with_caps(3, 1, 1e9, 100.0);
        const auto plan = solve_matching_exact(inst);
        CHECK_FALSE(plan.assignment[0].has_value());
        CHECK(plan.served_count == 0);
        CHECK(plan.total_cost == 0.0);
    }
    SUBCASE("service wins over cost") {
        // both clusters fit only if the cheaper option of cluster 0 is skipped
        auto inst = MatchingInstance::with_caps(2, 2, 1e9, 100.0);
        inst.cost << 1.0, 1.0, 5.0, std::numeric_limits<double>::infinity();
        inst.bw_load << 6e8, 6e8, 6e8, 0.0;
        inst.power_load.setConstant(10.0);
        const auto plan = solve_matching_exact(inst);
        CHECK(plan.served_count == 2);
        CHECK(plan.assignment[0] == std::optional<std::size_t>(1));
        CHECK(plan.assignment[1] == std::optional<std::size_t>(0));
        CHECK(plan.total_cost == 6.0);
    }
    SUBCASE("matches full enumeration") {
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 60; ++trial) {
            const auto inst = random_instance(rng, 3, 8);
            const auto exact = solve_matching_exact(inst);
            const auto brute = enumerate_matching(inst);
            CHECK(is_feasible(exact, inst));
            CHECK(exact.served_count == brute.served_count);
            CHECK(exact.total_cost == brute.total_cost);
        }
    }
    SUBCASE("search space guard") {
        auto inst = MatchingInstance::with_caps(4, 12, 1e12, 1e6);
        inst.cost.setConstant(1.0);
        CHECK(enumeration_size(inst) == doctest::Approx(std::pow(5.0, 12)));
        CHECK_THROWS_AS(solve_matching_exact(inst), SizeError);
        CHECK_NOTHROW(solve_matching_exact(inst, 1e9));
    }
}

TEST_CASE("solver invariants") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const auto inst = random_instance(rng, 3, 8);
        const auto exact = solve_matching_exact(inst);
        const auto relaxed = solve_matching_relaxed(inst);
        CHECK(is_feasible(relaxed, inst));
        CHECK(no_worse(exact, relaxed));

        std::vector<SurfacePoint> centers(static_cast<std::size_t>(inst.clusters()), SurfacePoint{0, 0});
        std::vector<EcefVector> sats(static_cast<std::size_t>(inst.satellites()),
                                     satellite_position(SatelliteOrbit{0.0, 8062.0, 0.0}, 0.0));
        const auto nearest =
            assign_nearest_meo(centers, sats, 5.0, inst, Eigen::VectorXd::Ones(inst.clusters()));
        CHECK(is_feasible(nearest, inst));
        CHECK(no_worse(exact, nearest));

        MatchingInstance roomier = inst;
        roomier.bw_cap *= 1.5;
        roomier.power_cap *= 1.5;
        CHECK(solve_matching_exact(roomier).served_count >= exact.served_count);

        const auto again = solve_matching_exact(inst);
        CHECK(again.assignment == exact.assignment);
        CHECK(solve_matching_relaxed(inst).assignment == relaxed.assignment);
    }
}

TEST_CASE("relaxed solver") {
    SUBCASE("integral relaxation") {
        auto inst = MatchingInstance::with_caps(1, 4, 1e10, 1e4);
        for (int m = 0; m < 4; ++m) {
            inst.cost(0, m) = 10.0 + m;
            inst.bw_load(0, m) = 1e8;
            inst.power_load(0, m) = 10.0;
        }
        const auto relaxed = solve_matching_relaxed(inst);
        const auto exact = solve_matching_exact(inst);
        CHECK(relaxed.assignment == exact.assignment);
        CHECK(relaxed.total_cost == exact.total_cost);
    }
    SUBCASE("close to the exact solver on random instances") {
        std::mt19937_64 rng(1234);
        std::vector<double> gaps;
        int fewer = 0;
        for (int trial = 0; trial < 50; ++trial) {
            MatchingInstance inst;
            do {
                inst = random_instance(rng, 3, 8);
            } while (inst.satellites() < 3 || inst.clusters() < 8);
            const auto exact = solve_matching_exact(inst);
            const auto relaxed = solve_matching_relaxed(inst);
            CHECK(is_feasible(relaxed, inst));
            if (relaxed.served_count < exact.served_count) {
                ++fewer;
            } else if (exact.total_cost > 0) {
                gaps.push_back((relaxed.total_cost - exact.total_cost) / exact.total_cost);
            }
        }
        REQUIRE_FALSE(gaps.empty());
        std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
        const double median = gaps[gaps.size() / 2];
        MESSAGE("median relative cost gap " << median << ", served fewer on " << fewer << " of 50");
        CHECK(median <= 0.10);
    }
}

TEST_CASE("nearest satellite baseline") {
    const SatelliteOrbit s0{0.0, 8062.0, 0.0};
    const SatelliteOrbit s1{40.0, 8062.0, 0.0};
    const std::vector<EcefVector> sats{satellite_position(s0, 0.0), satellite_position(s1, 0.0)};

    SUBCASE("cluster under a nadir") {
        auto inst = MatchingInstance::with_caps(2, 1, 2.5e9, 800.0);
        inst.cost.setConstant(1.0);
        const auto plan = assign_nearest_meo({{0.0, 39.0}}, sats, 5.0, inst, Eigen::VectorXd::Ones(1));
        CHECK(plan.assignment[0] == std::optional<std::size_t>(1));
    }
    SUBCASE("two-satellite overload") {
        // clusters 0-2 nearest to satellite 0 and together over its 1 GHz;
        // cluster 3 nearest to satellite 1; cluster 4 seen by neither.
        const std::vector<SurfacePoint> centers{{0, 2}, {0, 5}, {0, 8}, {0, 30}, {0, 100}};
        auto inst = MatchingInstance::with_caps(2, 5, 1e9, 800.0);
        for (int n = 0; n < 2; ++n) {
            for (int m = 0; m < 4; ++m) {
                inst.cost(n, m) = 10.0 * (n + 1) + m;
                inst.bw_load(n, m) = 4e8;
                inst.power_load(n, m) = 50.0;
            }
        }
        Eigen::VectorXd demand(5);
        demand << 3e8, 5e8, 4e8, 1e8, 9e8;
        const auto plan = assign_nearest_meo(centers, sats, 5.0, inst, demand);
        const std::vector<std::optional<std::size_t>> expected{0, std::nullopt, 0, 1, std::nullopt};
        CHECK(plan.assignment == expected);
        CHECK(plan.served_count == 3);
        CHECK(plan.total_cost == 10.0 + 12.0 + 23.0);
        CHECK(is_feasible(plan, inst));
    }
    SUBCASE("three clusters over the cap, heaviest first") {
        auto inst = MatchingInstance::with_caps(1, 3, 1e9, 800.0);
        inst.cost.setConstant(1.0);
        inst.bw_load.setConstant(5e8);
        Eigen::VectorXd demand(3);
        demand << 2e8, 7e8, 3e8;
        const auto plan = assign_nearest_meo({{0, 1}, {0, 2}, {0, 3}}, {sats[0]}, 5.0, inst, demand);
        CHECK_FALSE(plan.assignment[1].has_value());
        CHECK(plan.served_count == 2);
    }
}

TEST_CASE("instance dump round trip") {
    std::mt19937_64 rng(3);
    const auto inst = random_instance(rng, 3, 6);
    const auto back = matching_instance_from_json(nlohmann::json::parse(to_json(inst).dump()));
    for (Eigen::Index n = 0; n < inst.satellites(); ++n) {
        for (Eigen::Index m = 0; m < inst.clusters(); ++m) CHECK(back.cost(n, m) == inst.cost(n, m));
    }
    CHECK(back.bw_load == inst.bw_load);
    CHECK(back.power_load == inst.power_load);
    CHECK(back.bw_cap == inst.bw_cap);
    CHECK(back.power_cap == inst.power_cap);
}
