#pragma once

// Stage 3: assigning clusters to satellites for one timeslot under the
// per-satellite bandwidth and RF-power capacities.
//
// Every solver optimizes lexicographically: serve as many clusters as
// possible, then minimize the summed cluster cost. Serving nothing is always
// feasible and free, so cost alone would never activate a beam.

#include "meo/geometry.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include <json.hpp>

namespace meo {

/// N satellites x M clusters. Infinite cost marks a pair that cannot be served.
struct MatchingInstance {
    Eigen::MatrixXd cost;
    Eigen::MatrixXd bw_load;
    Eigen::MatrixXd power_load;
    Eigen::VectorXd bw_cap;
    Eigen::VectorXd power_cap;

    Eigen::Index satellites() const { return cost.rows(); }
    Eigen::Index clusters() const { return cost.cols(); }

    /// Uniform caps for every satellite.
    static MatchingInstance with_caps(Eigen::Index satellites, Eigen::Index clusters, double bw_cap,
                                      double power_cap);
};

struct MatchingPlan {
    std::vector<std::optional<std::size_t>> assignment;  // per cluster
    std::size_t served_count{0};
    double total_cost{0};
};

/// Builds a plan from an assignment, summing cost in cluster order.
MatchingPlan make_plan(std::vector<std::optional<std::size_t>> assignment, const MatchingInstance& inst);

/// (C1) holds by construction; checks finite costs and both capacities.
bool is_feasible(const MatchingPlan& plan, const MatchingInstance& inst);

/// True when `a` serves more clusters, or as many at lower cost.
bool lexicographically_better(const MatchingPlan& a, const MatchingPlan& b);

/// Number of leaves of the full search tree: product over clusters of
/// (1 + number of satellites able to serve it).
double enumeration_size(const MatchingInstance& inst);

inline constexpr double kExactEnumerationLimit = 1e7;

/// Depth-first branch and bound. Throws SizeError when enumeration_size
/// exceeds `limit`.
MatchingPlan solve_matching_exact(const MatchingInstance& inst, double limit = kExactEnumerationLimit);

/// LP relaxation, projection onto the largest fractional satellite, then a
/// repair pass placing leftover clusters on their cheapest satellite with room,
/// moving one already placed cluster elsewhere when that frees enough room.
MatchingPlan solve_matching_relaxed(const MatchingInstance& inst);

/// Baseline: every cluster goes to the satellite closest to its beam center
/// among those that see it. Overloaded satellites then shed their
/// highest-demand cluster until both caps hold.
MatchingPlan assign_nearest_meo(const std::vector<SurfacePoint>& beam_centers,
                                const std::vector<EcefVector>& satellite_positions, double min_elevation_deg,
                                const MatchingInstance& inst, const Eigen::VectorXd& cluster_demand);

/// Debug dump of an instance (infinite costs written as null).
nlohmann::json to_json(const MatchingInstance& inst);
MatchingInstance matching_instance_from_json(const nlohmann::json& doc);

}  // namespace meo
