#pragma once

// Stage 1: grouping users into beams.

#include "meo/geometry.hpp"
#include "meo/scenario.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace meo {

/// K x K, entry (k, l) = 1 when users k and l fit in one beam from anywhere on the orbit.
using AdjacencyMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct Cluster {
    std::vector<std::size_t> members;  // ascending user indices
    SurfacePoint beam_center;
    /// Peak required bandwidth exceeds the per-beam cap (only possible for singletons).
    bool oversize{false};
};

// --- required bandwidth ----------------------------------------------------

/// Worst case over the simulation grid of the distance to the nearest visible
/// satellite. Slots in which no satellite is visible are skipped; throws
/// CoverageError when the user is never visible.
double worst_case_distance(const SurfacePoint& user, const ScenarioConfig& config);

/// Bandwidth B solving B*log2(1 + S/B) = demand, where S = P*h/sigma^2 is the
/// received-power-to-noise-density ratio in Hz. Zero demand gives zero; a demand
/// at or above the infinite-bandwidth limit S/ln 2 gives +infinity.
double bandwidth_for_rate(double demand_bps, double snr_bandwidth_hz);

/// Received-power-to-noise-density ratio at the beam edge for the worst-case distance.
double beam_edge_snr_bandwidth(double worst_distance_km, const ScenarioConfig& config);

/// Required bandwidth per timeslot for one user.
Eigen::VectorXd required_bw(const UserTerminal& user, const ScenarioConfig& config);

/// K x T matrix of required bandwidths.
Eigen::MatrixXd required_bw_profiles(const std::vector<UserTerminal>& users, const ScenarioConfig& config,
                                     unsigned threads = 0);

// --- adjacency -------------------------------------------------------------

AdjacencyMatrix adjacency_matrix(const std::vector<SurfacePoint>& positions, const SatelliteOrbit& orbit,
                                 double theta_beam_rad, unsigned threads = 0);

// --- efficiency factor -----------------------------------------------------

/// Mean over peak of a summed bandwidth profile; 1 for an all-zero profile.
double efficiency_factor(const Eigen::Ref<const Eigen::VectorXd>& summed_profile);

/// Efficiency factor of the users `members`, rows of the K x T `profiles`.
double efficiency_factor(const Eigen::MatrixXd& profiles, const std::vector<std::size_t>& members);

// --- clustering ------------------------------------------------------------

/// Greedy clique growth maximizing the efficiency factor under the per-beam
/// bandwidth cap. Beam centers are left default; see place_beam_centers.
std::vector<Cluster> cluster_users_proposed(const AdjacencyMatrix& adjacency, const Eigen::MatrixXd& profiles,
                                            double beam_bw_cap_hz);

/// Leader-based clustering with a maximum pairwise great-circle distance.
std::vector<Cluster> cluster_users_baseline(const std::vector<SurfacePoint>& positions, double max_distance_km);

/// Cluster diameter for a beamwidth seen from altitude h: 2*h*tan(theta/2).
double cluster_max_distance(double theta_beam_deg, double altitude_km);

/// Demand-weighted centroid of the members, projected back to the surface.
SurfacePoint beam_center(const Cluster& cluster, const std::vector<UserTerminal>& users, double eta_bps);

void place_beam_centers(std::vector<Cluster>& clusters, const std::vector<UserTerminal>& users, double eta_bps);

/// Marks clusters whose peak summed profile exceeds the cap.
void flag_oversize(std::vector<Cluster>& clusters, const Eigen::MatrixXd& profiles, double beam_bw_cap_hz);

std::vector<SurfacePoint> positions_of(const std::vector<UserTerminal>& users);

}  // namespace meo
