#pragma once

// Stage 2: minimum-power bandwidth/power split serving each member of a
// cluster from a given satellite.

#include "meo/clustering.hpp"
#include "meo/geometry.hpp"
#include "meo/power_model.hpp"
#include "meo/rf_model.hpp"
#include "meo/scenario.hpp"

#include <limits>
#include <vector>

namespace meo {

inline constexpr double kInfeasibleCost = std::numeric_limits<double>::infinity();

struct UserLinkProblem {
    double demand_bps{0};
    double channel_gain{1};
    double noise_psd{1};      // W/Hz
    double power_coeff{1};    // W per radiated W
    double bw_coeff{0};       // W per Hz
};

struct LinkAllocation {
    double bw_hz{0};
    double power_w{0};

    double cost(const UserLinkProblem& p) const { return p.power_coeff * power_w + p.bw_coeff * bw_hz; }
};

/// Exact minimizer of power_coeff*P + bw_coeff*B subject to the Shannon rate
/// meeting the demand. The rate constraint is tight at the optimum, so the
/// search runs over the per-Hz SNR r: B = D / log2(1 + r), P = B*sigma^2*r/h.
/// Throws DomainError for non-positive gain or noise.
LinkAllocation solve_user_link(const UserLinkProblem& p);

/// The SNR r* minimizing (bw_coeff + power_coeff*sigma^2*r/h) / log2(1 + r);
/// independent of the demand.
double optimal_snr(const UserLinkProblem& p);

/// Brute force over a log grid of B in [D/20, 20*D] with the power that makes
/// the rate exactly D.
LinkAllocation grid_oracle(const UserLinkProblem& p, int grid_points);

/// Radio constants shared by every cluster solve.
struct RadioContext {
    AntennaConfig antenna;
    double rx_gain{1};
    double noise_psd{1};
    PowerParams power;
    double min_elevation_deg{5};
};

RadioContext make_radio_context(const ScenarioConfig& config);

struct ClusterAllocation {
    std::vector<double> per_user_bw;     // aligned with cluster.members
    std::vector<double> per_user_power;
    double cost{kInfeasibleCost};
    bool feasible{false};

    double total_bw() const;
    double total_power() const;
};

/// Serves every member of the cluster from `sat` with the beam steered at the
/// cluster's beam center. Beam centers outside the field of view, and members
/// with no usable channel, make the result infeasible with an infinite cost.
ClusterAllocation solve_cluster(const EcefVector& sat, const Cluster& cluster, const std::vector<UserTerminal>& users,
                                int t, const RadioContext& radio);

}  // namespace meo
