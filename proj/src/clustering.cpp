#include "meo/clustering.hpp"

#include "meo/errors.hpp"
#include "meo/parallel.hpp"
#include "meo/rf_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace meo {

double worst_case_distance(const SurfacePoint& user, const ScenarioConfig& config) {
    double worst = -1.0;
    for (int t = 0; t < config.num_timeslots; ++t) {
        const double time = config.slot_time(t);
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& orbit : config.satellites) {
            const EcefVector sat = satellite_position(orbit, time);
            if (in_fov(sat, user, config.min_elevation_deg)) nearest = std::min(nearest, slant_range(sat, user));
        }
        if (std::isfinite(nearest)) worst = std::max(worst, nearest);
    }
    if (worst < 0) {
        throw CoverageError("user at (" + std::to_string(user.lat_deg) + ", " + std::to_string(user.lon_deg) +
                            ") is never inside any satellite field of view");
    }
    return worst;
}

double bandwidth_for_rate(double demand_bps, double snr_bandwidth_hz) {
    if (demand_bps <= 0) return 0.0;
    const auto rate = [&](double b) { return b * std::log1p(snr_bandwidth_hz / b) / std::numbers::ln2; };
    if (demand_bps >= snr_bandwidth_hz / std::numbers::ln2) return std::numeric_limits<double>::infinity();

    double lo = 0.0;
    double hi = demand_bps;
    while (rate(hi) < demand_bps) {
        lo = hi;
        hi *= 2.0;
    }
    // rate() is strictly increasing in b
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (rate(mid) < demand_bps) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

double beam_edge_snr_bandwidth(double worst_distance_km, const ScenarioConfig& config) {
    const double edge_gain = config.antenna.max_gain / 2.0;
    const double gain = edge_gain * free_space_path_loss(worst_distance_km, config.antenna.carrier_frequency_hz) *
                        config.receiver.gain_linear();
    return config.beam_power_cap_w * gain / noise_psd(config.receiver.temperature_k);
}

Eigen::VectorXd required_bw(const UserTerminal& user, const ScenarioConfig& config) {
    const double s = beam_edge_snr_bandwidth(worst_case_distance(user.position, config), config);
    return user.demand.unaryExpr([s](double d) { return bandwidth_for_rate(d, s); });
}

Eigen::MatrixXd required_bw_profiles(const std::vector<UserTerminal>& users, const ScenarioConfig& config,
                                     unsigned threads) {
    Eigen::MatrixXd profiles(static_cast<Eigen::Index>(users.size()), config.num_timeslots);
    parallel_for(
        users.size(),
        [&](std::size_t k) { profiles.row(static_cast<Eigen::Index>(k)) = required_bw(users[k], config).transpose(); },
        threads);
    return profiles;
}

AdjacencyMatrix adjacency_matrix(const std::vector<SurfacePoint>& positions, const SatelliteOrbit& orbit,
                                 double theta_beam_rad, unsigned threads) {
    const auto count = static_cast<Eigen::Index>(positions.size());
    AdjacencyMatrix u = AdjacencyMatrix::Zero(count, count);
    std::vector<EcefVector> ecef;
    ecef.reserve(positions.size());
    for (const auto& p : positions) ecef.push_back(to_ecef(p));

    const double radius = orbit.radius_km();
    // No surface point comes closer than the altitude to the orbit, so a chord
    // c is never seen under more than 2*asin(c / 2h).
    const double sure_chord = 2.0 * orbit.altitude_km * std::sin(theta_beam_rad / 2.0);

    parallel_for(
        positions.size(),
        [&](std::size_t k) {
            const auto row = static_cast<Eigen::Index>(k);
            u(row, row) = 1;
            for (std::size_t l = k + 1; l < positions.size(); ++l) {
                const double chord = (ecef[k] - ecef[l]).norm();
                bool adjacent = false;
                if (chord < sure_chord) {
                    adjacent = true;
                } else {
                    // one orbit point over the pair already exceeding the beam
                    // settles the pair as non-adjacent
                    const EcefVector mid = ecef[k] + ecef[l];
                    bool settled = false;
                    if (std::hypot(mid.x(), mid.y()) > 1e-9) {
                        const double lon = std::atan2(mid.y(), mid.x());
                        settled = detail::vertex_angle(ecef[k], ecef[l], radius, lon) >= theta_beam_rad;
                    }
                    adjacent = !settled && max_orbit_angle(positions[k], positions[l], orbit) < theta_beam_rad;
                }
                if (adjacent) {
                    const auto col = static_cast<Eigen::Index>(l);
                    u(row, col) = 1;
                    u(col, row) = 1;
                }
            }
        },
        threads);
    return u;
}

double efficiency_factor(const Eigen::Ref<const Eigen::VectorXd>& summed_profile) {
    const double peak = summed_profile.size() > 0 ? summed_profile.maxCoeff() : 0.0;
    if (!(peak > 0)) return 1.0;
    return summed_profile.sum() / (static_cast<double>(summed_profile.size()) * peak);
}

double efficiency_factor(const Eigen::MatrixXd& profiles, const std::vector<std::size_t>& members) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(profiles.cols());
    for (auto k : members) sum += profiles.row(static_cast<Eigen::Index>(k)).transpose();
    return efficiency_factor(sum);
}

std::vector<Cluster> cluster_users_proposed(const AdjacencyMatrix& adjacency, const Eigen::MatrixXd& profiles,
                                            double beam_bw_cap_hz) {
    const Eigen::Index count = adjacency.rows();
    AdjacencyMatrix live = adjacency;
    std::vector<Cluster> clusters;

    for (Eigen::Index k = 0; k < count; ++k) {
        if (live(k, k) != 1) continue;
        Cluster cluster;
        cluster.members.push_back(static_cast<std::size_t>(k));
        live.col(k).setZero();

        std::vector<Eigen::Index> candidates;
        for (Eigen::Index l = 0; l < count; ++l) {
            if (live(k, l) == 1) candidates.push_back(l);
        }

        Eigen::VectorXd sum = profiles.row(k).transpose();
        while (sum.maxCoeff() < beam_bw_cap_hz) {
            Eigen::Index best = -1;
            double best_e = -1.0;
            for (Eigen::Index l : candidates) {
                const Eigen::VectorXd joint = sum + profiles.row(l).transpose();
                if (!(joint.maxCoeff() <= beam_bw_cap_hz)) continue;
                const double e = efficiency_factor(joint);
                if (e > best_e) {  // strict: lowest index wins ties
                    best_e = e;
                    best = l;
                }
            }
            if (best < 0) break;

            cluster.members.push_back(static_cast<std::size_t>(best));
            live.col(best).setZero();
            sum += profiles.row(best).transpose();
            std::erase_if(candidates, [&](Eigen::Index m) { return live(best, m) != 1; });
        }
        std::sort(cluster.members.begin(), cluster.members.end());
        cluster.oversize = !(sum.maxCoeff() <= beam_bw_cap_hz);
        clusters.push_back(std::move(cluster));
    }
    return clusters;
}

std::vector<Cluster> cluster_users_baseline(const std::vector<SurfacePoint>& positions, double max_distance_km) {
    std::vector<bool> taken(positions.size(), false);
    std::vector<Cluster> clusters;
    for (std::size_t leader = 0; leader < positions.size(); ++leader) {
        if (taken[leader]) continue;
        Cluster cluster;
        cluster.members.push_back(leader);
        taken[leader] = true;
        for (std::size_t j = leader + 1; j < positions.size(); ++j) {
            if (taken[j]) continue;
            const bool fits = std::all_of(cluster.members.begin(), cluster.members.end(), [&](std::size_t m) {
                return great_circle_distance(positions[m], positions[j]) <= max_distance_km;
            });
            if (fits) {
                cluster.members.push_back(j);
                taken[j] = true;
            }
        }
        clusters.push_back(std::move(cluster));
    }
    return clusters;
}

double cluster_max_distance(double theta_beam_deg, double altitude_km) {
    return 2.0 * altitude_km * std::tan(deg2rad(theta_beam_deg) / 2.0);
}

SurfacePoint beam_center(const Cluster& cluster, const std::vector<UserTerminal>& users, double eta_bps) {
    EcefVector acc = EcefVector::Zero();
    double total = 0.0;
    for (auto k : cluster.members) {
        const double w = eta_bps + (users[k].demand.size() > 0 ? users[k].demand.maxCoeff() : 0.0);
        acc += w * to_ecef(users[k].position);
        total += w;
    }
    return to_surface(acc / total);
}

void place_beam_centers(std::vector<Cluster>& clusters, const std::vector<UserTerminal>& users, double eta_bps) {
    for (auto& c : clusters) c.beam_center = beam_center(c, users, eta_bps);
}

void flag_oversize(std::vector<Cluster>& clusters, const Eigen::MatrixXd& profiles, double beam_bw_cap_hz) {
    for (auto& c : clusters) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(profiles.cols());
        for (auto k : c.members) sum += profiles.row(static_cast<Eigen::Index>(k)).transpose();
        c.oversize = sum.size() > 0 && !(sum.maxCoeff() <= beam_bw_cap_hz);
    }
}

std::vector<SurfacePoint> positions_of(const std::vector<UserTerminal>& users) {
    std::vector<SurfacePoint> out;
    out.reserve(users.size());
    for (const auto& u : users) out.push_back(u.position);
    return out;
}

}  // namespace meo
