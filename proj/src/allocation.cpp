#include "meo/allocation.hpp"

#include "meo/errors.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace meo {

namespace {

void check(const UserLinkProblem& p) {
    if (!(p.channel_gain > 0) || !std::isfinite(p.channel_gain)) {
        throw DomainError("solve_user_link: channel gain must be positive");
    }
    if (!(p.noise_psd > 0) || !std::isfinite(p.noise_psd)) {
        throw DomainError("solve_user_link: noise PSD must be positive");
    }
    if (!(p.demand_bps >= 0)) throw DomainError("solve_user_link: demand must be non-negative");
}

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

}  // namespace

double optimal_snr(const UserLinkProblem& p) {
    check(p);
    const double slope = p.power_coeff * p.noise_psd / p.channel_gain;
    // cost per bps as a function of x = ln r; unimodal in r
    const auto cost = [&](double x) {
        const double r = std::exp(x);
        return (p.bw_coeff + slope * r) / log2_1p(r);
    };

    double lo = std::log(1e-6);
    double hi = std::log(1e6);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int expansion = 0;; ++expansion) {
        double a = lo;
        double b = hi;
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = cost(x1);
        double f2 = cost(x2);
        while (b - a > 1e-9 * std::max(1.0, std::abs(a) + std::abs(b))) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = cost(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = cost(x2);
            }
        }
        const double x = 0.5 * (a + b);
        const double margin = 1e-6 * (hi - lo);
        if (expansion < 3 && x - lo < margin) {
            lo -= std::log(10.0);
        } else if (expansion < 3 && hi - x < margin) {
            hi += std::log(10.0);
        } else {
            return std::exp(x);
        }
    }
}

LinkAllocation solve_user_link(const UserLinkProblem& p) {
    check(p);
    if (p.demand_bps == 0) return {};
    const double r = optimal_snr(p);
    const double bw = p.demand_bps / log2_1p(r);
    return {bw, bw * p.noise_psd * r / p.channel_gain};
}

LinkAllocation grid_oracle(const UserLinkProblem& p, int grid_points) {
    check(p);
    if (p.demand_bps == 0) return {};
    const double lo = std::log(p.demand_bps / 20.0);
    const double hi = std::log(p.demand_bps * 20.0);
    LinkAllocation best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_points; ++i) {
        const double bw = std::exp(lo + (hi - lo) * i / (grid_points - 1));
        const double power = bw * p.noise_psd * std::expm1(p.demand_bps / bw * std::numbers::ln2) / p.channel_gain;
        const LinkAllocation a{bw, power};
        const double c = a.cost(p);
        if (c < best_cost) {
            best_cost = c;
            best = a;
        }
    }
    return best;
}

RadioContext make_radio_context(const ScenarioConfig& config) {
    return {config.antenna, config.receiver.gain_linear(), noise_psd(config.receiver.temperature_k),
            config.power_params, config.min_elevation_deg};
}

double ClusterAllocation::total_bw() const { return std::accumulate(per_user_bw.begin(), per_user_bw.end(), 0.0); }

double ClusterAllocation::total_power() const {
    return std::accumulate(per_user_power.begin(), per_user_power.end(), 0.0);
}

ClusterAllocation solve_cluster(const EcefVector& sat, const Cluster& cluster, const std::vector<UserTerminal>& users,
                                int t, const RadioContext& radio) {
    ClusterAllocation out;
    if (!in_fov(sat, cluster.beam_center, radio.min_elevation_deg)) return out;

    const double pc = radio.power.power_coeff();
    const double bc = radio.power.bw_coeff();
    std::vector<double> bw;
    std::vector<double> power;
    bw.reserve(cluster.members.size());
    power.reserve(cluster.members.size());
    double cost = 0.0;
    for (auto k : cluster.members) {
        const UserTerminal& user = users[k];
        const double demand = user.demand[t];
        if (demand == 0) {
            bw.push_back(0.0);
            power.push_back(0.0);
            continue;
        }
        if (elevation_angle(user.position, sat) < 0) return out;
        const double gain = channel_gain(sat, cluster.beam_center, user.position, radio.antenna, radio.rx_gain);
        if (!(gain > 0)) return out;
        const UserLinkProblem p{demand, gain, radio.noise_psd, pc, bc};
        const LinkAllocation a = solve_user_link(p);
        bw.push_back(a.bw_hz);
        power.push_back(a.power_w);
        cost += a.cost(p);
    }
    out.per_user_bw = std::move(bw);
    out.per_user_power = std::move(power);
    out.cost = cost;
    out.feasible = true;
    return out;
}

}  // namespace meo
