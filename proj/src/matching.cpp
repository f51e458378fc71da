#include "meo/matching.hpp"

#include "meo/errors.hpp"
#include "meo/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace meo {

namespace {

constexpr double kCapSlack = 1e-12;

bool fits(double used, double add, double cap) { return used + add <= cap * (1.0 + kCapSlack); }

std::vector<std::size_t> options_by_cost(const MatchingInstance& inst, Eigen::Index m) {
    std::vector<std::size_t> opts;
    for (Eigen::Index n = 0; n < inst.satellites(); ++n) {
        if (std::isfinite(inst.cost(n, m))) opts.push_back(static_cast<std::size_t>(n));
    }
    std::stable_sort(opts.begin(), opts.end(), [&](std::size_t a, std::size_t b) {
        return inst.cost(static_cast<Eigen::Index>(a), m) < inst.cost(static_cast<Eigen::Index>(b), m);
    });
    return opts;
}

}  // namespace

MatchingInstance MatchingInstance::with_caps(Eigen::Index satellites, Eigen::Index clusters, double bw_cap,
                                             double power_cap) {
    MatchingInstance inst;
    inst.cost = Eigen::MatrixXd::Constant(satellites, clusters, std::numeric_limits<double>::infinity());
    inst.bw_load = Eigen::MatrixXd::Zero(satellites, clusters);
    inst.power_load = Eigen::MatrixXd::Zero(satellites, clusters);
    inst.bw_cap = Eigen::VectorXd::Constant(satellites, bw_cap);
    inst.power_cap = Eigen::VectorXd::Constant(satellites, power_cap);
    return inst;
}

MatchingPlan make_plan(std::vector<std::optional<std::size_t>> assignment, const MatchingInstance& inst) {
    MatchingPlan plan;
    plan.assignment = std::move(assignment);
    for (std::size_t m = 0; m < plan.assignment.size(); ++m) {
        if (!plan.assignment[m]) continue;
        ++plan.served_count;
        plan.total_cost += inst.cost(static_cast<Eigen::Index>(*plan.assignment[m]), static_cast<Eigen::Index>(m));
    }
    return plan;
}

bool is_feasible(const MatchingPlan& plan, const MatchingInstance& inst) {
    if (plan.assignment.size() != static_cast<std::size_t>(inst.clusters())) return false;
    Eigen::VectorXd bw = Eigen::VectorXd::Zero(inst.satellites());
    Eigen::VectorXd power = Eigen::VectorXd::Zero(inst.satellites());
    for (std::size_t m = 0; m < plan.assignment.size(); ++m) {
        if (!plan.assignment[m]) continue;
        const auto n = static_cast<Eigen::Index>(*plan.assignment[m]);
        const auto col = static_cast<Eigen::Index>(m);
        if (n >= inst.satellites() || !std::isfinite(inst.cost(n, col))) return false;
        bw[n] += inst.bw_load(n, col);
        power[n] += inst.power_load(n, col);
    }
    for (Eigen::Index n = 0; n < inst.satellites(); ++n) {
        if (!fits(bw[n], 0.0, inst.bw_cap[n]) || !fits(power[n], 0.0, inst.power_cap[n])) return false;
    }
    return true;
}

bool lexicographically_better(const MatchingPlan& a, const MatchingPlan& b) {
    return a.served_count > b.served_count || (a.served_count == b.served_count && a.total_cost < b.total_cost);
}

double enumeration_size(const MatchingInstance& inst) {
    double size = 1.0;
    for (Eigen::Index m = 0; m < inst.clusters(); ++m) {
        size *= 1.0 + static_cast<double>((inst.cost.col(m).array().isFinite()).count());
    }
    return size;
}

// ---------------------------------------------------------------------------
// Exact

namespace {

class BranchAndBound {
public:
    explicit BranchAndBound(const MatchingInstance& inst) : inst_(inst) {
        for (Eigen::Index m = 0; m < inst.clusters(); ++m) {
            auto opts = options_by_cost(inst, m);
            if (!opts.empty()) items_.push_back({static_cast<std::size_t>(m), std::move(opts)});
        }
        // expensive clusters first: their choice constrains the bound the most
        std::stable_sort(items_.begin(), items_.end(), [&](const Item& a, const Item& b) {
            return best_cost(a) > best_cost(b);
        });
        suffix_best_cost_.assign(items_.size() + 1, 0.0);
        for (std::size_t i = items_.size(); i-- > 0;) suffix_best_cost_[i] = suffix_best_cost_[i + 1] + best_cost(items_[i]);
        bw_used_ = Eigen::VectorXd::Zero(inst.satellites());
        power_used_ = Eigen::VectorXd::Zero(inst.satellites());
        current_.assign(static_cast<std::size_t>(inst.clusters()), std::nullopt);
    }

    MatchingPlan solve() {
        best_ = make_plan(current_, inst_);  // serve nothing
        search(0, 0, 0.0);
        return make_plan(best_.assignment, inst_);
    }

private:
    struct Item {
        std::size_t cluster;
        std::vector<std::size_t> options;  // ascending cost
    };

    double best_cost(const Item& item) const {
        return inst_.cost(static_cast<Eigen::Index>(item.options.front()), static_cast<Eigen::Index>(item.cluster));
    }

    void search(std::size_t depth, std::size_t served, double cost) {
        if (depth == items_.size()) {
            if (served > best_.served_count || (served == best_.served_count && cost < best_.total_cost)) {
                best_.assignment = current_;
                best_.served_count = served;
                best_.total_cost = cost;
            }
            return;
        }
        const std::size_t remaining = items_.size() - depth;
        if (served + remaining < best_.served_count) return;
        if (served + remaining == best_.served_count) {
            // only equal-service completions remain: they must serve every
            // remaining cluster, costing at least their cheapest options
            const double bound = cost + suffix_best_cost_[depth];
            if (bound >= best_.total_cost) return;
        }

        const Item& item = items_[depth];
        const auto m = static_cast<Eigen::Index>(item.cluster);
        for (std::size_t n : item.options) {
            const auto row = static_cast<Eigen::Index>(n);
            const double b = inst_.bw_load(row, m);
            const double p = inst_.power_load(row, m);
            if (!fits(bw_used_[row], b, inst_.bw_cap[row]) || !fits(power_used_[row], p, inst_.power_cap[row])) {
                continue;
            }
            bw_used_[row] += b;
            power_used_[row] += p;
            current_[item.cluster] = n;
            search(depth + 1, served + 1, cost + inst_.cost(row, m));
            current_[item.cluster].reset();
            bw_used_[row] -= b;
            power_used_[row] -= p;
        }
        search(depth + 1, served, cost);
    }

    const MatchingInstance& inst_;
    std::vector<Item> items_;
    std::vector<double> suffix_best_cost_;
    Eigen::VectorXd bw_used_;
    Eigen::VectorXd power_used_;
    std::vector<std::optional<std::size_t>> current_;
    MatchingPlan best_;
};

}  // namespace

MatchingPlan solve_matching_exact(const MatchingInstance& inst, double limit) {
    const double size = enumeration_size(inst);
    if (size > limit) {
        throw SizeError("solve_matching_exact: search space of " + std::to_string(size) +
                        " assignments exceeds the limit; use the relaxed solver");
    }
    return BranchAndBound(inst).solve();
}

// ---------------------------------------------------------------------------
// Relaxation

MatchingPlan solve_matching_relaxed(const MatchingInstance& inst) {
    const Eigen::Index sats = inst.satellites();
    const Eigen::Index clusters = inst.clusters();

    struct Column {
        Eigen::Index sat;
        Eigen::Index cluster;
    };
    std::vector<Column> columns;
    double reward = 1.0;
    for (Eigen::Index m = 0; m < clusters; ++m) {
        double worst = 0.0;
        for (Eigen::Index n = 0; n < sats; ++n) {
            if (!std::isfinite(inst.cost(n, m))) continue;
            columns.push_back({n, m});
            worst = std::max(worst, inst.cost(n, m));
        }
        reward += worst;
    }

    std::vector<std::optional<std::size_t>> assignment(static_cast<std::size_t>(clusters));
    if (columns.empty()) return make_plan(std::move(assignment), inst);

    // max sum (reward - cost) x  s.t. one satellite per cluster, capacities
    // normalized to 1. Any served cluster outweighs every cost difference.
    const auto vars = static_cast<Eigen::Index>(columns.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(clusters + 2 * sats, vars);
    Eigen::VectorXd b(clusters + 2 * sats);
    Eigen::VectorXd c(vars);
    b.head(clusters).setOnes();
    b.tail(2 * sats).setOnes();
    for (Eigen::Index j = 0; j < vars; ++j) {
        const auto [n, m] = columns[static_cast<std::size_t>(j)];
        a(m, j) = 1.0;
        a(clusters + n, j) = inst.bw_load(n, m) / inst.bw_cap[n];
        a(clusters + sats + n, j) = inst.power_load(n, m) / inst.power_cap[n];
        c[j] = reward - inst.cost(n, m);
    }
    const LpResult lp = solve_lp_max(a, b, c);

    Eigen::MatrixXd frac = Eigen::MatrixXd::Zero(sats, clusters);
    for (Eigen::Index j = 0; j < vars; ++j) {
        frac(columns[static_cast<std::size_t>(j)].sat, columns[static_cast<std::size_t>(j)].cluster) = lp.x[j];
    }

    // projection
    std::vector<Eigen::Index> preferred(static_cast<std::size_t>(clusters), -1);
    std::vector<double> weight(static_cast<std::size_t>(clusters), 0.0);
    for (Eigen::Index m = 0; m < clusters; ++m) {
        for (Eigen::Index n = 0; n < sats; ++n) {
            if (!std::isfinite(inst.cost(n, m))) continue;
            const auto i = static_cast<std::size_t>(m);
            if (frac(n, m) > weight[i] + 1e-12 ||
                (preferred[i] >= 0 && std::abs(frac(n, m) - weight[i]) <= 1e-12 &&
                 inst.cost(n, m) < inst.cost(preferred[i], m))) {
                weight[i] = frac(n, m);
                preferred[i] = n;
            }
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(clusters));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return weight[static_cast<std::size_t>(x)] > weight[static_cast<std::size_t>(y)];
    });

    Eigen::VectorXd bw_used = Eigen::VectorXd::Zero(sats);
    Eigen::VectorXd power_used = Eigen::VectorXd::Zero(sats);
    const auto try_place = [&](Eigen::Index n, Eigen::Index m) {
        if (!fits(bw_used[n], inst.bw_load(n, m), inst.bw_cap[n]) ||
            !fits(power_used[n], inst.power_load(n, m), inst.power_cap[n])) {
            return false;
        }
        bw_used[n] += inst.bw_load(n, m);
        power_used[n] += inst.power_load(n, m);
        assignment[static_cast<std::size_t>(m)] = static_cast<std::size_t>(n);
        return true;
    };

    std::vector<Eigen::Index> leftover;
    for (Eigen::Index m : order) {
        const auto i = static_cast<std::size_t>(m);
        if (preferred[i] >= 0 && weight[i] > 1e-9 && try_place(preferred[i], m)) continue;
        leftover.push_back(m);
    }
    // repair
    const auto unplace = [&](Eigen::Index n, Eigen::Index m) {
        bw_used[n] -= inst.bw_load(n, m);
        power_used[n] -= inst.power_load(n, m);
        assignment[static_cast<std::size_t>(m)].reset();
    };
    // make room on n for m by moving one served cluster to another satellite
    const auto try_shift = [&](Eigen::Index n, Eigen::Index m) {
        for (Eigen::Index other = 0; other < clusters; ++other) {
            if (assignment[static_cast<std::size_t>(other)] != static_cast<std::size_t>(n)) continue;
            unplace(n, other);
            if (fits(bw_used[n], inst.bw_load(n, m), inst.bw_cap[n]) &&
                fits(power_used[n], inst.power_load(n, m), inst.power_cap[n])) {
                for (std::size_t alt : options_by_cost(inst, other)) {
                    if (static_cast<Eigen::Index>(alt) != n && try_place(static_cast<Eigen::Index>(alt), other)) {
                        try_place(n, m);
                        return true;
                    }
                }
            }
            try_place(n, other);
        }
        return false;
    };
    for (Eigen::Index m : leftover) {
        const auto opts = options_by_cost(inst, m);
        bool placed = false;
        for (std::size_t n : opts) {
            if ((placed = try_place(static_cast<Eigen::Index>(n), m))) break;
        }
        for (std::size_t n : opts) {
            if (placed) break;
            placed = try_shift(static_cast<Eigen::Index>(n), m);
        }
    }
    return make_plan(std::move(assignment), inst);
}

// ---------------------------------------------------------------------------
// Nearest satellite baseline

MatchingPlan assign_nearest_meo(const std::vector<SurfacePoint>& beam_centers,
                                const std::vector<EcefVector>& satellite_positions, double min_elevation_deg,
                                const MatchingInstance& inst, const Eigen::VectorXd& cluster_demand) {
    const Eigen::Index clusters = inst.clusters();
    std::vector<std::optional<std::size_t>> assignment(static_cast<std::size_t>(clusters));
    for (Eigen::Index m = 0; m < clusters; ++m) {
        const SurfacePoint& center = beam_centers[static_cast<std::size_t>(m)];
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < satellite_positions.size(); ++n) {
            if (!in_fov(satellite_positions[n], center, min_elevation_deg)) continue;
            if (!std::isfinite(inst.cost(static_cast<Eigen::Index>(n), m))) continue;
            const double d = slant_range(satellite_positions[n], center);
            if (d < nearest) {
                nearest = d;
                assignment[static_cast<std::size_t>(m)] = n;
            }
        }
    }

    for (Eigen::Index n = 0; n < inst.satellites(); ++n) {
        const auto sat = static_cast<std::size_t>(n);
        for (;;) {
            double bw = 0.0;
            double power = 0.0;
            Eigen::Index heaviest = -1;
            for (Eigen::Index m = 0; m < clusters; ++m) {
                if (assignment[static_cast<std::size_t>(m)] != sat) continue;
                bw += inst.bw_load(n, m);
                power += inst.power_load(n, m);
                if (heaviest < 0 || cluster_demand[m] > cluster_demand[heaviest]) heaviest = m;
            }
            if (heaviest < 0 || (fits(bw, 0.0, inst.bw_cap[n]) && fits(power, 0.0, inst.power_cap[n]))) break;
            assignment[static_cast<std::size_t>(heaviest)].reset();
        }
    }
    return make_plan(std::move(assignment), inst);
}

// ---------------------------------------------------------------------------
// JSON dump

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& mat) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < mat.cols(); ++j) {
            if (std::isfinite(mat(i, j))) {
                row.push_back(mat(i, j));
            } else {
                row.push_back(nullptr);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, const char* field) {
    if (!rows.is_array()) throw ConfigError(field, "expected an array of rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = n > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    Eigen::MatrixXd mat(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
            throw ConfigError(field, "rows must have equal length");
        }
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto& v = row[static_cast<std::size_t>(j)];
            mat(i, j) = v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
        }
    }
    return mat;
}

}  // namespace

nlohmann::json to_json(const MatchingInstance& inst) {
    return {{"cost_w", matrix_to_json(inst.cost)},
            {"bw_load_hz", matrix_to_json(inst.bw_load)},
            {"power_load_w", matrix_to_json(inst.power_load)},
            {"bw_cap_hz", std::vector<double>(inst.bw_cap.begin(), inst.bw_cap.end())},
            {"power_cap_w", std::vector<double>(inst.power_cap.begin(), inst.power_cap.end())}};
}

MatchingInstance matching_instance_from_json(const nlohmann::json& doc) {
    MatchingInstance inst;
    inst.cost = matrix_from_json(doc.at("cost_w"), "cost_w");
    inst.bw_load = matrix_from_json(doc.at("bw_load_hz"), "bw_load_hz");
    inst.power_load = matrix_from_json(doc.at("power_load_w"), "power_load_w");
    const auto bw = doc.at("bw_cap_hz").get<std::vector<double>>();
    const auto pw = doc.at("power_cap_w").get<std::vector<double>>();
    inst.bw_cap = Eigen::Map<const Eigen::VectorXd>(bw.data(), static_cast<Eigen::Index>(bw.size()));
    inst.power_cap = Eigen::Map<const Eigen::VectorXd>(pw.data(), static_cast<Eigen::Index>(pw.size()));
    return inst;
}

}  // namespace meo
