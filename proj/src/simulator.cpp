#include "meo/simulator.hpp"

#include "meo/errors.hpp"
#include "meo/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace meo {

std::string to_string(Algorithm a) { return a == Algorithm::Proposed ? "proposed" : "greedy"; }

std::string to_string(MatchingSolver s) {
    switch (s) {
        case MatchingSolver::Exact: return "exact";
        case MatchingSolver::Relaxed: return "relaxed";
        case MatchingSolver::Auto: break;
    }
    return "auto";
}

double RunResult::power_per_satisfied_user() const {
    double power = 0.0;
    double satisfied = 0.0;
    for (const auto& m : metrics) {
        power += m.total_power_w;
        satisfied += static_cast<double>(m.satisfied_users);
    }
    return satisfied > 0 ? power / satisfied : 0.0;
}

double RunResult::mean_satisfied_rate() const {
    if (metrics.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& m : metrics) sum += m.satisfied_rate;
    return sum / static_cast<double>(metrics.size());
}

double RunResult::mean_total_power() const {
    if (metrics.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& m : metrics) sum += m.total_power_w;
    return sum / static_cast<double>(metrics.size());
}

std::size_t count_handovers(const MatchingPlan& prev, const MatchingPlan& cur) {
    const std::size_t common = std::min(prev.assignment.size(), cur.assignment.size());
    std::size_t changes = 0;
    for (std::size_t m = 0; m < common; ++m) {
        if (prev.assignment[m] != cur.assignment[m]) ++changes;
    }
    return changes;
}

TimeslotMetrics slot_metrics(int t, const MatchingPlan& plan, const std::vector<ClusterAllocation>& allocations,
                             const std::vector<Cluster>& clusters, const std::vector<UserTerminal>& users,
                             std::size_t num_satellites, const PowerParams& power) {
    TimeslotMetrics out;
    out.t = t;
    out.per_meo_load.assign(num_satellites, {});
    std::vector<double> user_bw(users.size(), 0.0);
    std::vector<double> user_power(users.size(), 0.0);
    std::vector<bool> served(users.size(), false);

    for (std::size_t m = 0; m < clusters.size(); ++m) {
        if (!plan.assignment[m]) continue;
        const std::size_t n = *plan.assignment[m];
        const ClusterAllocation& a = allocations[n * clusters.size() + m];
        ++out.served_clusters;
        for (std::size_t i = 0; i < clusters[m].members.size(); ++i) {
            const std::size_t k = clusters[m].members[i];
            user_bw[k] = a.per_user_bw[i];
            user_power[k] = a.per_user_power[i];
            served[k] = true;
            out.per_meo_load[n].bw_hz += a.per_user_bw[i];
            out.per_meo_load[n].power_w += a.per_user_power[i];
        }
    }
    for (std::size_t k = 0; k < users.size(); ++k) {
        // zero demand is met without service
        if (served[k] || users[k].demand[t] == 0) ++out.satisfied_users;
    }
    out.satisfied_rate = users.empty() ? 1.0 : static_cast<double>(out.satisfied_users) / static_cast<double>(users.size());
    out.total_power_w = total_power(user_bw, user_power, power);
    return out;
}

namespace {

ClusterSummary summarize(const std::vector<Cluster>& clusters) {
    ClusterSummary s;
    s.count = clusters.size();
    if (clusters.empty()) return s;
    s.min_size = clusters.front().members.size();
    std::size_t total = 0;
    for (const auto& c : clusters) {
        s.min_size = std::min(s.min_size, c.members.size());
        s.max_size = std::max(s.max_size, c.members.size());
        total += c.members.size();
        if (c.oversize) ++s.oversize;
    }
    s.avg_size = static_cast<double>(total) / static_cast<double>(clusters.size());
    return s;
}

std::pair<int, int> slot_range(const ScenarioConfig& config, const RunOptions& options) {
    const int first = options.first_slot;
    const int count = options.slot_count < 0 ? config.num_timeslots - first : options.slot_count;
    if (first < 0 || first >= config.num_timeslots) throw ConfigError("first_slot", "outside the timeslot window");
    if (count < 1 || first + count > config.num_timeslots) {
        throw ConfigError("slot_count", "range exceeds the timeslot window");
    }
    return {first, count};
}

std::vector<EcefVector> satellite_positions(const ScenarioConfig& config, int t) {
    std::vector<EcefVector> out;
    out.reserve(config.satellites.size());
    for (const auto& orbit : config.satellites) out.push_back(satellite_position(orbit, config.slot_time(t)));
    return out;
}

std::vector<ClusterAllocation> solve_all_pairs(const std::vector<EcefVector>& sats,
                                               const std::vector<Cluster>& clusters,
                                               const std::vector<UserTerminal>& users, int t,
                                               const RadioContext& radio, unsigned threads) {
    std::vector<ClusterAllocation> out(sats.size() * clusters.size());
    parallel_for(
        out.size(),
        [&](std::size_t i) {
            const std::size_t n = i / clusters.size();
            const std::size_t m = i % clusters.size();
            out[i] = solve_cluster(sats[n], clusters[m], users, t, radio);
        },
        threads);
    return out;
}

MatchingInstance build_instance(const std::vector<ClusterAllocation>& allocations, std::size_t num_satellites,
                                std::size_t num_clusters, const PowerParams& power) {
    MatchingInstance inst = MatchingInstance::with_caps(static_cast<Eigen::Index>(num_satellites),
                                                        static_cast<Eigen::Index>(num_clusters),
                                                        power.bandwidth_total_hz, power.rf_power_max_w);
    for (std::size_t n = 0; n < num_satellites; ++n) {
        for (std::size_t m = 0; m < num_clusters; ++m) {
            const ClusterAllocation& a = allocations[n * num_clusters + m];
            if (!a.feasible) continue;
            const auto row = static_cast<Eigen::Index>(n);
            const auto col = static_cast<Eigen::Index>(m);
            inst.cost(row, col) = a.cost;
            inst.bw_load(row, col) = a.total_bw();
            inst.power_load(row, col) = a.total_power();
        }
    }
    return inst;
}

MatchingPlan solve_matching(const MatchingInstance& inst, MatchingSolver solver) {
    switch (solver) {
        case MatchingSolver::Exact: return solve_matching_exact(inst);
        case MatchingSolver::Relaxed: return solve_matching_relaxed(inst);
        case MatchingSolver::Auto: break;
    }
    return enumeration_size(inst) <= kExactEnumerationLimit ? solve_matching_exact(inst)
                                                             : solve_matching_relaxed(inst);
}

SatelliteOrbit lowest_orbit(const ScenarioConfig& config) {
    return *std::min_element(config.satellites.begin(), config.satellites.end(),
                             [](const SatelliteOrbit& a, const SatelliteOrbit& b) { return a.altitude_km < b.altitude_km; });
}

RunResult start_result(Algorithm algorithm, const ScenarioConfig& config, const std::vector<UserTerminal>& users) {
    RunResult r;
    r.algorithm = algorithm;
    r.seed = config.rng_seed;
    r.num_users = users.size();
    r.theta_beam_deg = half_power_beamwidth(config.antenna.aperture_ratio);
    r.config_echo = to_json(config);
    return r;
}

}  // namespace

RunResult run_proposed(const ScenarioConfig& config, const std::vector<UserTerminal>& users,
                       const RunOptions& options) {
    validate(config);
    const auto [first, count] = slot_range(config, options);
    RunResult result = start_result(Algorithm::Proposed, config, users);

    const Eigen::MatrixXd profiles = required_bw_profiles(users, config, options.threads);
    const AdjacencyMatrix adjacency =
        adjacency_matrix(positions_of(users), lowest_orbit(config), deg2rad(result.theta_beam_deg), options.threads);
    result.clusters = cluster_users_proposed(adjacency, profiles, config.beam_bw_cap_hz);
    place_beam_centers(result.clusters, users, config.eta_bps);
    for (const auto& c : result.clusters) result.cluster_efficiency.push_back(efficiency_factor(profiles, c.members));
    result.cluster_summary = summarize(result.clusters);

    const RadioContext radio = make_radio_context(config);
    const std::size_t sats = config.satellites.size();
    for (int t = first; t < first + count; ++t) {
        const auto allocations =
            solve_all_pairs(satellite_positions(config, t), result.clusters, users, t, radio, options.threads);
        MatchingInstance inst = build_instance(allocations, sats, result.clusters.size(), config.power_params);
        MatchingPlan plan = solve_matching(inst, options.solver);

        TimeslotMetrics m = slot_metrics(t, plan, allocations, result.clusters, users, sats, config.power_params);
        if (!result.plans.empty()) m.handover_count = count_handovers(result.plans.back(), plan);
        result.metrics.push_back(std::move(m));
        result.plans.push_back(std::move(plan));
        if (options.keep_instances) result.instances.push_back(std::move(inst));
    }
    return result;
}

RunResult run_proposed(const ScenarioConfig& config, const RunOptions& options) {
    return run_proposed(config, generate_users(config), options);
}

RunResult run_greedy(const ScenarioConfig& config, const std::vector<UserTerminal>& users, const RunOptions& options) {
    validate(config);
    const auto [first, count] = slot_range(config, options);
    RunResult result = start_result(Algorithm::Greedy, config, users);

    const double max_distance = cluster_max_distance(result.theta_beam_deg, lowest_orbit(config).altitude_km);
    result.clusters = cluster_users_baseline(positions_of(users), max_distance);
    place_beam_centers(result.clusters, users, config.eta_bps);
    result.cluster_summary = summarize(result.clusters);

    std::vector<SurfacePoint> centers;
    for (const auto& c : result.clusters) centers.push_back(c.beam_center);

    const RadioContext radio = make_radio_context(config);
    const std::size_t sats = config.satellites.size();
    for (int t = first; t < first + count; ++t) {
        const auto positions = satellite_positions(config, t);
        const auto allocations = solve_all_pairs(positions, result.clusters, users, t, radio, options.threads);
        MatchingInstance inst = build_instance(allocations, sats, result.clusters.size(), config.power_params);

        Eigen::VectorXd demand(static_cast<Eigen::Index>(result.clusters.size()));
        for (std::size_t m = 0; m < result.clusters.size(); ++m) {
            double d = 0.0;
            for (auto k : result.clusters[m].members) d += users[k].demand[t];
            demand[static_cast<Eigen::Index>(m)] = d;
        }
        MatchingPlan plan = assign_nearest_meo(centers, positions, config.min_elevation_deg, inst, demand);

        TimeslotMetrics m = slot_metrics(t, plan, allocations, result.clusters, users, sats, config.power_params);
        if (!result.plans.empty()) m.handover_count = count_handovers(result.plans.back(), plan);
        result.metrics.push_back(std::move(m));
        result.plans.push_back(std::move(plan));
        if (options.keep_instances) result.instances.push_back(std::move(inst));
    }
    return result;
}

RunResult run_greedy(const ScenarioConfig& config, const RunOptions& options) {
    return run_greedy(config, generate_users(config), options);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

template <typename T>
T parse_field(std::string_view field, std::size_t line) {
    T value{};
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw IoError("metrics CSV line " + std::to_string(line) + ": cannot parse '" + std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string metrics_csv_header(std::size_t num_satellites) {
    std::string h = "t,total_power_w,satisfied_users,satisfied_rate,served_clusters,handover_count";
    for (std::size_t n = 0; n < num_satellites; ++n) {
        h += ",sat" + std::to_string(n) + "_bw_hz,sat" + std::to_string(n) + "_power_w";
    }
    return h;
}

std::string metrics_csv(const std::vector<TimeslotMetrics>& metrics, std::size_t num_satellites) {
    std::string out = metrics_csv_header(num_satellites) + "\n";
    for (const auto& m : metrics) {
        out += std::to_string(m.t) + "," + format_double(m.total_power_w) + "," + std::to_string(m.satisfied_users) +
               "," + format_double(m.satisfied_rate) + "," + std::to_string(m.served_clusters) + "," +
               std::to_string(m.handover_count);
        for (const auto& load : m.per_meo_load) out += "," + format_double(load.bw_hz) + "," + format_double(load.power_w);
        out += "\n";
    }
    return out;
}

std::vector<TimeslotMetrics> parse_metrics_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("metrics CSV is empty");
    const auto header = split(line);
    if (header.size() < 6 || (header.size() - 6) % 2 != 0) throw IoError("metrics CSV has an unexpected header");
    const std::size_t sats = (header.size() - 6) / 2;
    if (line != metrics_csv_header(sats)) throw IoError("metrics CSV has an unexpected header");

    std::vector<TimeslotMetrics> out;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != header.size()) throw IoError("metrics CSV line " + std::to_string(lineno) + ": wrong field count");
        TimeslotMetrics m;
        m.t = parse_field<int>(f[0], lineno);
        m.total_power_w = parse_field<double>(f[1], lineno);
        m.satisfied_users = parse_field<std::size_t>(f[2], lineno);
        m.satisfied_rate = parse_field<double>(f[3], lineno);
        m.served_clusters = parse_field<std::size_t>(f[4], lineno);
        m.handover_count = parse_field<std::size_t>(f[5], lineno);
        for (std::size_t n = 0; n < sats; ++n) {
            m.per_meo_load.push_back({parse_field<double>(f[6 + 2 * n], lineno), parse_field<double>(f[7 + 2 * n], lineno)});
        }
        out.push_back(std::move(m));
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON and files

nlohmann::json run_summary(const RunResult& r) {
    std::size_t handovers = 0;
    double served = 0.0;
    for (const auto& m : r.metrics) {
        handovers += m.handover_count;
        served += static_cast<double>(m.served_clusters);
    }
    return {
        {"algorithm", to_string(r.algorithm)},
        {"seed", r.seed},
        {"num_users", r.num_users},
        {"num_slots", r.metrics.size()},
        {"first_slot", r.metrics.empty() ? 0 : r.metrics.front().t},
        {"theta_beam_deg", r.theta_beam_deg},
        {"clusters",
         {{"count", r.cluster_summary.count},
          {"min_size", r.cluster_summary.min_size},
          {"max_size", r.cluster_summary.max_size},
          {"avg_size", r.cluster_summary.avg_size},
          {"oversize", r.cluster_summary.oversize}}},
        {"averages",
         {{"total_power_w", r.mean_total_power()},
          {"satisfied_rate", r.mean_satisfied_rate()},
          {"power_per_satisfied_user_w", r.power_per_satisfied_user()},
          {"served_clusters", r.metrics.empty() ? 0.0 : served / static_cast<double>(r.metrics.size())},
          {"total_handovers", handovers}}},
        {"config", r.config_echo},
    };
}

nlohmann::json clusters_json(const RunResult& r) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t m = 0; m < r.clusters.size(); ++m) {
        const Cluster& c = r.clusters[m];
        nlohmann::json e = {{"id", m},
                            {"members", c.members},
                            {"beam_center", {{"lat_deg", c.beam_center.lat_deg}, {"lon_deg", c.beam_center.lon_deg}}},
                            {"oversize", c.oversize}};
        e["efficiency_factor"] = m < r.cluster_efficiency.size() ? nlohmann::json(r.cluster_efficiency[m]) : nullptr;
        arr.push_back(std::move(e));
    }
    return arr;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_results(const RunResult& result, const std::filesystem::path& out_dir, const OutputOptions& out) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const std::string prefix = to_string(result.algorithm);
    const std::size_t sats = result.metrics.empty() ? 0 : result.metrics.front().per_meo_load.size();
    write_text(out_dir / (prefix + "_metrics.csv"), metrics_csv(result.metrics, sats));
    write_text(out_dir / (prefix + "_summary.json"), run_summary(result).dump(2) + "\n");
    if (out.dump_clusters) write_text(out_dir / (prefix + "_clusters.json"), clusters_json(result).dump(2) + "\n");
    if (out.dump_matching) {
        const auto dir = out_dir / (prefix + "_matching");
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
        for (std::size_t i = 0; i < result.instances.size() && i < result.plans.size(); ++i) {
            nlohmann::json doc = to_json(result.instances[i]);
            nlohmann::json assignment = nlohmann::json::array();
            for (const auto& a : result.plans[i].assignment) assignment.push_back(a ? nlohmann::json(*a) : nullptr);
            doc["assignment"] = std::move(assignment);
            doc["t"] = result.metrics[i].t;
            char name[32];
            std::snprintf(name, sizeof name, "slot_%04d.json", result.metrics[i].t);
            write_text(dir / name, doc.dump(2) + "\n");
        }
    }
}

}  // namespace meo
