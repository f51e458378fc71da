#pragma once

// End-to-end runs of the three-stage pipeline and of the greedy baseline,
// per-timeslot metrics, and result persistence.

#include "meo/allocation.hpp"
#include "meo/clustering.hpp"
#include "meo/matching.hpp"
#include "meo/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace meo {

enum class Algorithm { Proposed, Greedy };
enum class MatchingSolver { Auto, Exact, Relaxed };

std::string to_string(Algorithm a);
std::string to_string(MatchingSolver s);

struct SatelliteLoad {
    double bw_hz{0};
    double power_w{0};

    friend bool operator==(const SatelliteLoad&, const SatelliteLoad&) = default;
};

struct TimeslotMetrics {
    int t{0};
    double total_power_w{0};
    std::size_t satisfied_users{0};
    double satisfied_rate{0};
    std::size_t served_clusters{0};
    std::size_t handover_count{0};
    std::vector<SatelliteLoad> per_meo_load;

    friend bool operator==(const TimeslotMetrics&, const TimeslotMetrics&) = default;
};

struct ClusterSummary {
    std::size_t count{0};
    std::size_t min_size{0};
    std::size_t max_size{0};
    double avg_size{0};
    std::size_t oversize{0};
};

struct RunOptions {
    MatchingSolver solver{MatchingSolver::Auto};
    int first_slot{0};
    int slot_count{-1};  // -1: through the end of the window
    unsigned threads{0};
    bool keep_instances{false};
};

struct RunResult {
    Algorithm algorithm{Algorithm::Proposed};
    std::uint64_t seed{0};
    std::size_t num_users{0};
    double theta_beam_deg{0};
    std::vector<TimeslotMetrics> metrics;
    std::vector<Cluster> clusters;
    std::vector<double> cluster_efficiency;  // proposed runs only
    ClusterSummary cluster_summary;
    std::vector<MatchingPlan> plans;                // one per simulated slot
    std::vector<MatchingInstance> instances;        // when RunOptions::keep_instances
    nlohmann::json config_echo;

    /// Time-summed power over time-summed satisfied users; 0 when nobody is satisfied.
    double power_per_satisfied_user() const;
    double mean_satisfied_rate() const;
    double mean_total_power() const;
};

/// Clusters once over the whole window, then solves allocation and matching
/// for every simulated slot.
RunResult run_proposed(const ScenarioConfig& config, const std::vector<UserTerminal>& users,
                       const RunOptions& options = {});
RunResult run_proposed(const ScenarioConfig& config, const RunOptions& options = {});

/// Distance-based clustering, nearest-satellite assignment with overload
/// shedding, then per-cluster allocation.
RunResult run_greedy(const ScenarioConfig& config, const std::vector<UserTerminal>& users,
                     const RunOptions& options = {});
RunResult run_greedy(const ScenarioConfig& config, const RunOptions& options = {});

/// Clusters whose serving satellite differs between two plans; gaining or
/// losing service counts as a change.
std::size_t count_handovers(const MatchingPlan& prev, const MatchingPlan& cur);

/// Per-slot metrics from a plan and the allocations behind it.
/// `allocations` is indexed [satellite * clusters + cluster].
TimeslotMetrics slot_metrics(int t, const MatchingPlan& plan, const std::vector<ClusterAllocation>& allocations,
                             const std::vector<Cluster>& clusters, const std::vector<UserTerminal>& users,
                             std::size_t num_satellites, const PowerParams& power);

std::string metrics_csv_header(std::size_t num_satellites);
std::string metrics_csv(const std::vector<TimeslotMetrics>& metrics, std::size_t num_satellites);
std::vector<TimeslotMetrics> parse_metrics_csv(const std::string& text);

nlohmann::json run_summary(const RunResult& result);
nlohmann::json clusters_json(const RunResult& result);

struct OutputOptions {
    bool dump_clusters{false};
    bool dump_matching{false};  // needs RunOptions::keep_instances
};

/// Writes metrics.csv and summary.json (plus optional dumps) under `out_dir`,
/// prefixed with the algorithm name. Throws IoError on failure.
void write_results(const RunResult& result, const std::filesystem::path& out_dir, const OutputOptions& out = {});

}  // namespace meo
