// meo-rrm: command-line driver for the MEO radio-resource-management simulator.
//
//   meo-rrm run --scenario data/desk.json --algorithm both --out results/
//   meo-rrm beamwidth --ratio 5 --ratio 10 --altitude 8062
//   meo-rrm match --instance results/proposed_matching/slot_0000.json --solver exact

#include "meo/errors.hpp"
#include "meo/simulator.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

enum Exit { kOk = 0, kConfig = 1, kSolver = 2, kIo = 3 };

struct RunArgs {
    std::string scenario;
    std::string algorithm{"both"};
    std::string out_dir{"results"};
    std::optional<std::uint64_t> seed;
    int first_slot{0};
    int slots{-1};
    std::string solver{"auto"};
    unsigned threads{0};
    bool dump_clusters{false};
    bool dump_matching{false};
};

struct MatchArgs {
    std::string instance;
    std::string solver{"exact"};
};

struct BeamArgs {
    std::vector<double> ratios{5, 10, 15, 20};
    double altitude_km{8062};
};

int verbosity = 0;

void log(int level, const std::string& msg) {
    if (verbosity >= level) std::cerr << msg << '\n';
}

meo::MatchingSolver parse_solver(const std::string& s) {
    if (s == "exact") return meo::MatchingSolver::Exact;
    if (s == "relaxed") return meo::MatchingSolver::Relaxed;
    return meo::MatchingSolver::Auto;
}

void report(const meo::RunResult& r) {
    std::printf("%-8s clusters=%zu (size %zu..%zu, avg %.2f, oversize %zu)  satisfied=%.4f  power=%.2f W  "
                "power/satisfied user=%.4f W\n",
                meo::to_string(r.algorithm).c_str(), r.cluster_summary.count, r.cluster_summary.min_size,
                r.cluster_summary.max_size, r.cluster_summary.avg_size, r.cluster_summary.oversize,
                r.mean_satisfied_rate(), r.mean_total_power(), r.power_per_satisfied_user());
}

int cmd_run(const RunArgs& a) {
    meo::ScenarioConfig config = meo::load_scenario(a.scenario);
    if (a.seed) config.rng_seed = *a.seed;
    meo::validate(config);

    meo::RunOptions opts;
    opts.solver = parse_solver(a.solver);
    opts.first_slot = a.first_slot;
    opts.slot_count = a.slots;
    opts.threads = a.threads;
    opts.keep_instances = a.dump_matching;
    const meo::OutputOptions out{a.dump_clusters, a.dump_matching};

    const auto users = meo::generate_users(config);
    log(1, "scenario: " + std::to_string(config.satellites.size()) + " satellites, " +
               std::to_string(users.size()) + " users, " + std::to_string(config.num_timeslots) + " slots, seed " +
               std::to_string(config.rng_seed));

    const auto run = [&](meo::Algorithm algo) {
        const auto start = std::chrono::steady_clock::now();
        const meo::RunResult r = algo == meo::Algorithm::Proposed ? meo::run_proposed(config, users, opts)
                                                                  : meo::run_greedy(config, users, opts);
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        log(1, meo::to_string(algo) + " finished in " + std::to_string(took.count()) + " s");
        meo::write_results(r, a.out_dir, out);
        report(r);
        if (verbosity >= 2) {
            for (const auto& m : r.metrics) {
                std::fprintf(stderr, "  t=%d power=%.3f satisfied=%zu served=%zu handovers=%zu\n", m.t,
                             m.total_power_w, m.satisfied_users, m.served_clusters, m.handover_count);
            }
        }
    };
    if (a.algorithm != "greedy") run(meo::Algorithm::Proposed);
    if (a.algorithm != "proposed") run(meo::Algorithm::Greedy);
    return kOk;
}

int cmd_beamwidth(const BeamArgs& a) {
    std::printf("%8s %12s %14s\n", "ratio", "beam_deg", "cluster_km");
    for (double ratio : a.ratios) {
        const double theta = meo::half_power_beamwidth(ratio);
        std::printf("%8.2f %12.4f %14.3f\n", ratio, theta, meo::cluster_max_distance(theta, a.altitude_km));
    }
    return kOk;
}

int cmd_match(const MatchArgs& a) {
    std::ifstream in(a.instance);
    if (!in) throw meo::IoError("cannot open instance file " + a.instance);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw meo::ConfigError("", a.instance + ": " + e.what());
    }
    const meo::MatchingInstance inst = meo::matching_instance_from_json(doc);
    meo::MatchingPlan plan;
    switch (parse_solver(a.solver)) {
        case meo::MatchingSolver::Exact: plan = meo::solve_matching_exact(inst); break;
        case meo::MatchingSolver::Relaxed: plan = meo::solve_matching_relaxed(inst); break;
        case meo::MatchingSolver::Auto:
            plan = meo::enumeration_size(inst) <= meo::kExactEnumerationLimit ? meo::solve_matching_exact(inst)
                                                                               : meo::solve_matching_relaxed(inst);
            break;
    }
    nlohmann::json assignment = nlohmann::json::array();
    for (const auto& s : plan.assignment) assignment.push_back(s ? nlohmann::json(*s) : nullptr);
    std::cout << nlohmann::json{{"assignment", assignment},
                                {"served_count", plan.served_count},
                                {"total_cost_w", plan.total_cost},
                                {"feasible", meo::is_feasible(plan, inst)}}
                     .dump(2)
              << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MEO constellation radio-resource-management simulator"};
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", verbosity, "Increase verbosity (repeatable)");

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write metrics");
    run_cmd->add_option("-s,--scenario", run.scenario, "Scenario JSON file")->required();
    run_cmd->add_option("-a,--algorithm", run.algorithm, "proposed | greedy | both")
        ->check(CLI::IsMember({"proposed", "greedy", "both"}))
        ->capture_default_str();
    run_cmd->add_option("-o,--out", run.out_dir, "Output directory")->capture_default_str();
    run_cmd->add_option("--seed", run.seed, "Override the scenario RNG seed");
    run_cmd->add_option("--first-slot", run.first_slot, "First simulated timeslot")->capture_default_str();
    run_cmd->add_option("--slots", run.slots, "Number of simulated timeslots (-1: to the end)")->capture_default_str();
    run_cmd->add_option("-m,--matching", run.solver, "auto | exact | relaxed")
        ->check(CLI::IsMember({"auto", "exact", "relaxed"}))
        ->capture_default_str();
    run_cmd->add_option("-j,--threads", run.threads, "Worker threads (0: hardware concurrency)");
    run_cmd->add_flag("--dump-clusters", run.dump_clusters, "Write <algorithm>_clusters.json");
    run_cmd->add_flag("--dump-matching", run.dump_matching, "Write one matching instance per slot");

    BeamArgs beam;
    auto* beam_cmd = app.add_subcommand("beamwidth", "Print half-power beamwidth and cluster diameter");
    beam_cmd->add_option("-r,--ratio", beam.ratios, "Aperture radius over wavelength")->capture_default_str();
    beam_cmd->add_option("--altitude", beam.altitude_km, "Orbit altitude in km")->capture_default_str();

    MatchArgs match;
    auto* match_cmd = app.add_subcommand("match", "Solve a dumped matching instance");
    match_cmd->add_option("-i,--instance", match.instance, "Instance JSON file")->required();
    match_cmd->add_option("-m,--matching", match.solver, "auto | exact | relaxed")
        ->check(CLI::IsMember({"auto", "exact", "relaxed"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*beam_cmd) return cmd_beamwidth(beam);
        if (*match_cmd) return cmd_match(match);
    } catch (const meo::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const meo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const meo::CoverageError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const meo::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const meo::SizeError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const meo::CapacityError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    }
    return kOk;
}
