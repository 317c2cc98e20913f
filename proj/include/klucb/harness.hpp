#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "klucb/bandit_env.hpp"
#include "klucb/exp_family.hpp"
#include "klucb/policies.hpp"
#include "klucb/regret.hpp"

namespace klucb {

struct PolicyChoice {
    PolicyKind kind = PolicyKind::RrKlucb;
    std::string name;
    double delta = 0.0;  // <= 0 means the config-level default
    double beta = 0.0;   // <= 0 means the config-level default
};

struct ExperimentConfig {
    FamilySpec family;
    std::vector<double> thetas;  // resolved; sampled ones are echoed in meta output
    bool thetas_sampled = false;
    int K = 0;
    int M = 1;
    long T = 0;
    std::vector<PolicyChoice> policies;
    double delta = 0.0;  // <= 0 selects 1/(2K)
    double beta = 1.0;
    long reps = 1;
    std::uint64_t master_seed = 0;
    std::vector<long> checkpoints;  // strictly increasing, last == T
    std::string output_dir;
    bool record_counts = false;
    InitDist init = InitDist::stationary();
};

// Field-checked parse; every complaint names the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

// n_points log-spaced rounds over [first, T], deduplicated, last == T.
std::vector<long> log_checkpoints(long first, long T, int n_points);

// Everything recorded about one (policy, replication) trajectory.  All fields
// except wall_ns_at are a pure function of (master_seed, policy, config).
struct RunRecord {
    std::vector<double> reward_at;           // S_t at each checkpoint
    std::vector<double> proxy_at;            // proxy regret at each checkpoint
    std::vector<long> evals_at;              // cumulative index evaluations
    std::vector<long long> wall_ns_at;       // elapsed wall clock
    std::vector<std::vector<long>> counts_at;  // per-checkpoint counts
    std::vector<long> final_counts;
    double final_reward = 0.0;
    long min_candidate_size = 0;
};

struct ExperimentResult {
    ExperimentConfig cfg;
    InstanceProfile prof;
    std::vector<std::vector<RunRecord>> records;  // [policy][replication]
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 1);

struct SummaryRow {
    std::string policy;
    long t = 0;
    double regret_mean = 0.0;
    double regret_stderr = 0.0;
    double proxy_mean = 0.0;
    double index_evals = 0.0;
    double wall_time_ns = 0.0;
    double regret_over_logt = 0.0;
    double lower_bound_const = 0.0;
};

std::vector<SummaryRow> summarize(const ExperimentResult& res);

// Exact header, rows sorted by (policy, t), 17 significant digits, LF ends.
std::string emit_csv(const std::vector<SummaryRow>& rows);

std::vector<SummaryRow> parse_summary_csv(const std::string& text);

// summary.csv plus meta.json (config echo with resolved thetas) under dir.
void write_outputs(const ExperimentResult& res, const std::vector<SummaryRow>& rows,
                   const std::string& dir);

}  // namespace klucb
