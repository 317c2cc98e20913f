#pragma once

#include <string>
#include <vector>

#include "klucb/bandit_env.hpp"
#include "klucb/exp_family.hpp"

namespace klucb {

// The instance seen through its stationary means, sorted nonincreasing.
// Arms 1..N (1-based) are strictly better than the M-th mean, arms N+1..L are
// tied with it within tie_tol, arms L+1..K are strictly worse.
struct InstanceProfile {
    int K = 0;
    int M = 0;
    std::vector<double> mus;     // sorted nonincreasing
    std::vector<double> thetas;  // same order as mus
    std::vector<int> order;      // original arm id in each sorted slot
    int N = 0;
    int L = 0;
    double top_sum = 0.0;  // sum of the M largest means
    double tie_tol = 1e-12;
};

InstanceProfile profile(const FamilySpec& fam, const std::vector<double>& thetas, int M,
                        double tie_tol = 1e-12);

// What the estimator needs from one finished run.
struct RunResult {
    long T = 0;
    double final_reward = 0.0;
    std::vector<long> final_counts;
};

struct RegretEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long replications = 0;
    bool single_run = false;  // stderr is 0 because there was nothing to average
};

// Mean over runs of T * top_sum - S_T.
RegretEstimate regret_estimate(const InstanceProfile& prof, const std::vector<RunResult>& runs,
                               long T);

// Count-weighted surrogate: gaps above the M-th mean weighted by missed
// plays, gaps below weighted by plays taken.  counts are per original arm id.
double proxy_regret(const InstanceProfile& prof, const std::vector<long>& counts, long T);

// Expected return time to the initial state of a chain at P_theta started
// from init, by the Kac identity.  Stationary start gives exactly |S|.
double return_time(const FamilySpec& fam, double theta, const InitDist& init);

// Uniform bound on |regret - proxy regret|: sum of per-arm return times
// times the total reward magnitude.
double proxy_gap_bound(const FamilySpec& fam, const std::vector<double>& thetas,
                       const InitDist& init);

// Asymptotic constant: sum over strictly suboptimal arms of gap divided by
// the divergence rate from that arm's parameter to the M-th best parameter.
double lower_bound_constant(const InstanceProfile& prof, const FamilySpec& fam);

}  // namespace klucb
