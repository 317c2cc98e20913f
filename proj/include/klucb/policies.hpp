#pragma once

#include <limits>
#include <string>
#include <vector>

#include "klucb/bandit_env.hpp"
#include "klucb/exp_family.hpp"

namespace klucb {

// Book-keeping a policy maintains between rounds.  counts and means must stay
// consistent with the environment; observe() keeps them so.
struct PolicyState {
    int K = 0;
    int M = 0;
    double delta = 0.0;  // candidate threshold fraction, in (0, 1/K)
    double beta = 1.0;   // exploration scale for the ucb index
    long t = 0;          // rounds completed
    long index_evals = 0;
    std::vector<long> counts;
    std::vector<double> sums;
    std::vector<double> means;
    // Smallest candidate set seen by a round-robin step; the design guarantees
    // it never drops below M.
    long min_candidate_size = std::numeric_limits<long>::max();
};

// delta <= 0 selects the default 1/(2K).
PolicyState make_policy_state(int K, int M, double delta = 0.0, double beta = 1.0);

// Exploration budget log t + 3 log(max(log t, 1)).
double g(long t);

double ucb_index(double mean, long n, long t, double beta);

// Arms to pull in initialization round t (1-based, t in [1, K]); after K
// rounds every arm has exactly M plays.
std::vector<int> init_schedule(int K, int M, long t);

// Fold one environment step into the policy statistics.
void observe(PolicyState& st, const StepOutcome& outcome);

// One round of the round-robin confidence-bound rule: keep the M empirical
// leaders among well-sampled arms unless the round's challenger carries an
// optimistic index above the weakest leader.  Exactly one index evaluation.
std::vector<int> rr_klucb_step(PolicyState& st, FamilyEvaluator& ev, long t);

// Classic rule: evaluate every arm's index, play the top M.
std::vector<int> klucb_full_step(PolicyState& st, FamilyEvaluator& ev, long t);

// Same two control flows with the ucb index.
std::vector<int> rr_ucb_step(PolicyState& st, long t);
std::vector<int> ucb_full_step(PolicyState& st, long t);

enum class PolicyKind { RrKlucb, KlucbFull, UcbFull, RrUcb };

// Canonical names: "rr-klucb", "klucb", "ucb", "rr-ucb".
PolicyKind policy_kind_from_name(const std::string& name);
std::string policy_name(PolicyKind kind);

std::vector<int> step_policy(PolicyKind kind, PolicyState& st, FamilyEvaluator& ev, long t);

}  // namespace klucb
