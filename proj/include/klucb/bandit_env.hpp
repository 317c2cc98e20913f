#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "klucb/exp_family.hpp"
#include "klucb/rng.hpp"

namespace klucb {

// Initial state distribution for a chain.
struct InitDist {
    enum class Kind { Stationary, Uniform, Point };
    Kind kind = Kind::Stationary;
    std::size_t state = 0;  // used by Point only

    static InitDist stationary() { return {Kind::Stationary, 0}; }
    static InitDist uniform() { return {Kind::Uniform, 0}; }
    static InitDist point(std::size_t s) { return {Kind::Point, s}; }
};

struct StepOutcome {
    long round = 0;                             // environment time after the step
    std::vector<std::pair<int, double>> plays;  // (arm, reward), ascending by arm
};

// K rested Markovian arms.  Each arm holds its own chain frozen while the arm
// is not played; a play advances that chain one transition and pays f of the
// state it lands in.  Every step plays exactly M distinct arms.
class BanditEnv {
  public:
    BanditEnv(const FamilySpec& fam, const std::vector<double>& thetas, int M, InitDist init,
              std::uint64_t seed, bool keep_reward_log = false);

    int arms() const { return static_cast<int>(thetas_.size()); }
    int plays_per_round() const { return M_; }
    long t() const { return t_; }
    double cum_reward() const { return total_reward_; }
    const std::vector<long>& counts() const { return counts_; }
    const std::vector<double>& thetas() const { return thetas_; }
    int state_of(int arm) const { return states_[arm]; }

    // Running mean of the rewards this arm has paid; NeverPlayed before the
    // first play.
    double sample_mean(int arm) const;

    StepOutcome step(const std::vector<int>& chosen);

    const std::vector<StepOutcome>& reward_log() const { return log_; }

  private:
    std::vector<double> thetas_;
    int M_;
    Rng rng_;
    bool keep_log_;
    long t_ = 0;
    double total_reward_ = 0.0;
    std::vector<double> f_;
    std::vector<int> states_;
    std::vector<long> counts_;
    std::vector<double> sums_;
    // cdf_[arm][state] is the cumulative row of that arm's conditioned kernel.
    std::vector<std::vector<std::vector<double>>> cdf_;
    std::vector<StepOutcome> log_;
    std::vector<int> scratch_;
};

}  // namespace klucb
