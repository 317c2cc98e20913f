#include "klucb/bandit_env.hpp"

#include <algorithm>

namespace klucb {

namespace {

std::vector<double> cdf_of(const std::vector<double>& weights) {
    std::vector<double> cdf(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cdf[i] = acc;
    }
    return cdf;
}

}  // namespace

BanditEnv::BanditEnv(const FamilySpec& fam, const std::vector<double>& thetas, int M,
                     InitDist init, std::uint64_t seed, bool keep_reward_log)
    : thetas_(thetas), M_(M), rng_(seed), keep_log_(keep_reward_log), f_(fam.f) {
    const int K = arms();
    if (K < 1) throw OutOfRange("need at least one arm");
    if (M < 1 || M > K) throw BadPlayCount("plays per round must lie in [1, K]");
    if (init.kind == InitDist::Kind::Point && init.state >= fam.size())
        throw OutOfRange("point initialization names a state outside the chain");
    counts_.assign(K, 0);
    sums_.assign(K, 0.0);
    states_.resize(K);
    cdf_.resize(K);
    for (int a = 0; a < K; ++a) {
        const Member m = member(fam, thetas_[a]);
        cdf_[a].resize(fam.size());
        for (std::size_t x = 0; x < fam.size(); ++x) {
            std::vector<double> row(fam.size());
            for (std::size_t y = 0; y < fam.size(); ++y) row[y] = m.P_theta(x, y);
            cdf_[a][x] = cdf_of(row);
        }
        switch (init.kind) {
            case InitDist::Kind::Stationary:
                states_[a] = static_cast<int>(rng_.from_cdf(cdf_of(m.pi)));
                break;
            case InitDist::Kind::Uniform: {
                const auto draw = static_cast<std::size_t>(rng_.uniform01() *
                                                           static_cast<double>(fam.size()));
                states_[a] = static_cast<int>(std::min(draw, fam.size() - 1));
                break;
            }
            case InitDist::Kind::Point:
                states_[a] = static_cast<int>(init.state);
                break;
        }
    }
}

double BanditEnv::sample_mean(int arm) const {
    if (arm < 0 || arm >= arms()) throw OutOfRange("arm id out of range");
    if (counts_[arm] == 0) throw NeverPlayed("arm " + std::to_string(arm) + " has no plays yet");
    return sums_[arm] / static_cast<double>(counts_[arm]);
}

StepOutcome BanditEnv::step(const std::vector<int>& chosen) {
    if (static_cast<int>(chosen.size()) != M_)
        throw WrongSetSize("expected " + std::to_string(M_) + " arms, got " +
                           std::to_string(chosen.size()));
    scratch_ = chosen;
    std::sort(scratch_.begin(), scratch_.end());
    for (std::size_t i = 0; i < scratch_.size(); ++i) {
        if (scratch_[i] < 0 || scratch_[i] >= arms()) throw OutOfRange("arm id out of range");
        if (i > 0 && scratch_[i] == scratch_[i - 1])
            throw DuplicateArm("arm " + std::to_string(scratch_[i]) + " chosen twice");
    }
    StepOutcome out;
    out.plays.reserve(scratch_.size());
    // Plays are resolved in ascending arm order so that a round consumes
    // randomness independently of the caller's set ordering.
    for (int a : scratch_) {
        const int next = static_cast<int>(rng_.from_cdf(cdf_[a][states_[a]]));
        const double reward = f_[next];
        states_[a] = next;
        counts_[a] += 1;
        sums_[a] += reward;
        total_reward_ += reward;
        out.plays.emplace_back(a, reward);
    }
    t_ += 1;
    out.round = t_;
    if (keep_log_) log_.push_back(out);
    return out;
}

}  // namespace klucb
