#include "klucb/policies.hpp"

#include <algorithm>
#include <cmath>

namespace klucb {

namespace {

// ceil(x) that forgives float noise when x is within 1e-9 of an integer, so
// thresholds like delta*t with rational delta never round the wrong way.
long ceil_count(double x) {
    const double r = std::nearbyint(x);
    if (std::abs(x - r) < 1e-9) return static_cast<long>(r);
    return static_cast<long>(std::ceil(x));
}

// The M best arm ids from the candidates, mean descending, lowest id on ties.
std::vector<int> top_by_mean(const std::vector<int>& candidates, const std::vector<double>& score,
                             int M) {
    std::vector<int> picked;
    picked.reserve(M);
    std::vector<char> used(score.size(), 0);
    for (int round = 0; round < M; ++round) {
        int best = -1;
        for (int a : candidates) {
            if (used[a]) continue;
            if (best < 0 || score[a] > score[best]) best = a;
        }
        used[best] = 1;
        picked.push_back(best);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

template <typename ChallengerIndex>
std::vector<int> rr_step(PolicyState& st, long t, ChallengerIndex&& challenger_index) {
    if (t < st.K) throw OutOfRange("round-robin steps start at t = K");
    const long threshold = ceil_count(st.delta * static_cast<double>(t));
    std::vector<int> candidates;
    candidates.reserve(st.K);
    for (int a = 0; a < st.K; ++a)
        if (st.counts[a] >= threshold) candidates.push_back(a);
    if (static_cast<int>(candidates.size()) < st.M)
        throw InsufficientArms("only " + std::to_string(candidates.size()) +
                               " well-sampled arms for M = " + std::to_string(st.M));
    st.min_candidate_size =
        std::min(st.min_candidate_size, static_cast<long>(candidates.size()));
    std::vector<int> leaders = top_by_mean(candidates, st.means, st.M);
    const int b = static_cast<int>(t % st.K);
    const double u = challenger_index(b);
    st.index_evals += 1;
    if (std::binary_search(leaders.begin(), leaders.end(), b)) return leaders;
    int weakest = leaders[0];
    for (int a : leaders)
        if (st.means[a] < st.means[weakest]) weakest = a;
    if (st.means[weakest] >= u) return leaders;
    for (int& a : leaders)
        if (a == weakest) a = b;
    std::sort(leaders.begin(), leaders.end());
    return leaders;
}

template <typename ArmIndex>
std::vector<int> full_step(PolicyState& st, long t, ArmIndex&& arm_index) {
    if (t < st.K) throw OutOfRange("policy steps start at t = K");
    std::vector<double> idx(st.K);
    std::vector<int> all(st.K);
    for (int a = 0; a < st.K; ++a) {
        idx[a] = arm_index(a);
        all[a] = a;
    }
    st.index_evals += st.K;
    return top_by_mean(all, idx, st.M);
}

}  // namespace

PolicyState make_policy_state(int K, int M, double delta, double beta) {
    if (K < 1 || M < 1 || M > K) throw BadPlayCount("need 1 <= M <= K");
    PolicyState st;
    st.K = K;
    st.M = M;
    st.delta = delta > 0.0 ? delta : 1.0 / (2.0 * K);
    if (!(st.delta > 0.0 && st.delta < 1.0 / K))
        throw OutOfRange("delta must lie in (0, 1/K)");
    st.beta = beta;
    st.counts.assign(K, 0);
    st.sums.assign(K, 0.0);
    st.means.assign(K, 0.0);
    return st;
}

double g(long t) {
    if (t < 1) throw OutOfRange("g is defined for t >= 1");
    const double lt = std::log(static_cast<double>(t));
    return lt + 3.0 * std::log(std::max(lt, 1.0));
}

double ucb_index(double mean, long n, long t, double beta) {
    if (n < 1) throw OutOfRange("need at least one observation");
    if (t < 2) throw OutOfRange("ucb index needs t >= 2");
    return mean + beta * std::sqrt(2.0 * std::log(static_cast<double>(t)) /
                                   static_cast<double>(n));
}

std::vector<int> init_schedule(int K, int M, long t) {
    if (K < 1 || M < 1 || M > K) throw BadPlayCount("need 1 <= M <= K");
    if (t < 1 || t > K) throw OutOfRange("initialization rounds run from 1 to K");
    std::vector<int> arms(M);
    for (int j = 0; j < M; ++j) arms[j] = static_cast<int>((t - 1 + j) % K);
    std::sort(arms.begin(), arms.end());
    return arms;
}

void observe(PolicyState& st, const StepOutcome& outcome) {
    if (static_cast<int>(outcome.plays.size()) != st.M)
        throw WrongSetSize("outcome has " + std::to_string(outcome.plays.size()) +
                           " plays, policy expects " + std::to_string(st.M));
    for (const auto& [arm, reward] : outcome.plays) {
        if (arm < 0 || arm >= st.K) throw OutOfRange("arm id out of range");
        st.counts[arm] += 1;
        st.sums[arm] += reward;
        st.means[arm] = st.sums[arm] / static_cast<double>(st.counts[arm]);
    }
    st.t += 1;
}

std::vector<int> rr_klucb_step(PolicyState& st, FamilyEvaluator& ev, long t) {
    return rr_step(st, t, [&](int b) {
        return ev.klucb_index(st.means[b], st.counts[b], g(t));
    });
}

std::vector<int> klucb_full_step(PolicyState& st, FamilyEvaluator& ev, long t) {
    return full_step(st, t, [&](int a) {
        return ev.klucb_index(st.means[a], st.counts[a], g(t));
    });
}

std::vector<int> rr_ucb_step(PolicyState& st, long t) {
    return rr_step(st, t, [&](int b) {
        return ucb_index(st.means[b], st.counts[b], t, st.beta);
    });
}

std::vector<int> ucb_full_step(PolicyState& st, long t) {
    return full_step(st, t, [&](int a) {
        return ucb_index(st.means[a], st.counts[a], t, st.beta);
    });
}

PolicyKind policy_kind_from_name(const std::string& name) {
    if (name == "rr-klucb") return PolicyKind::RrKlucb;
    if (name == "klucb") return PolicyKind::KlucbFull;
    if (name == "ucb") return PolicyKind::UcbFull;
    if (name == "rr-ucb") return PolicyKind::RrUcb;
    throw ConfigError("unknown policy \"" + name +
                      "\"; expected rr-klucb, klucb, ucb or rr-ucb");
}

std::string policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::RrKlucb: return "rr-klucb";
        case PolicyKind::KlucbFull: return "klucb";
        case PolicyKind::UcbFull: return "ucb";
        case PolicyKind::RrUcb: return "rr-ucb";
    }
    throw OutOfRange("bad policy kind");
}

std::vector<int> step_policy(PolicyKind kind, PolicyState& st, FamilyEvaluator& ev, long t) {
    switch (kind) {
        case PolicyKind::RrKlucb: return rr_klucb_step(st, ev, t);
        case PolicyKind::KlucbFull: return klucb_full_step(st, ev, t);
        case PolicyKind::UcbFull: return ucb_full_step(st, t);
        case PolicyKind::RrUcb: return rr_ucb_step(st, t);
    }
    throw OutOfRange("bad policy kind");
}

}  // namespace klucb
