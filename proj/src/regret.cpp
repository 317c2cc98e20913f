#include "klucb/regret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace klucb {

InstanceProfile profile(const FamilySpec& fam, const std::vector<double>& thetas, int M,
                        double tie_tol) {
    const int K = static_cast<int>(thetas.size());
    if (K < 1 || M < 1 || M > K) throw BadPlayCount("need 1 <= M <= K");
    if (tie_tol < 0.0) throw OutOfRange("tie tolerance must be nonnegative");
    InstanceProfile prof;
    prof.K = K;
    prof.M = M;
    prof.tie_tol = tie_tol;
    std::vector<double> mus(K);
    for (int a = 0; a < K; ++a) mus[a] = stationary_mean(fam, thetas[a]);
    prof.order.resize(K);
    std::iota(prof.order.begin(), prof.order.end(), 0);
    std::stable_sort(prof.order.begin(), prof.order.end(),
                     [&](int a, int b) { return mus[a] > mus[b]; });
    prof.mus.resize(K);
    prof.thetas.resize(K);
    for (int slot = 0; slot < K; ++slot) {
        prof.mus[slot] = mus[prof.order[slot]];
        prof.thetas[slot] = thetas[prof.order[slot]];
    }
    const double mu_m = prof.mus[M - 1];
    prof.N = 0;
    while (prof.N < K && prof.mus[prof.N] > mu_m + tie_tol) ++prof.N;
    prof.L = K;
    while (prof.L > M && prof.mus[prof.L - 1] < mu_m - tie_tol) --prof.L;
    prof.top_sum = std::accumulate(prof.mus.begin(), prof.mus.begin() + M, 0.0);
    return prof;
}

RegretEstimate regret_estimate(const InstanceProfile& prof, const std::vector<RunResult>& runs,
                               long T) {
    if (runs.empty()) throw OutOfRange("need at least one run");
    std::vector<double> regrets;
    regrets.reserve(runs.size());
    for (const RunResult& run : runs) {
        if (run.T != T)
            throw MismatchedHorizon("run has T = " + std::to_string(run.T) + ", expected " +
                                    std::to_string(T));
        regrets.push_back(static_cast<double>(T) * prof.top_sum - run.final_reward);
    }
    RegretEstimate est;
    est.replications = static_cast<long>(runs.size());
    est.mean = std::accumulate(regrets.begin(), regrets.end(), 0.0) /
               static_cast<double>(regrets.size());
    if (regrets.size() == 1) {
        est.single_run = true;
        return est;
    }
    double ss = 0.0;
    for (double r : regrets) ss += (r - est.mean) * (r - est.mean);
    est.stderr_ = std::sqrt(ss / static_cast<double>(regrets.size() - 1)) /
                  std::sqrt(static_cast<double>(regrets.size()));
    return est;
}

double proxy_regret(const InstanceProfile& prof, const std::vector<long>& counts, long T) {
    if (static_cast<int>(counts.size()) != prof.K)
        throw CountMismatch("got " + std::to_string(counts.size()) + " counts for " +
                            std::to_string(prof.K) + " arms");
    long total_plays = 0;
    for (long c : counts) total_plays += c;
    if (total_plays != static_cast<long>(prof.M) * T)
        throw CountMismatch("counts sum to " + std::to_string(total_plays) + ", expected " +
                            std::to_string(static_cast<long>(prof.M) * T));
    const double mu_m = prof.mus[prof.M - 1];
    double total = 0.0;
    for (int slot = 0; slot < prof.N; ++slot) {
        const long played = counts[prof.order[slot]];
        total += (prof.mus[slot] - mu_m) * static_cast<double>(T - played);
    }
    for (int slot = prof.L; slot < prof.K; ++slot) {
        const long played = counts[prof.order[slot]];
        total += (mu_m - prof.mus[slot]) * static_cast<double>(played);
    }
    return total;
}

double return_time(const FamilySpec& fam, double theta, const InitDist& init) {
    const Member m = member(fam, theta);
    const std::size_t n = fam.size();
    std::vector<double> start(n, 0.0);
    switch (init.kind) {
        case InitDist::Kind::Stationary: start = m.pi; break;
        case InitDist::Kind::Uniform: start.assign(n, 1.0 / static_cast<double>(n)); break;
        case InitDist::Kind::Point:
            if (init.state >= n) throw OutOfRange("point initialization names a state outside the chain");
            start[init.state] = 1.0;
            break;
    }
    // Law of X_1 = one transition from the start law, then Kac's identity.
    double r = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
        double q = 0.0;
        for (std::size_t x = 0; x < n; ++x) q += start[x] * m.P_theta(x, y);
        r += q / m.pi[y];
    }
    return r;
}

double proxy_gap_bound(const FamilySpec& fam, const std::vector<double>& thetas,
                       const InitDist& init) {
    double f_mass = 0.0;
    for (double fy : fam.f) f_mass += std::abs(fy);
    double total = 0.0;
    for (double theta : thetas) total += return_time(fam, theta, init);
    return total * f_mass;
}

double lower_bound_constant(const InstanceProfile& prof, const FamilySpec& fam) {
    if (prof.L >= prof.K) return 0.0;
    FamilyEvaluator ev(fam);
    const double mu_m = prof.mus[prof.M - 1];
    const double theta_m = prof.thetas[prof.M - 1];
    double total = 0.0;
    for (int slot = prof.L; slot < prof.K; ++slot) {
        const double rate = ev.kl_rate(prof.thetas[slot], theta_m);
        total += (mu_m - prof.mus[slot]) / rate;
    }
    return total;
}

}  // namespace klucb
