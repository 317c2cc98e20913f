#pragma once

// Independent reference computations for the tests.  Everything here is
// written from the defining formulas, not from the library code paths it is
// used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "klucb/exp_family.hpp"

namespace oracle {

inline double binary_kl(double p, double q) {
    auto term = [](double a, double b) { return a <= 0.0 ? 0.0 : a * std::log(a / b); };
    return term(p, q) + term(1.0 - p, 1.0 - q);
}

// sup { nu in [mean, 1) : binary_kl(mean, nu) <= budget } by bisection.
inline double bernoulli_index(double mean, double budget) {
    double lo = mean, hi = 1.0 - 1e-15;
    if (binary_kl(mean, hi) <= budget) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (binary_kl(mean, mid) <= budget) lo = mid;
        else hi = mid;
    }
    return lo;
}

// Brute-force scan of the mean interval: the largest grid point that still
// satisfies the divergence budget.
inline double grid_index(klucb::FamilyEvaluator& ev, double mean, double budget, long points) {
    const double hi = ev.space().hi;
    const double m = std::clamp(mean, ev.space().lo, hi);
    double best = m;
    for (long i = 0; i <= points; ++i) {
        const double nu = m + (hi - m) * static_cast<double>(i) / static_cast<double>(points);
        if (ev.kl_rate_mean(m, nu) <= budget) best = nu;
        else break;  // the map is nondecreasing in nu above the mean
    }
    return best;
}

// Same scan, but straddles the crossing: reports the midpoint of the last
// passing and first failing grid points, halving the discretization error.
inline double grid_index_mid(klucb::FamilyEvaluator& ev, double mean, double budget, long points) {
    const double hi = ev.space().hi;
    const double m = std::clamp(mean, ev.space().lo, hi);
    double last_pass = m;
    for (long i = 0; i <= points; ++i) {
        const double nu = m + (hi - m) * static_cast<double>(i) / static_cast<double>(points);
        if (ev.kl_rate_mean(m, nu) <= budget) {
            last_pass = nu;
        } else {
            return 0.5 * (last_pass + nu);
        }
    }
    return hi;
}

// Stationary law of the untilted two-state chain.
inline std::pair<double, double> two_state_stationary(double p, double q) {
    const double denom = p + (1.0 - q);
    return {(1.0 - q) / denom, p / denom};
}

// Doeblin property straight from its definition: every ordered pair in A is
// joined by a nonempty path inside A, and every state outside A enters A in
// one step.
inline bool doeblin_definition(const klucb::FamilySpec& fam, const std::vector<std::size_t>& A) {
    const std::size_t n = fam.size();
    std::vector<char> in_a(n, 0);
    for (std::size_t x : A) in_a[x] = 1;
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            reach[x][y] = in_a[x] && in_a[y] && fam.P(x, y) > 0.0 ? 1 : 0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                if (reach[x][k] && reach[k][y]) reach[x][y] = 1;
    for (std::size_t x : A)
        for (std::size_t y : A)
            if (!reach[x][y]) return false;
    for (std::size_t x = 0; x < n; ++x) {
        if (in_a[x]) continue;
        bool enters = false;
        for (std::size_t y : A) enters = enters || fam.P(x, y) > 0.0;
        if (!enters) return false;
    }
    return true;
}

// One round of the round-robin confidence rule transcribed line by line from
// its statement; arms are 0-based, the round counter t is the number of
// completed rounds.
template <typename IndexFn>
std::vector<int> reference_rr_round(int K, int M, double delta, const std::vector<long>& counts,
                                    const std::vector<double>& means, long t,
                                    IndexFn&& challenger_index) {
    const double dt = delta * static_cast<double>(t);
    long need = static_cast<long>(std::ceil(dt));
    if (std::abs(dt - std::nearbyint(dt)) < 1e-9) need = static_cast<long>(std::nearbyint(dt));

    std::vector<int> w;
    for (int a = 0; a < K; ++a)
        if (counts[a] >= need) w.push_back(a);

    std::vector<int> leaders;
    {
        std::vector<int> pool = w;
        for (int pick = 0; pick < M; ++pick) {
            int best = pool.front();
            for (int a : pool)
                if (means[a] > means[best]) best = a;
            leaders.push_back(best);
            pool.erase(std::find(pool.begin(), pool.end(), best));
        }
    }
    std::sort(leaders.begin(), leaders.end());

    const int b = static_cast<int>(t % K);
    if (std::find(leaders.begin(), leaders.end(), b) != leaders.end()) return leaders;
    const double u = challenger_index(b);
    int weakest = leaders.front();
    for (int a : leaders)
        if (means[a] < means[weakest]) weakest = a;
    if (means[weakest] >= u) return leaders;
    std::replace(leaders.begin(), leaders.end(), weakest, b);
    std::sort(leaders.begin(), leaders.end());
    return leaders;
}

// Deterministic pseudo-random doubles for building test fixtures.
struct MiniRand {
    std::uint64_t state;
    explicit MiniRand(std::uint64_t seed) : state(seed) {}
    double next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
};

// Dense positive random transition matrix; always irreducible.
inline klucb::FamilySpec random_dense_family(std::size_t n, std::uint64_t seed) {
    MiniRand r(seed);
    klucb::Matrix P(n);
    for (std::size_t x = 0; x < n; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            P(x, y) = 0.1 + r.next();
            sum += P(x, y);
        }
        for (std::size_t y = 0; y < n; ++y) P(x, y) /= sum;
    }
    std::vector<double> f(n);
    for (std::size_t x = 0; x < n; ++x) f[x] = -1.0 + 2.0 * r.next();
    std::vector<std::string> states(n);
    for (std::size_t x = 0; x < n; ++x) states[x] = std::to_string(x);
    return klucb::build_family(std::move(states), std::move(P), std::move(f));
}

}  // namespace oracle
