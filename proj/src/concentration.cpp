#include "klucb/concentration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace klucb {

namespace {

long ceil_guarded(double x) {
    const double r = std::nearbyint(x);
    if (std::abs(x - r) < 1e-9) return static_cast<long>(r);
    return static_cast<long>(std::ceil(x));
}

double ratio_constant(const std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double w : v) {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    return hi / lo;
}

std::vector<std::size_t> reward_minimizers(const FamilySpec& fam) {
    const double fmin = *std::min_element(fam.f.begin(), fam.f.end());
    std::vector<std::size_t> a;
    for (std::size_t x = 0; x < fam.size(); ++x)
        if (fam.f[x] == fmin) a.push_back(x);
    return a;
}

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

bool is_doeblin(const FamilySpec& fam, const std::vector<std::size_t>& A) {
    if (A.empty()) throw EmptySet("the target set is empty");
    const std::size_t n = fam.size();
    std::vector<char> in_a(n, 0);
    for (std::size_t x : A) {
        if (x >= n) throw OutOfRange("set member outside the state space");
        in_a[x] = 1;
    }
    std::vector<std::size_t> states;
    for (std::size_t x = 0; x < n; ++x)
        if (in_a[x]) states.push_back(x);

    // Condition 1: the induced sub-chain is irreducible (nonempty paths, so a
    // singleton needs its self loop).
    if (states.size() == 1) {
        if (!(fam.P(states[0], states[0]) > 0.0)) return false;
    } else {
        auto reaches_all = [&](bool transpose) {
            std::vector<char> seen(n, 0);
            std::vector<std::size_t> stack{states[0]};
            seen[states[0]] = 1;
            std::size_t found = 1;
            while (!stack.empty()) {
                const std::size_t x = stack.back();
                stack.pop_back();
                for (std::size_t y : states) {
                    const double w = transpose ? fam.P(y, x) : fam.P(x, y);
                    if (w > 0.0 && !seen[y]) {
                        seen[y] = 1;
                        ++found;
                        stack.push_back(y);
                    }
                }
            }
            return found == states.size();
        };
        if (!reaches_all(false) || !reaches_all(true)) return false;
    }

    // Condition 2: everything outside A can enter A in one step.
    for (std::size_t x = 0; x < n; ++x) {
        if (in_a[x]) continue;
        bool enters = false;
        for (std::size_t y : states)
            if (fam.P(x, y) > 0.0) {
                enters = true;
                break;
            }
        if (!enters) return false;
    }
    return true;
}

MartingaleCheck martingale_residual(const FamilySpec& fam, double theta) {
    const Member m = member(fam, theta);
    const std::size_t n = fam.size();
    MartingaleCheck check;
    check.theta = theta;
    for (std::size_t x = 0; x < n; ++x) {
        double lhs = 0.0;
        for (std::size_t y = 0; y < n; ++y)
            lhs += fam.P(x, y) * std::exp(theta * fam.f[y]) * m.v[y];
        check.residual = std::max(check.residual, std::abs(lhs - m.rho * m.v[x]));
    }
    return check;
}

double chernoff_constant(const FamilySpec& fam, double mu, double theta_cap) {
    const double theta_mu = mean_to_natural(fam, mu, theta_cap);
    return ratio_constant(member(fam, theta_mu).v);
}

double chernoff_bound(const FamilySpec& fam, double mu, long n, double theta_cap) {
    if (n < 1) throw OutOfRange("need n >= 1");
    FamilyEvaluator ev(fam, theta_cap);
    const double mu0 = ev.mean(0.0);
    if (mu < mu0 - 1e-12 || mu > ev.space().hi + 1e-12)
        throw OutOfMeanSpace("level " + std::to_string(mu) +
                             " is not between the base mean and the upper end");
    const double rate = ev.kl_rate_mean(mu, mu0);
    return chernoff_constant(fam, std::clamp(mu, ev.space().lo, ev.space().hi), theta_cap) *
           std::exp(-static_cast<double>(n) * rate);
}

double maximal_constant(const FamilySpec& fam, double theta_cap) {
    double c = 1.0;
    const long steps = static_cast<long>(std::ceil(theta_cap / 0.05));
    for (long i = 0; i <= steps; ++i) {
        const double theta = std::max(-theta_cap, -0.05 * static_cast<double>(i));
        c = std::max(c, ratio_constant(member(fam, theta).v));
    }
    return c;
}

double maximal_bound(const FamilySpec& fam, double eps, long n, double theta_cap) {
    if (!(eps > 1.0)) throw OutOfRange("the maximal bound needs eps > 1");
    if (n < 1) throw OutOfRange("need n >= 1");
    if (!is_doeblin(fam, reward_minimizers(fam)))
        throw NotDoeblin("the reward minimizers do not form a Doeblin set");
    const double c = maximal_constant(fam, theta_cap);
    const double ln_n = std::log(static_cast<double>(n));
    const double chunks = static_cast<double>(ceil_guarded(eps * ln_n));
    return c * std::exp(1.0) * chunks * std::exp(-eps);
}

BoundReport empirical_tail(const FamilySpec& fam, double theta0, TailEvent event, long n,
                           long reps, std::uint64_t seed, InitDist init, int workers) {
    if (n < 1 || reps < 1) throw OutOfRange("need n >= 1 and reps >= 1");
    const Member m0 = member(fam, theta0);
    const std::size_t ns = fam.size();
    std::vector<std::vector<double>> row_cdf(ns);
    for (std::size_t x = 0; x < ns; ++x) {
        std::vector<double> row(ns);
        for (std::size_t y = 0; y < ns; ++y) row[y] = m0.P_theta(x, y);
        row_cdf[x] = cdf_of(row);
    }
    const std::vector<double> init_cdf = cdf_of(m0.pi);
    if (init.kind == InitDist::Kind::Point && init.state >= ns)
        throw OutOfRange("point initialization names a state outside the chain");

    BoundReport report;
    report.n = n;
    report.level = event.level;
    report.replications = reps;

    // Reward-sum thresholds per prefix length; checking the union event then
    // costs one comparison per step.
    std::vector<double> sum_threshold;
    bool final_only = event.kind == TailEvent::Kind::Chernoff;
    if (event.kind == TailEvent::Kind::Chernoff) {
        report.event = "chernoff";
        report.constant = chernoff_constant(fam, event.level);
        report.bound_value = chernoff_bound(fam, event.level, n);
    } else {
        report.event = "maximal";
        report.constant = maximal_constant(fam);
        report.bound_value = maximal_bound(fam, event.level, n);
        FamilyEvaluator ev(fam);
        const double mu0 = ev.mean(0.0);
        const double floor_rate = ev.kl_rate(-ev.space().theta_cap, 0.0);
        sum_threshold.assign(static_cast<std::size_t>(n) + 1,
                             -std::numeric_limits<double>::infinity());
        for (long k = 1; k <= n; ++k) {
            const double need = event.level / static_cast<double>(k);
            if (floor_rate < need) continue;  // even the lowest mean cannot carry this weight
            double lo = -ev.space().theta_cap, hi = 0.0;
            // kl_rate(theta, 0) decreases in theta on [lo, 0]; find the largest
            // mean still meeting the level.
            for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (ev.kl_rate(mid, 0.0) >= need) lo = mid;
                else hi = mid;
            }
            const double mu_k = std::min(ev.mean(lo), mu0);
            sum_threshold[static_cast<std::size_t>(k)] = mu_k * static_cast<double>(k);
        }
    }

    const double level_sum = event.level * static_cast<double>(n);
    auto run_one = [&](long rep) -> bool {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(rep)));
        std::size_t x;
        switch (init.kind) {
            case InitDist::Kind::Stationary: x = rng.from_cdf(init_cdf); break;
            case InitDist::Kind::Uniform:
                x = std::min(static_cast<std::size_t>(rng.uniform01() *
                                                      static_cast<double>(ns)),
                             ns - 1);
                break;
            default: x = init.state; break;
        }
        double sum = 0.0;
        if (final_only) {
            for (long k = 1; k <= n; ++k) {
                x = rng.from_cdf(row_cdf[x]);
                sum += fam.f[x];
            }
            return sum >= level_sum;
        }
        for (long k = 1; k <= n; ++k) {
            x = rng.from_cdf(row_cdf[x]);
            sum += fam.f[x];
            if (sum <= sum_threshold[static_cast<std::size_t>(k)]) return true;
        }
        return false;
    };

    std::atomic<long> hits{0};
    const int nw = std::max(1, std::min<int>(workers, static_cast<int>(reps)));
    if (nw == 1) {
        long h = 0;
        for (long rep = 0; rep < reps; ++rep) h += run_one(rep) ? 1 : 0;
        hits = h;
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&] {
                long local = 0;
                for (long rep = next.fetch_add(1); rep < reps; rep = next.fetch_add(1))
                    local += run_one(rep) ? 1 : 0;
                hits.fetch_add(local);
            });
        for (auto& th : pool) th.join();
    }
    report.empirical = static_cast<double>(hits.load()) / static_cast<double>(reps);
    report.stderr_ =
        reps > 1 ? std::sqrt(report.empirical * (1.0 - report.empirical) /
                             static_cast<double>(reps - 1))
                 : 0.0;
    return report;
}

}  // namespace klucb
