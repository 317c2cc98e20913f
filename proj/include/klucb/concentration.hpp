#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "klucb/bandit_env.hpp"
#include "klucb/exp_family.hpp"

namespace klucb {

// True when the A-submatrix of the support is irreducible and every state
// outside A can step into A.  A singleton qualifies only with a self loop.
bool is_doeblin(const FamilySpec& fam, const std::vector<std::size_t>& A);

struct MartingaleCheck {
    double theta = 0.0;
    double residual = 0.0;
};

// Largest violation of the defining identity
// sum_y P(x,y) e^{theta f(y)} v(y) = rho(theta) v(x).
MartingaleCheck martingale_residual(const FamilySpec& fam, double theta);

// Ratio constant max_{x,y} v(y)/v(x) at the member tilted to mean mu.
double chernoff_constant(const FamilySpec& fam, double mu,
                         double theta_cap = kDefaultThetaCap);

// Upper tail bound at level mu >= mu(0) after n steps.
double chernoff_bound(const FamilySpec& fam, double mu, long n,
                      double theta_cap = kDefaultThetaCap);

// Worst ratio constant over the nonpositive tilts, scanned on a 0.05 grid.
double maximal_constant(const FamilySpec& fam, double theta_cap = kDefaultThetaCap);

// Bound on the probability that any prefix mean up to n undershoots mu(0)
// with divergence weight eps; requires eps > 1 and the Doeblin property on
// the reward minimizers.
double maximal_bound(const FamilySpec& fam, double eps, long n,
                     double theta_cap = kDefaultThetaCap);

struct TailEvent {
    enum class Kind { Chernoff, Maximal };
    Kind kind = Kind::Chernoff;
    double level = 0.0;  // mu for Chernoff, eps for the maximal event

    static TailEvent chernoff(double mu) { return {Kind::Chernoff, mu}; }
    static TailEvent maximal(double eps) { return {Kind::Maximal, eps}; }
};

struct BoundReport {
    std::string event;
    double level = 0.0;
    long n = 0;
    double constant = 0.0;
    double bound_value = 0.0;
    double empirical = 0.0;
    double stderr_ = 0.0;
    long replications = 0;
};

// Monte Carlo frequency of the event under the chain tilted to theta0,
// reported next to the analytic bound.  Replication r draws its stream from
// mix_seed(seed, r), so the result does not depend on worker count.
BoundReport empirical_tail(const FamilySpec& fam, double theta0, TailEvent event, long n,
                           long reps, std::uint64_t seed,
                           InitDist init = InitDist::stationary(), int workers = 1);

}  // namespace klucb
