#pragma once

#include <string>
#include <vector>

#include "klucb/errors.hpp"
#include "klucb/matrix.hpp"

namespace klucb {

// An irreducible finite chain together with a nonconstant reward function.
// Rows of P are renormalized on construction, so they sum to 1 exactly.
struct FamilySpec {
    std::vector<std::string> states;
    Matrix P;
    std::vector<double> f;

    std::size_t size() const { return f.size(); }
};

// The family member at natural parameter theta.  u is the left Perron vector
// of the tilted matrix scaled to sum 1, v the right one scaled so that
// sum_x u(x) v(x) = 1, and pi(x) = u(x) v(x) is the stationary law of
// P_theta.  Residuals are those of the tilted matrix scaled by its largest
// entry (the absolute residual is meaningless once entries reach 1e15).
struct Member {
    double theta = 0.0;
    Matrix P_theta;
    double rho = 1.0;
    double log_pf = 0.0;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> pi;
    double mean = 0.0;
    double left_residual = 0.0;
    double right_residual = 0.0;
};

// Closure of the set of reachable stationary means under |theta| <= theta_cap.
struct MeanSpace {
    double lo = 0.0;
    double hi = 0.0;
    double theta_cap = 0.0;
};

inline constexpr double kDefaultThetaCap = 40.0;

FamilySpec build_family(std::vector<std::string> states, Matrix P, std::vector<double> f);

// Rows all equal to h: the family degenerates to an i.i.d. exponential family
// whose log Perron root is the log moment generating function of f under h.
FamilySpec iid_family(const std::vector<double>& h, const std::vector<double>& f);

// Two-state chain P = [[1-p, p], [1-q, q]] with rewards f = (-1, +1).
FamilySpec two_state_family(double p, double q);

// Closed-form Perron root of the tilted two-state matrix; p in (0,1], q in [0,1).
double rho_two_state(double p, double q, double theta);

Member member(const FamilySpec& fam, double theta);

double stationary_mean(const FamilySpec& fam, double theta);

MeanSpace mean_space(const FamilySpec& fam, double theta_cap = kDefaultThetaCap);

double mean_to_natural(const FamilySpec& fam, double mu, double theta_cap = kDefaultThetaCap);

// Bregman form of the divergence rate: Lambda(lambda) - Lambda(theta)
// - mean(theta) * (lambda - theta).  Never negative.
double kl_rate(const FamilySpec& fam, double theta, double lambda);

// Direct double sum over transitions; agrees with kl_rate and exists as an
// independent computation path.
double kl_rate_direct(const FamilySpec& fam, double theta, double lambda);

// Divergence rate between explicit kernels.  P_a is measured against P_b
// under the stationary law pi_a; a transition with P_a > 0 but P_b = 0 makes
// the rate infinite.
double kl_divergence_rate(const Matrix& P_a, const std::vector<double>& pi_a, const Matrix& P_b);

// Divergence in the mean parameterization; both arguments are clamped into
// the mean space before inverting.
double kl_rate_mean(const FamilySpec& fam, double mu, double nu,
                    double theta_cap = kDefaultThetaCap);

// Largest optimistic mean: sup { nu in [mean, hi] : KL(mean || nu) <= g_val / n }.
double klucb_index(const FamilySpec& fam, double mean, long n, double g_val,
                   double theta_cap = kDefaultThetaCap);

// Repeated-evaluation engine for one family.  Free functions above construct
// one per call; simulation loops keep one per worker and reuse its workspace.
// Two-state families use closed forms, larger ones warm-started power
// iterations.  Not safe to share across threads.
class FamilyEvaluator {
  public:
    explicit FamilyEvaluator(const FamilySpec& fam, double theta_cap = kDefaultThetaCap);

    const FamilySpec& family() const { return *fam_; }
    const MeanSpace& space() const { return space_; }

    double log_pf(double theta);
    double mean(double theta);
    double mean_to_natural(double mu);
    double kl_rate(double theta, double lambda);
    double kl_rate_mean(double mu, double nu);
    double klucb_index(double mean, long n, double g_val);

  private:
    struct TwoState {
        double p, q, f0, f1;
    };

    double general_log_pf(double theta);
    double general_mean(double theta);

    const FamilySpec* fam_;
    MeanSpace space_;
    bool fast_two_state_ = false;
    TwoState ts_{};
    // Workspace for the general path.
    Matrix tilted_;
    std::vector<double> v_ws_, u_ws_, tmp_;
};

}  // namespace klucb
