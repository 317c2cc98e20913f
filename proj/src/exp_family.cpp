#include "klucb/exp_family.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace klucb {
namespace {

constexpr double kEntryFloor = 1e-300;   // tilted entries below this are exact zeros
constexpr double kPowerShift = 0.5;      // spectral shift; makes periodic supports converge
constexpr long kPowerCap = 1000000;
constexpr double kResidualAccept = 1e-10;

struct PerronPair {
    double rho = 0.0;
    std::vector<double> vec;
    double residual = std::numeric_limits<double>::infinity();
};

// Power iteration for the Perron pair of a nonnegative matrix B with unit
// largest entry, run on B + shift*I so that the iteration matrix is primitive
// whenever B is irreducible.  x is both the starting vector and the result,
// which lets callers warm start from a nearby parameter.
bool power_iterate(const Matrix& B, bool transpose, std::vector<double>& x, PerronPair& out,
                   long cap = kPowerCap) {
    const std::size_t n = B.size();
    if (x.size() != n) x.assign(n, 1.0 / static_cast<double>(n));
    std::vector<double> bx(n);
    out.residual = std::numeric_limits<double>::infinity();
    for (long it = 0; it < cap; ++it) {
        if (transpose) mat_tvec(B, x, bx);
        else mat_vec(B, x, bx);
        const double den = dot(x, x);
        if (!(den > 0.0)) return false;
        const double rho = dot(x, bx) / den;
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(bx[i] - rho * x[i]));
        if (res < out.residual) {
            out.residual = res;
            out.rho = rho;
            out.vec = x;
        }
        if (res <= 5e-14 * std::max(1.0, rho)) return true;
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = bx[i] + kPowerShift * x[i];
            norm += x[i];
        }
        if (!(norm > 0.0) || !std::isfinite(norm)) return false;
        for (std::size_t i = 0; i < n; ++i) x[i] /= norm;
    }
    return out.residual <= kResidualAccept * std::max(1.0, out.rho);
}

// Dense route for matrices power iteration could not settle; |S| stays small
// enough that a full Schur decomposition is cheap.
bool dense_perron(const Matrix& B, bool transpose, PerronPair& out) {
    const std::size_t n = B.size();
    if (n > 64) return false;
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(static_cast<long>(i), static_cast<long>(j)) =
                transpose ? B(j, i) : B(i, j);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, true);
    if (es.info() != Eigen::Success) return false;
    long best = 0;
    for (long k = 1; k < static_cast<long>(n); ++k)
        if (es.eigenvalues()(k).real() > es.eigenvalues()(best).real()) best = k;
    out.rho = es.eigenvalues()(best).real();
    Eigen::VectorXd vec = es.eigenvectors().col(best).real();
    if (vec.sum() < 0.0) vec = -vec;
    out.vec.assign(n, 0.0);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.vec[i] = std::max(vec(static_cast<long>(i)), 0.0);
        norm += out.vec[i];
    }
    if (!(norm > 0.0)) return false;
    for (double& v : out.vec) v /= norm;
    std::vector<double> bx(n);
    if (transpose) mat_tvec(B, out.vec, bx);
    else mat_vec(B, out.vec, bx);
    out.residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        out.residual = std::max(out.residual, std::abs(bx[i] - out.rho * out.vec[i]));
    return true;
}

// Tilted matrix scaled by its own largest entry; returns that scale.
double tilt_and_scale(const FamilySpec& fam, double theta, Matrix& out) {
    const std::size_t n = fam.size();
    out = Matrix(n);
    double top = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            double e = fam.P(x, y) * std::exp(theta * fam.f[y]);
            if (!std::isfinite(e))
                throw EigenFailure("tilted entry overflows at theta=" + std::to_string(theta));
            if (e < kEntryFloor) e = 0.0;
            out(x, y) = e;
            top = std::max(top, e);
        }
    }
    if (!(top > 0.0)) throw EigenFailure("tilted matrix vanished at theta=" + std::to_string(theta));
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) out(x, y) /= top;
    return top;
}

PerronPair solve_perron(const Matrix& B, bool transpose, std::vector<double>& warm) {
    PerronPair pair;
    if (power_iterate(B, transpose, warm, pair) &&
        pair.residual <= kResidualAccept * std::max(1.0, pair.rho))
        return pair;
    PerronPair dense;
    if (dense_perron(B, transpose, dense) &&
        dense.residual <= kResidualAccept * std::max(1.0, dense.rho)) {
        warm = dense.vec;
        return dense;
    }
    std::ostringstream msg;
    msg << "eigensystem did not converge (residual " << pair.residual << ")";
    throw EigenFailure(msg.str());
}

bool strongly_connected(const Matrix& P) {
    const std::size_t n = P.size();
    if (n == 0) return false;
    auto reach_all = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const std::size_t x = stack.back();
            stack.pop_back();
            for (std::size_t y = 0; y < n; ++y) {
                const double w = transpose ? P(y, x) : P(x, y);
                if (w > 0.0 && !seen[y]) {
                    seen[y] = 1;
                    ++count;
                    stack.push_back(y);
                }
            }
        }
        return count == n;
    };
    return reach_all(false) && reach_all(true);
}

}  // namespace

FamilySpec build_family(std::vector<std::string> states, Matrix P, std::vector<double> f) {
    const std::size_t n = f.size();
    if (n == 0 || P.size() != n || states.size() != n)
        throw OutOfRange("family dimensions disagree");
    for (double fy : f)
        if (!std::isfinite(fy)) throw OutOfRange("reward values must be finite");
    for (std::size_t x = 0; x < n; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            const double e = P(x, y);
            if (!std::isfinite(e) || e < 0.0)
                throw NonStochastic("negative or non-finite entry in row " + std::to_string(x));
            sum += e;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw NonStochastic("row " + std::to_string(x) + " sums to " + std::to_string(sum));
        for (std::size_t y = 0; y < n; ++y) P(x, y) /= sum;
    }
    const auto [mn, mx] = std::minmax_element(f.begin(), f.end());
    if (!(*mx > *mn)) throw ConstantReward("reward function is constant");
    if (!strongly_connected(P)) throw Reducible("transition support is not strongly connected");
    return FamilySpec{std::move(states), std::move(P), std::move(f)};
}

FamilySpec iid_family(const std::vector<double>& h, const std::vector<double>& f) {
    const std::size_t n = h.size();
    if (n == 0 || f.size() != n) throw OutOfRange("family dimensions disagree");
    double sum = 0.0;
    for (double w : h) {
        if (!(w > 0.0)) throw ZeroMass("base distribution must be strictly positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw NonStochastic("base distribution sums to " + std::to_string(sum));
    Matrix P(n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) P(x, y) = h[y];
    std::vector<std::string> states(n);
    for (std::size_t x = 0; x < n; ++x) states[x] = std::to_string(x);
    return build_family(std::move(states), std::move(P), f);
}

FamilySpec two_state_family(double p, double q) {
    if (!(p > 0.0 && p <= 1.0 && q >= 0.0 && q < 1.0))
        throw OutOfRange("need p in (0,1] and q in [0,1)");
    Matrix P(2);
    P(0, 0) = 1.0 - p;
    P(0, 1) = p;
    P(1, 0) = 1.0 - q;
    P(1, 1) = q;
    return build_family({"0", "1"}, std::move(P), {-1.0, 1.0});
}

double rho_two_state(double p, double q, double theta) {
    if (!(p > 0.0 && p <= 1.0 && q >= 0.0 && q < 1.0))
        throw OutOfRange("need p in (0,1] and q in [0,1)");
    if (!std::isfinite(theta)) throw OutOfRange("theta must be finite");
    const double a = (1.0 - p) * std::exp(-theta);
    const double b = q * std::exp(theta);
    const double d = std::sqrt((a - b) * (a - b) + 4.0 * p * (1.0 - q));
    return 0.5 * (a + b + d);
}

Member member(const FamilySpec& fam, double theta) {
    if (!std::isfinite(theta)) throw OutOfRange("theta must be finite");
    const std::size_t n = fam.size();
    Member m;
    m.theta = theta;
    Matrix B;
    const double scale = tilt_and_scale(fam, theta, B);
    std::vector<double> warm_v, warm_u;
    PerronPair right = solve_perron(B, false, warm_v);
    PerronPair left = solve_perron(B, true, warm_u);
    const double rho_b = right.rho;
    m.rho = scale * rho_b;
    m.log_pf = std::log(scale) + std::log(rho_b);
    m.right_residual = right.residual;
    // Both residuals are reported against the same eigenvalue.
    m.left_residual = 0.0;
    {
        std::vector<double> bx(n);
        mat_tvec(B, left.vec, bx);
        for (std::size_t i = 0; i < n; ++i)
            m.left_residual = std::max(m.left_residual, std::abs(bx[i] - rho_b * left.vec[i]));
    }
    m.u = std::move(left.vec);
    m.v = std::move(right.vec);
    double usum = 0.0;
    for (double w : m.u) usum += w;
    if (!(usum > 0.0)) throw EigenFailure("left eigenvector is not positive");
    for (double& w : m.u) w /= usum;
    const double uv = dot(m.u, m.v);
    if (!(uv > 0.0)) throw EigenFailure("eigenvector normalization failed");
    for (double& w : m.v) w /= uv;
    for (double w : m.v)
        if (!(w > 0.0)) throw EigenFailure("right eigenvector is not strictly positive");
    m.pi.resize(n);
    m.mean = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        m.pi[x] = m.u[x] * m.v[x];
        m.mean += fam.f[x] * m.pi[x];
    }
    m.P_theta = Matrix(n);
    for (std::size_t x = 0; x < n; ++x) {
        double row = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            m.P_theta(x, y) = B(x, y) * m.v[y] / (rho_b * m.v[x]);
            row += m.P_theta(x, y);
        }
        if (std::abs(row - 1.0) > 1e-8)
            throw EigenFailure("conditioned kernel row " + std::to_string(x) +
                               " sums to " + std::to_string(row));
    }
    return m;
}

double stationary_mean(const FamilySpec& fam, double theta) { return member(fam, theta).mean; }

MeanSpace mean_space(const FamilySpec& fam, double theta_cap) {
    FamilyEvaluator ev(fam, theta_cap);
    return ev.space();
}

double mean_to_natural(const FamilySpec& fam, double mu, double theta_cap) {
    FamilyEvaluator ev(fam, theta_cap);
    return ev.mean_to_natural(mu);
}

double kl_rate(const FamilySpec& fam, double theta, double lambda) {
    FamilyEvaluator ev(fam);
    return ev.kl_rate(theta, lambda);
}

double kl_divergence_rate(const Matrix& P_a, const std::vector<double>& pi_a, const Matrix& P_b) {
    const std::size_t n = P_a.size();
    if (P_b.size() != n || pi_a.size() != n) throw OutOfRange("kernel dimensions disagree");
    double rate = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            const double a = P_a(x, y);
            if (a <= 0.0) continue;  // 0 log 0 and 0 log(0/0) both count as 0
            const double b = P_b(x, y);
            if (b <= 0.0)
                throw InfiniteDivergence("transition " + std::to_string(x) + "->" +
                                         std::to_string(y) + " has zero mass under the target");
            rate += pi_a[x] * a * std::log(a / b);
        }
    }
    return rate;
}

double kl_rate_direct(const FamilySpec& fam, double theta, double lambda) {
    const Member mt = member(fam, theta);
    const Member ml = member(fam, lambda);
    return kl_divergence_rate(mt.P_theta, mt.pi, ml.P_theta);
}

double kl_rate_mean(const FamilySpec& fam, double mu, double nu, double theta_cap) {
    FamilyEvaluator ev(fam, theta_cap);
    return ev.kl_rate_mean(mu, nu);
}

double klucb_index(const FamilySpec& fam, double mean, long n, double g_val, double theta_cap) {
    FamilyEvaluator ev(fam, theta_cap);
    return ev.klucb_index(mean, n, g_val);
}

FamilyEvaluator::FamilyEvaluator(const FamilySpec& fam, double theta_cap) : fam_(&fam) {
    if (!(theta_cap > 0.0) || !std::isfinite(theta_cap))
        throw OutOfRange("theta_cap must be positive and finite");
    space_.theta_cap = theta_cap;
    if (fam.size() == 2) {
        fast_two_state_ = true;
        ts_.p = fam.P(0, 1);
        ts_.q = fam.P(1, 1);
        ts_.f0 = fam.f[0];
        ts_.f1 = fam.f[1];
    }
    space_.lo = mean(-theta_cap);
    space_.hi = mean(theta_cap);
    if (!(space_.hi - space_.lo > 1e-12))
        throw DegenerateFamily("log Perron root is linear; the mean space is a point");
}

double FamilyEvaluator::general_log_pf(double theta) {
    const double scale = tilt_and_scale(*fam_, theta, tilted_);
    PerronPair right = solve_perron(tilted_, false, v_ws_);
    return std::log(scale) + std::log(right.rho);
}

double FamilyEvaluator::general_mean(double theta) {
    tilt_and_scale(*fam_, theta, tilted_);
    PerronPair right = solve_perron(tilted_, false, v_ws_);
    PerronPair left = solve_perron(tilted_, true, u_ws_);
    double uv = 0.0, ufv = 0.0;
    for (std::size_t x = 0; x < fam_->size(); ++x) {
        const double w = left.vec[x] * right.vec[x];
        uv += w;
        ufv += w * fam_->f[x];
    }
    return ufv / uv;
}

double FamilyEvaluator::log_pf(double theta) {
    if (!fast_two_state_) return general_log_pf(theta);
    const double s = 0.5 * (ts_.f0 + ts_.f1);
    const double w = theta * 0.5 * (ts_.f0 - ts_.f1);
    const double ea = (1.0 - ts_.p) * std::exp(w);
    const double eb = ts_.q * std::exp(-w);
    if (!std::isfinite(ea) || !std::isfinite(eb))
        throw EigenFailure("tilted entry overflows at theta=" + std::to_string(theta));
    const double d = std::sqrt((ea - eb) * (ea - eb) + 4.0 * ts_.p * (1.0 - ts_.q));
    return theta * s + std::log(0.5 * (ea + eb + d));
}

double FamilyEvaluator::mean(double theta) {
    if (!fast_two_state_) return general_mean(theta);
    const double s = 0.5 * (ts_.f0 + ts_.f1);
    const double half = 0.5 * (ts_.f0 - ts_.f1);
    const double w = theta * half;
    const double ea = (1.0 - ts_.p) * std::exp(w);
    const double eb = ts_.q * std::exp(-w);
    if (!std::isfinite(ea) || !std::isfinite(eb))
        throw EigenFailure("tilted entry overflows at theta=" + std::to_string(theta));
    const double d = std::sqrt((ea - eb) * (ea - eb) + 4.0 * ts_.p * (1.0 - ts_.q));
    const double rho = 0.5 * (ea + eb + d);
    const double drho = 0.5 * half * (ea - eb) * (1.0 + (ea + eb) / d);
    return s + drho / rho;
}

double FamilyEvaluator::mean_to_natural(double mu) {
    if (!std::isfinite(mu)) throw OutOfMeanSpace("mean must be finite");
    if (mu < space_.lo - 1e-12 || mu > space_.hi + 1e-12)
        throw OutOfMeanSpace("mean " + std::to_string(mu) + " is outside [" +
                             std::to_string(space_.lo) + ", " + std::to_string(space_.hi) + "]");
    mu = std::clamp(mu, space_.lo, space_.hi);
    double lo = -space_.theta_cap, hi = space_.theta_cap;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mean(mid) < mu) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double FamilyEvaluator::kl_rate(double theta, double lambda) {
    const double v = log_pf(lambda) - log_pf(theta) - mean(theta) * (lambda - theta);
    return v > 0.0 ? v : 0.0;
}

double FamilyEvaluator::kl_rate_mean(double mu, double nu) {
    mu = std::clamp(mu, space_.lo, space_.hi);
    nu = std::clamp(nu, space_.lo, space_.hi);
    return kl_rate(mean_to_natural(mu), mean_to_natural(nu));
}

double FamilyEvaluator::klucb_index(double mean_hat, long n, double g_val) {
    if (n < 1) throw OutOfRange("need at least one observation");
    if (!(g_val >= 0.0)) throw OutOfRange("exploration budget must be nonnegative");
    const double m = std::clamp(mean_hat, space_.lo, space_.hi);
    if (g_val == 0.0) return m;
    const double budget = g_val / static_cast<double>(n);
    const double theta_m = mean_to_natural(m);
    const double lpf_m = log_pf(theta_m);
    const auto excess = [&](double lambda) {
        return log_pf(lambda) - lpf_m - m * (lambda - theta_m);
    };
    if (excess(space_.theta_cap) <= budget) return space_.hi;
    double lo = theta_m, hi = space_.theta_cap;
    for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (excess(mid) <= budget) lo = mid;
        else hi = mid;
    }
    const double u = mean(lo);
    return std::max(u, m);
}

}  // namespace klucb
