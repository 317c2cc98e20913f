#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "klucb/concentration.hpp"
#include "klucb/exp_family.hpp"
#include "support/oracles.hpp"

using namespace klucb;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix P(rows.size());
    for (std::size_t x = 0; x < rows.size(); ++x)
        for (std::size_t y = 0; y < rows.size(); ++y) P(x, y) = rows[x][y];
    return P;
}

FamilySpec sparse4() {
    return build_family({"a", "b", "c", "d"},
                        from_rows({{0.0, 0.5, 0.5, 0.0},
                                   {1.0, 0.0, 0.0, 0.0},
                                   {0.0, 0.0, 0.2, 0.8},
                                   {0.3, 0.3, 0.2, 0.2}}),
                        {0.0, 1.0, 2.0, 3.0});
}

}  // namespace

TEST_CASE("doeblin checker on hand cases") {
    auto fam = two_state_family(0.49, 0.45);
    CHECK(is_doeblin(fam, {0}));
    CHECK(is_doeblin(fam, {1}));
    CHECK(is_doeblin(fam, {0, 1}));

    // p = 1 removes the self loop at state 0.
    auto stiff = two_state_family(1.0, 0.45);
    CHECK_FALSE(is_doeblin(stiff, {0}));

    // q = 0 removes the self loop at state 1.
    auto bounce = two_state_family(0.5, 0.0);
    CHECK_FALSE(is_doeblin(bounce, {1}));

    CHECK_THROWS_AS(is_doeblin(fam, {}), EmptySet);
    CHECK_THROWS_AS(is_doeblin(fam, {2}), OutOfRange);

    auto sp = sparse4();
    CHECK_FALSE(is_doeblin(sp, {0}));  // no self loop at a
    CHECK(is_doeblin(sp, {0, 1, 2, 3}));
    CHECK_FALSE(is_doeblin(sp, {0, 1}));  // c cannot enter {a,b} in one step
}

TEST_CASE("doeblin checker agrees with the definition on every subset") {
    auto chains = {sparse4(), oracle::random_dense_family(4, 11),
                   two_state_family(1.0, 0.0)};
    for (const auto& fam : chains) {
        const std::size_t n = fam.size();
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            std::vector<std::size_t> A;
            for (std::size_t s = 0; s < n; ++s)
                if (mask & (1u << s)) A.push_back(s);
            CHECK(is_doeblin(fam, A) == oracle::doeblin_definition(fam, A));
        }
    }
}

TEST_CASE("martingale identity holds exactly") {
    auto fam = two_state_family(0.49, 0.45);
    CHECK(martingale_residual(fam, 0.0).residual < 1e-12);
    for (double theta : {-2.0, -0.5, 1.0, 3.0})
        CHECK(martingale_residual(fam, theta).residual < 1e-10);

    auto dense = oracle::random_dense_family(5, 31337);
    CHECK(martingale_residual(dense, 1.3).residual < 1e-10);
    CHECK(martingale_residual(dense, 0.0).residual < 1e-12);
}

TEST_CASE("chernoff constant and bound") {
    auto fam = two_state_family(0.49, 0.45);
    const double mu0 = stationary_mean(fam, 0.0);

    CHECK(chernoff_constant(fam, mu0) >= 1.0);
    CHECK(chernoff_constant(fam, mu0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(chernoff_bound(fam, mu0, 100) >= 1.0 - 1e-9);

    // i.i.d. family: constant right vector, so the ratio constant is 1 and the
    // bound is the bare exponential.
    auto bern = iid_family({0.5, 0.5}, {0.0, 1.0});
    for (double mu : {0.55, 0.7, 0.9}) {
        CHECK(chernoff_constant(bern, mu) == doctest::Approx(1.0).epsilon(1e-12));
        const double want = std::exp(-200.0 * oracle::binary_kl(mu, 0.5));
        CHECK(chernoff_bound(bern, mu, 200) == doctest::Approx(want).epsilon(1e-7));
    }

    // Decreasing in n above the stationary mean.
    double prev = 2.0;
    for (long n : {10L, 100L, 1000L}) {
        const double b = chernoff_bound(fam, 0.3, n);
        CHECK(b < prev);
        CHECK(b > 0.0);
        prev = b;
    }

    CHECK_THROWS_AS(chernoff_bound(fam, mu0 - 0.1, 10), OutOfMeanSpace);
    CHECK_THROWS_AS(chernoff_bound(fam, 1.5, 10), OutOfMeanSpace);
    CHECK_THROWS_AS(chernoff_bound(fam, 0.3, 0), OutOfRange);
}

TEST_CASE("maximal constant and bound") {
    auto fam = two_state_family(0.49, 0.45);
    const double cm = maximal_constant(fam);
    CHECK(cm >= 1.0);

    const double eps = 3.0;
    const long n = 500;
    const double want = cm * std::exp(1.0) * std::ceil(eps * std::log(static_cast<double>(n))) *
                        std::exp(-eps);
    CHECK(maximal_bound(fam, eps, n) == doctest::Approx(want).epsilon(1e-12));

    auto bern = iid_family({0.5, 0.5}, {0.0, 1.0});
    CHECK(maximal_constant(bern) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(maximal_bound(bern, 2.0, 100) ==
          doctest::Approx(std::exp(1.0) * std::ceil(2.0 * std::log(100.0)) * std::exp(-2.0))
              .epsilon(1e-12));

    CHECK_THROWS_AS(maximal_bound(fam, 1.0, 100), OutOfRange);
    CHECK_THROWS_AS(maximal_bound(fam, 0.5, 100), OutOfRange);
    // p = 1: the reward minimizer {0} has no self loop, hypothesis fails.
    CHECK_THROWS_AS(maximal_bound(two_state_family(1.0, 0.45), 2.0, 100), NotDoeblin);
}

TEST_CASE("empirical chernoff tail matches the exact binomial") {
    auto bern = iid_family({0.5, 0.5}, {0.0, 1.0});
    auto rep = empirical_tail(bern, 0.0, TailEvent::chernoff(0.6), 20, 4000, 777);
    CHECK(rep.replications == 4000);
    CHECK(rep.event == "chernoff");
    CHECK(rep.n == 20);

    // P(Bin(20, 1/2) >= 12) = 263950 / 2^20.
    const double exact = 263950.0 / 1048576.0;
    CHECK(std::abs(rep.empirical - exact) <= 4.0 * rep.stderr_);
    CHECK(rep.empirical <= rep.bound_value + 3.0 * rep.stderr_);
    CHECK(rep.stderr_ == doctest::Approx(std::sqrt(rep.empirical * (1.0 - rep.empirical) /
                                                   (4000.0 - 1.0)))
                             .epsilon(1e-12));
}

TEST_CASE("empirical tails are worker-count invariant") {
    auto fam = two_state_family(0.49, 0.45);
    auto a = empirical_tail(fam, 0.0, TailEvent::chernoff(0.3), 100, 600, 42, InitDist::stationary(), 1);
    auto b = empirical_tail(fam, 0.0, TailEvent::chernoff(0.3), 100, 600, 42, InitDist::stationary(), 4);
    CHECK(a.empirical == b.empirical);
    CHECK(a.stderr_ == b.stderr_);

    auto c = empirical_tail(fam, 0.0, TailEvent::maximal(2.0), 80, 400, 43, InitDist::stationary(), 1);
    auto d = empirical_tail(fam, 0.0, TailEvent::maximal(2.0), 80, 400, 43, InitDist::stationary(), 3);
    CHECK(c.empirical == d.empirical);
    CHECK(c.event == "maximal");
    CHECK(c.bound_value == doctest::Approx(maximal_bound(fam, 2.0, 80)).epsilon(1e-12));
}

TEST_CASE("empirical maximal event basics") {
    auto fam = two_state_family(0.49, 0.45);

    auto rep = empirical_tail(fam, 0.0, TailEvent::maximal(2.5), 200, 2000, 99);
    CHECK(rep.empirical >= 0.0);
    CHECK(rep.empirical <= 1.0);
    CHECK(rep.empirical <= rep.bound_value + 3.0 * rep.stderr_);

    // An enormous divergence requirement makes the event unreachable.
    auto never = empirical_tail(fam, 0.0, TailEvent::maximal(500.0), 50, 300, 7);
    CHECK(never.empirical == 0.0);

    auto one = empirical_tail(fam, 0.0, TailEvent::chernoff(0.9), 10, 1, 5);
    CHECK(one.replications == 1);
    CHECK((one.empirical == 0.0 || one.empirical == 1.0));
    CHECK(one.stderr_ == 0.0);
}

TEST_CASE("point and uniform initial distributions are accepted") {
    auto fam = two_state_family(0.49, 0.45);
    auto a = empirical_tail(fam, 0.0, TailEvent::chernoff(0.2), 50, 400, 21, InitDist::point(1));
    auto b = empirical_tail(fam, 0.0, TailEvent::chernoff(0.2), 50, 400, 21, InitDist::uniform());
    CHECK(a.replications == 400);
    CHECK(b.replications == 400);
    CHECK(a.empirical >= 0.0);
    CHECK(b.empirical <= 1.0);
}
