#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "klucb/bandit_env.hpp"
#include "klucb/exp_family.hpp"
#include "support/oracles.hpp"

using namespace klucb;

TEST_CASE("construction validates play count and point state") {
    auto fam = two_state_family(0.49, 0.45);
    std::vector<double> thetas{0.0, 0.5, -0.5};

    CHECK_THROWS_AS(BanditEnv(fam, thetas, 0, InitDist::stationary(), 1), BadPlayCount);
    CHECK_THROWS_AS(BanditEnv(fam, thetas, 4, InitDist::stationary(), 1), BadPlayCount);
    CHECK_THROWS_AS(BanditEnv(fam, thetas, 1, InitDist::point(2), 1), OutOfRange);
    CHECK_THROWS_AS(BanditEnv(fam, {}, 1, InitDist::stationary(), 1), OutOfRange);

    BanditEnv env(fam, thetas, 2, InitDist::point(0), 7);
    CHECK(env.arms() == 3);
    CHECK(env.plays_per_round() == 2);
    CHECK(env.t() == 0);
    for (int a = 0; a < 3; ++a) CHECK(env.state_of(a) == 0);
}

TEST_CASE("step bookkeeping and rested freezing") {
    auto fam = two_state_family(0.49, 0.45);
    BanditEnv env(fam, {0.0, 0.0, 0.0}, 1, InitDist::stationary(), 99, true);

    const int frozen1 = env.state_of(1);
    const int frozen2 = env.state_of(2);
    double paid = 0.0;
    for (int i = 0; i < 50; ++i) {
        auto out = env.step({0});
        CHECK(out.round == i + 1);
        CHECK(out.plays.size() == 1);
        CHECK(out.plays[0].first == 0);
        const double r = out.plays[0].second;
        CHECK((r == -1.0 || r == 1.0));
        CHECK(r == fam.f[static_cast<std::size_t>(env.state_of(0))]);
        paid += r;
    }
    CHECK(env.state_of(1) == frozen1);
    CHECK(env.state_of(2) == frozen2);
    CHECK(env.t() == 50);
    CHECK(env.counts()[0] == 50);
    CHECK(env.counts()[1] == 0);
    CHECK(env.cum_reward() == paid);
    CHECK(env.sample_mean(0) == doctest::Approx(paid / 50.0).epsilon(1e-15));
    CHECK_THROWS_AS(env.sample_mean(1), NeverPlayed);
    CHECK_THROWS_AS(env.sample_mean(3), OutOfRange);
    CHECK(env.reward_log().size() == 50);

    // Bad play sets are rejected without advancing time.
    CHECK_THROWS_AS(env.step({0, 1}), WrongSetSize);
    CHECK_THROWS_AS(env.step({3}), OutOfRange);
    CHECK(env.t() == 50);
}

TEST_CASE("counts always sum to plays per round times rounds") {
    auto fam = two_state_family(0.3, 0.6);
    BanditEnv env(fam, {0.2, -0.1, 0.0, 1.0}, 2, InitDist::uniform(), 5);
    oracle::MiniRand pick(12);
    for (int i = 0; i < 200; ++i) {
        const int a = static_cast<int>(pick.next() * 4);
        const int b = (a + 1 + static_cast<int>(pick.next() * 3)) % 4;
        auto out = env.step({std::max(a, b), std::min(a, b)});
        CHECK(out.plays.size() == 2);
        CHECK(out.plays[0].first < out.plays[1].first);
        const long total = std::accumulate(env.counts().begin(), env.counts().end(), 0L);
        CHECK(total == 2L * env.t());
    }
    CHECK_THROWS_AS(env.step({1, 1}), DuplicateArm);
}

TEST_CASE("same seed gives the same trajectory") {
    auto fam = two_state_family(0.49, 0.45);
    BanditEnv a(fam, {0.3, -0.2}, 1, InitDist::stationary(), 2024);
    BanditEnv b(fam, {0.3, -0.2}, 1, InitDist::stationary(), 2024);
    for (int i = 0; i < 100; ++i) {
        auto oa = a.step({i % 2});
        auto ob = b.step({i % 2});
        CHECK(oa.plays == ob.plays);
    }
    CHECK(a.cum_reward() == b.cum_reward());
    CHECK(a.state_of(0) == b.state_of(0));
    CHECK(a.state_of(1) == b.state_of(1));
}

TEST_CASE("long-run reward frequency approaches the stationary mean") {
    auto fam = two_state_family(0.49, 0.45);
    for (double theta : {0.0, 1.0}) {
        BanditEnv env(fam, {theta}, 1, InitDist::stationary(), 31337);
        const long T = 40000;
        for (long i = 0; i < T; ++i) env.step({0});
        const double want = stationary_mean(fam, theta);
        CHECK(std::abs(env.cum_reward() / static_cast<double>(T) - want) < 0.02);
    }

    // i.i.d. binary arm at a known tilt.
    auto bern = iid_family({0.5, 0.5}, {0.0, 1.0});
    BanditEnv env(bern, {std::log(3.0)}, 1, InitDist::stationary(), 5150);
    const long T = 40000;
    for (long i = 0; i < T; ++i) env.step({0});
    CHECK(std::abs(env.cum_reward() / static_cast<double>(T) - 0.75) < 0.01);
}

TEST_CASE("played arms advance by the tilted kernel") {
    // Strong positive tilt pushes the two-state chain to live in state 1.
    auto fam = two_state_family(0.49, 0.45);
    BanditEnv env(fam, {4.0}, 1, InitDist::point(0), 8);
    long ones = 0;
    const long T = 5000;
    for (long i = 0; i < T; ++i) {
        env.step({0});
        ones += env.state_of(0);
    }
    const double pi1 = member(fam, 4.0).pi[1];
    CHECK(pi1 > 0.95);
    CHECK(std::abs(static_cast<double>(ones) / static_cast<double>(T) - pi1) < 0.02);
}
