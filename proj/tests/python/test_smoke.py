import csv
import io
import json
import math

import pytest

import klucb


def test_two_state_basics():
    fam = klucb.two_state_family(0.49, 0.45)
    assert len(fam) == 2
    assert fam.states == ["0", "1"]
    assert fam.f == [-1.0, 1.0]

    # pi = (q, p) / (p + q), mean = (q - p) / (p + q) = -0.04 / 0.94
    assert klucb.stationary_mean(fam, 0.0) == pytest.approx(-3.0 / 52.0, abs=1e-12)
    assert klucb.rho_two_state(0.5, 0.5, 1.0) == pytest.approx(math.cosh(1.0), abs=1e-12)


def test_member_and_divergences():
    fam = klucb.two_state_family(0.3, 0.2)
    mem = klucb.member(fam, 0.7)
    assert mem["rho"] > 0
    assert abs(mem["left_residual"]) < 1e-9
    assert sum(mem["pi"]) == pytest.approx(1.0, abs=1e-12)
    assert mem["mean"] == pytest.approx(klucb.stationary_mean(fam, 0.7), abs=1e-12)

    assert klucb.kl_rate(fam, 0.4, 0.4) == 0.0
    assert klucb.kl_rate(fam, 0.0, 1.0) == pytest.approx(
        klucb.kl_rate_direct(fam, 0.0, 1.0), rel=1e-8
    )

    lo, hi = klucb.mean_space(fam)
    mu = 0.5 * (lo + hi)
    theta = klucb.mean_to_natural(fam, mu)
    assert klucb.stationary_mean(fam, theta) == pytest.approx(mu, abs=1e-6)


def test_index_dominates_mean():
    fam = klucb.two_state_family(0.49, 0.45)
    mean, n, t = -0.1, 25, 400
    idx = klucb.klucb_index(fam, mean, n, klucb.g(t))
    assert idx >= mean
    assert idx <= klucb.mean_space(fam)[1] + 1e-12
    assert klucb.ucb_index(0.1, 100, 10000, 1.0) == pytest.approx(
        0.1 + math.sqrt(2.0 * math.log(10000.0) / 100.0), abs=1e-12
    )


def test_bernoulli_reduces_to_binary_kl():
    fam = klucb.iid_family([0.5, 0.5], [0.0, 1.0])
    p, q = 0.3, 0.7
    binary = p * math.log(p / q) + (1 - p) * math.log((1 - p) / (1 - q))
    assert klucb.kl_rate_mean(fam, p, q) == pytest.approx(binary, abs=1e-9)
    assert klucb.chernoff_constant(fam, 0.7) == pytest.approx(1.0, abs=1e-12)


def test_concentration_surface():
    fam = klucb.two_state_family(0.49, 0.45)
    assert klucb.is_doeblin(fam, [0])
    assert klucb.maximal_bound(fam, 4.0, 1000) > 0
    rep = klucb.empirical_tail(
        fam, 0.0, "chernoff", klucb.stationary_mean(fam, 0.0) + 0.3, 60, 2000, 99
    )
    assert rep["replications"] == 2000
    assert rep["empirical"] <= rep["bound"] + 3 * rep["stderr"] + 1e-12


def test_regret_helpers():
    fam = klucb.two_state_family(0.49, 0.45)
    prof = klucb.profile(fam, [0.8, 0.0, -0.8], 1)
    assert prof.K == 3 and prof.M == 1
    assert prof.order[0] == 0
    assert klucb.lower_bound_constant(prof, fam) > 0
    assert klucb.proxy_regret(prof, [100, 0, 0], 100) == 0.0
    assert klucb.return_time(fam, 0.0) == pytest.approx(2.0, abs=1e-12)


def test_error_translation():
    with pytest.raises(klucb.KlucbError):
        klucb.two_state_family(1.5, 0.5)
    with pytest.raises(klucb.KlucbError):
        klucb.simulate("{}")


def test_simulate_round_trip():
    cfg = {
        "family": {"two_state": {"p": 0.49, "q": 0.45}},
        "thetas": [0.6, 0.0, -0.6],
        "K": 3,
        "M": 1,
        "T": 40,
        "policies": ["rr-klucb", "ucb"],
        "reps": 2,
        "master_seed": 7,
        "checkpoints": [20, 40],
    }
    out = klucb.simulate(json.dumps(cfg))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    assert rows[0]["policy"] == "rr-klucb"
    assert {r["t"] for r in rows} == {"20", "40"}

    # Same config, same CSV apart from wall-clock timings.
    def strip_wall(text):
        return [
            {k: v for k, v in row.items() if k != "wall_time_ns"}
            for row in csv.DictReader(io.StringIO(text))
        ]

    assert strip_wall(klucb.simulate(json.dumps(cfg))) == strip_wall(out)
