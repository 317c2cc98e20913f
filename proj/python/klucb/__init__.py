"""Python bindings for the klucb library.

Everything here is a thin wrapper over the C++ core: exponential families of
Markov chains, their divergence rates and confidence indices, concentration
bounds with Monte Carlo verification, and the bandit simulation harness.
"""

from ._core import (
    Family,
    InstanceProfile,
    KlucbError,
    build_family,
    chernoff_bound,
    chernoff_constant,
    empirical_tail,
    family_from_json,
    family_to_json,
    g,
    iid_family,
    is_doeblin,
    kl_rate,
    kl_rate_direct,
    kl_rate_mean,
    klucb_index,
    lower_bound_constant,
    martingale_residual,
    maximal_bound,
    maximal_constant,
    mean_space,
    mean_to_natural,
    member,
    profile,
    proxy_gap_bound,
    proxy_regret,
    return_time,
    rho_two_state,
    simulate,
    stationary_mean,
    two_state_family,
    ucb_index,
)

__all__ = [
    "Family",
    "InstanceProfile",
    "KlucbError",
    "build_family",
    "chernoff_bound",
    "chernoff_constant",
    "empirical_tail",
    "family_from_json",
    "family_to_json",
    "g",
    "iid_family",
    "is_doeblin",
    "kl_rate",
    "kl_rate_direct",
    "kl_rate_mean",
    "klucb_index",
    "lower_bound_constant",
    "martingale_residual",
    "maximal_bound",
    "maximal_constant",
    "mean_space",
    "mean_to_natural",
    "member",
    "profile",
    "proxy_gap_bound",
    "proxy_regret",
    "return_time",
    "rho_two_state",
    "simulate",
    "stationary_mean",
    "two_state_family",
    "ucb_index",
]

__version__ = "0.1.0"
