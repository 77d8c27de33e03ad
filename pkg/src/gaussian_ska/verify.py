"""Randomized identity and inequality sweeps behind the ``verify`` command."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import converse_checks as cc
from . import region
from .info_calc import TestChannel
from .source_model import SourceParams, degraded_covariance, original_covariance, schur_complement, trial_rng, conditional_variances

__all__ = ["CheckResult", "run_all", "CHECKS"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    tol: float
    draws: int

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_residual) and self.max_residual <= self.tol)


def _draws(seed, stream, size, rho_max):
    return cc.draw_decoder_stronger(trial_rng(seed, stream), size, rho_max)


def check_equivalence(draws, seed, rho_max):
    r1, r2, a = _draws(seed, 1, draws, rho_max)
    worst = 0.0
    for model in region.ModelKind:
        closed = region.boundary_arrays(r1, r2, a, model)
        chain = region.theorem1_arrays(r1, r2, a, model)
        for key in closed:
            worst = max(worst, float(np.max(np.abs(closed[key] - chain[key]))))
    return CheckResult("closed_form_vs_mi_chain", worst, 1e-10, draws)


def check_limited_storage(draws, seed, rho_max):
    r1, r2, _ = _draws(seed, 2, draws, rho_max)
    rj = trial_rng(seed, 2, 1).uniform(0.0, 5.0, draws)
    worst = 0.0
    for x, y, s in zip(r1, r2, rj):
        p = SourceParams(x, y)
        red = region.reduction_limited_storage(p, s)
        worst = max(worst, abs(red.RS_from_eq17 - red.RS_from_corollary))
    return CheckResult("limited_storage_reduction", worst, 1e-10, draws)


def check_limited_storage_limits(draws, seed, rho_max):
    r1, r2, _ = _draws(seed, 3, draws, rho_max)
    worst = 0.0
    for x, y in zip(r1, r2):
        p = SourceParams(x, y)
        worst = max(worst, abs(region.reduction_limited_storage(p, 0.0).RS_from_eq17))
        worst = max(worst, abs(region.reduction_limited_storage(p, 20.0).RS_from_eq17 - region.rs_supremum(p)))
    return CheckResult("limited_storage_limits", worst, 1e-6, draws)


def check_degraded_marginals(draws, seed, rho_max):
    g = trial_rng(seed, 4)
    r = g.uniform(-rho_max, rho_max, (draws, 2))
    worst = 0.0
    for x, y in r:
        if x == 0.0 or y == 0.0:
            continue
        p = SourceParams(x, y)
        o, d = original_covariance(p), degraded_covariance(p)
        for pair in ("xy", "xz"):
            worst = max(worst, float(np.max(np.abs(o.submatrix(*pair) - d.submatrix(*pair)))))
        m = d.matrix
        # Markov factorization through the middle variable
        if p.decoder_stronger:
            worst = max(worst, abs(m[0, 2] - m[0, 1] * m[1, 2]))
        else:
            worst = max(worst, abs(m[0, 1] - m[0, 2] * m[1, 2]))
    return CheckResult("degraded_marginals", worst, 1e-15, draws)


def check_conditional_variances(draws, seed, rho_max):
    r1, r2, _ = _draws(seed, 5, draws, rho_max)
    worst = 0.0
    for x, y in zip(r1, r2):
        p = SourceParams(x, y)
        cv = conditional_variances(p)
        m = degraded_covariance(p).matrix
        worst = max(
            worst,
            abs(cv.var_y_given_z - schur_complement(m, [1], [2])[0, 0]),
            abs(cv.var_y_given_xz - schur_complement(m, [1], [0, 2])[0, 0]),
            abs(cv.var_x_given_z - schur_complement(m, [0], [2])[0, 0]),
        )
    return CheckResult("conditional_variances_schur", worst, 1e-12, draws)


def check_epi_numerator(draws, seed, rho_max):
    r1, r2, a = _draws(seed, 6, draws, rho_max)
    worst = 0.0
    for x, y, al in zip(r1, r2, a):
        res = cc.epi_chain_check(SourceParams(x, y), TestChannel(al))
        worst = max(worst, abs(res.gap_residual))
        if not res.inequality_holds:
            worst = math.inf
    return CheckResult("epi_numerator_gap", worst, 1e-12, draws)


def check_boundary_consistency(draws, seed, rho_max):
    r1, r2, a = _draws(seed, 7, draws, rho_max)
    worst = max(abs(cc.boundary_consistency(SourceParams(x, y), TestChannel(al))) for x, y, al in zip(r1, r2, a))
    return CheckResult("epi_boundary_consistency", worst, 1e-10, draws)


def check_test_channel_entropy(draws, seed, rho_max):
    r1, r2, a = _draws(seed, 8, draws, rho_max)
    worst = max(abs(cc.test_channel_entropy_check(SourceParams(x, y), TestChannel(al))) for x, y, al in zip(r1, r2, a))
    return CheckResult("test_channel_entropy", worst, 1e-12, draws)


def check_markov_identities(draws, seed, rho_max):
    r1, r2, a = _draws(seed, 9, draws, rho_max)
    betas = list(trial_rng(seed, 9, 1).exponential(1.0, draws))
    # pin the edge cases onto the first draws
    betas[:2] = [0.0, 1e6][: min(2, draws)]
    worst = 0.0
    for x, y, al, b in zip(r1, r2, a, betas):
        res = cc.markov_identity_check(SourceParams(x, y), cc.VChainParams(TestChannel(al), b))
        worst = max(worst, abs(res.key_rate_identity), abs(res.leakage_identity))
        if res.I_YV_given_Z < -1e-12:
            worst = math.inf
    return CheckResult("converse_markov_identities", worst, 1e-10, draws)


def check_region_structure(draws, seed, rho_max):
    r1, r2, a = _draws(seed, 10, draws, rho_max)
    gs = region.boundary_arrays(r1, r2, a, region.ModelKind.GS)
    cs = region.boundary_arrays(r1, r2, a, region.ModelKind.CS)
    i_xz = 0.5 * np.log(1.0 / (1.0 - r2**2))
    worst = float(np.max(np.abs(gs["RL_min"] - gs["RJ_min"] - i_xz)))
    worst = max(worst, float(np.max(np.abs(gs["RS_max"] - cs["RS_max"]))), float(np.max(np.abs(gs["RL_min"] - cs["RL_min"]))))
    if np.any(cs["RJ_min"] < gs["RJ_min"] - 1e-15):
        worst = math.inf
    return CheckResult("region_structure", worst, 1e-12, draws)


CHECKS = [
    (check_equivalence, 1),
    (check_limited_storage, 10),
    (check_limited_storage_limits, 10),
    (check_degraded_marginals, 10),
    (check_conditional_variances, 10),
    (check_epi_numerator, 1),
    (check_boundary_consistency, 1),
    (check_test_channel_entropy, 1),
    (check_markov_identities, 10),
    (check_region_structure, 1),
]


def run_all(draws: int = 10_000, seed: int = 0, rho_max: float = 0.99) -> list[CheckResult]:
    """Run every sweep; the second entry of each CHECKS row thins the draw count."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    return [fn(max(1, draws // thin), seed, rho_max) for fn, thin in CHECKS]
