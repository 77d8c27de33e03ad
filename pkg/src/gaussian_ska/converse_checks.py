"""Numerical checks of the converse machinery on exact Gaussian laws.

No sampling happens here. Each check evaluates closed forms and/or
log-determinants of explicit covariances and returns residuals; the sweep
helpers at the bottom report the worst residual over random parameter draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, WrongOrder
from .info_calc import LOG_2PIE, TestChannel, gaussian_cmi, gaussian_entropy, gaussian_entropy_terms, test_channel_covariance
from .region import ModelKind, boundary_point
from .source_model import ChannelOrder, SourceParams, classify

__all__ = [
    "VChainParams",
    "EpiCheckResult",
    "MarkovResiduals",
    "EpiSanity",
    "epi_chain_check",
    "epi_bound_h_y_given_uz",
    "boundary_consistency",
    "test_channel_entropy_check",
    "vchain_covariance",
    "markov_identity_check",
    "epi_sanity",
    "draw_decoder_stronger",
]


@dataclass(frozen=True)
class VChainParams:
    """V = U + N_v with Var(N_v) = beta, on top of the test channel."""

    tc: TestChannel
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta >= 0.0):
            raise InvalidParams(f"beta must be >= 0, got {self.beta!r}")


@dataclass(frozen=True)
class EpiCheckResult:
    h_XUZ_set: float
    epi_lower_bound: float
    numerator_lhs: float
    numerator_rhs: float
    gap_formula: float
    gap_residual: float
    identity_residual: float

    @property
    def inequality_holds(self) -> bool:
        return self.numerator_lhs >= self.numerator_rhs


@dataclass(frozen=True)
class MarkovResiduals:
    key_rate_identity: float
    leakage_identity: float
    I_YV_given_Z: float
    I_YU_given_V: float


@dataclass(frozen=True)
class EpiSanity:
    """Both sides of the conditional EPI step, divided by 2*pi*e."""

    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs


def _check(params: SourceParams):
    if classify(params) is not ChannelOrder.DECODER_STRONGER:
        raise WrongOrder("converse checks need rho1**2 > rho2**2")


def _tc(tc) -> TestChannel:
    return tc if isinstance(tc, TestChannel) else TestChannel(tc)


def epi_bound_h_y_given_uz(params: SourceParams, tc: TestChannel) -> float:
    """Lower bound on h(Y|U,Z) obtained after dropping the nonnegative gap."""
    _check(params)
    a, r1s, r2s = _tc(tc).alpha, params.rho1**2, params.rho2**2
    a1 = a * r1s + 1.0 - r1s
    a2 = a * r2s + 1.0 - r2s
    return 0.5 * (LOG_2PIE + math.log(a1 * (1.0 - r2s / r1s) / a2))


def epi_chain_check(params: SourceParams, tc: TestChannel) -> EpiCheckResult:
    _check(params)
    tc = _tc(tc)
    a, r1s, r2s = tc.alpha, params.rho1**2, params.rho2**2
    a1 = a * r1s + 1.0 - r1s
    a2 = a * r2s + 1.0 - r2s
    h_xuz = 0.5 * (LOG_2PIE + math.log(a * (1.0 - r2s) / a2))
    lhs = a * r1s * (1.0 - r2s) + (1.0 - r1s) * a2
    rhs = a1 * (1.0 - r2s / r1s)
    gap = (r2s / r1s) * (1.0 - r1s) * (2.0 * a * r1s + 1.0 - r1s)
    return EpiCheckResult(
        h_XUZ_set=h_xuz,
        epi_lower_bound=epi_bound_h_y_given_uz(params, tc),
        numerator_lhs=lhs,
        numerator_rhs=rhs,
        gap_formula=gap,
        gap_residual=(lhs - rhs) - gap,
        identity_residual=boundary_consistency(params, tc),
    )


def boundary_consistency(params: SourceParams, tc: TestChannel) -> float:
    """[h(Y|Z) - bound on h(Y|U,Z)] - RS_max(alpha); zero when the converse is tight."""
    _check(params)
    tc = _tc(tc)
    h_yz = gaussian_entropy_terms(params).h_Y_given_Z
    return (h_yz - epi_bound_h_y_given_uz(params, tc)) - boundary_point(params, ModelKind.GS, tc).RS_max


def test_channel_entropy_check(params: SourceParams, tc: TestChannel) -> float:
    """Schur-complement h(X|U,Z) minus the closed-form value used by the converse."""
    _check(params)
    tc = _tc(tc)
    cov = test_channel_covariance(params, tc)
    h_schur = gaussian_entropy(cov, [1], [0, 3])
    return h_schur - epi_chain_check(params, tc).h_XUZ_set



def vchain_covariance(params: SourceParams, vc: VChainParams) -> np.ndarray:
    """5x5 covariance of (V, U, X, Y, Z) for the chain V - U - X - Y - Z."""
    base = test_channel_covariance(params, vc.tc)
    su = 1.0 - vc.tc.alpha
    cov = np.empty((5, 5))
    cov[1:, 1:] = base
    # V = U + N_v shares every cross-covariance of U
    cov[0, 1:] = base[0]
    cov[1:, 0] = base[0]
    cov[0, 0] = su + vc.beta
    return cov


def markov_identity_check(params: SourceParams, vc: VChainParams) -> MarkovResiduals:
    """Residuals of the two rewrites used to drop the second auxiliary variable.

    key_rate_identity:
        [I(Y;U|V) - I(Z;U|V)] - [I(Y;U|Z) - I(Y;V|Z)]
    leakage_identity:
        [I(X;U,Y) - I(X;Y|V) + I(X;Z|V)] - [I(X;U|Y) + I(X;Z) + I(Y;V|Z)]
    """
    _check(params)
    cov = vchain_covariance(params, vc)
    V, U, X, Y, Z = range(5)
    i_yu_v = gaussian_cmi(cov, [Y], [U], [V])
    i_zu_v = gaussian_cmi(cov, [Z], [U], [V])
    i_yu_z = gaussian_cmi(cov, [Y], [U], [Z])
    i_yv_z = gaussian_cmi(cov, [Y], [V], [Z])
    i_x_uy = gaussian_cmi(cov, [X], [U, Y])
    i_xy_v = gaussian_cmi(cov, [X], [Y], [V])
    i_xz_v = gaussian_cmi(cov, [X], [Z], [V])
    i_xu_y = gaussian_cmi(cov, [X], [U], [Y])
    i_xz = gaussian_cmi(cov, [X], [Z])
    return MarkovResiduals(
        key_rate_identity=(i_yu_v - i_zu_v) - (i_yu_z - i_yv_z),
        leakage_identity=(i_x_uy - i_xy_v + i_xz_v) - (i_xu_y + i_xz + i_yv_z),
        I_YV_given_Z=i_yv_z,
        I_YU_given_V=i_yu_v,
    )


def epi_sanity(params: SourceParams, tc: TestChannel) -> EpiSanity:
    """Conditional EPI step evaluated on the exact test-channel law.

    lhs is exp(2 h(Y|U,Z)) / (2 pi e) from the Schur complement; rhs is
    rho1**2 exp(2 h(X|U,Z)) / (2 pi e) + Var(N_y). The EPI needs N_y
    independent of X given (U, Z). In the degraded law Z depends on N_y, so
    the relation is not guaranteed and in fact fails whenever rho2 != 0:
    lhs equals the post-gap bound and rhs - lhs is the gap over
    ``alpha rho2**2 + 1 - rho2**2``.
    """
    _check(params)
    tc = _tc(tc)
    cov = test_channel_covariance(params, tc)
    lhs = math.exp(2.0 * gaussian_entropy(cov, [2], [0, 3]) - LOG_2PIE)
    var_x = math.exp(2.0 * gaussian_entropy(cov, [1], [0, 3]) - LOG_2PIE)
    rhs = params.rho1**2 * var_x + (1.0 - params.rho1**2)
    return EpiSanity(lhs, rhs)


def draw_decoder_stronger(rng: np.random.Generator, size: int, rho_max: float = 0.99):
    """Random (rho1, rho2, alpha) with rho1**2 > rho2**2 and alpha in (0, 1].

    Returns three arrays of length ``size``.
    """
    r1 = rng.uniform(0.01, rho_max, size) * rng.choice([-1.0, 1.0], size)
    r2 = r1 * rng.uniform(-1.0, 1.0, size) * (1.0 - 1e-9)
    alpha = 1.0 - rng.uniform(0.0, 1.0, size)
    alpha = np.maximum(alpha, 1e-9)
    return r1, r2, alpha
