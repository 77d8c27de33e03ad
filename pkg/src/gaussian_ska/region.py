"""Secret-key / storage / privacy-leakage capacity regions.

Rates are in nats per symbol. When the decoder's channel is stronger the
region is a union over the test-channel parameter alpha in (0, 1] of boxes

    R_S <= RS_max(alpha),  R_J >= RJ_min(alpha),  R_L >= RL_min(alpha)

with all three curves strictly decreasing in alpha. Otherwise no key can be
generated and only the leakage floor I(X; Z) remains.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAlpha, WrongOrder
from .info_calc import TestChannel, mi_bundle, mi_bundle_arrays
from .source_model import ChannelOrder, SourceParams, classify, conditional_variances

__all__ = [
    "ModelKind",
    "RateTuple",
    "BoundarySample",
    "DegenerateRegion",
    "LimitedStorageReduction",
    "DEFAULT_TOL",
    "boundary_point",
    "theorem1_rates",
    "boundary_arrays",
    "theorem1_arrays",
    "degenerate_region",
    "rs_supremum",
    "alpha_for_key_rate",
    "membership_witness",
    "is_achievable",
    "default_alpha_grid",
    "trace_boundary",
    "reduction_limited_storage",
]

DEFAULT_TOL = 1e-9


class ModelKind(enum.Enum):
    GS = "gs"
    CS = "cs"


@dataclass(frozen=True)
class RateTuple:
    R_S: float
    R_J: float
    R_L: float

    def __post_init__(self):
        for name in ("R_S", "R_J", "R_L"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")


@dataclass(frozen=True)
class BoundarySample:
    alpha: float
    RS_max: float
    RJ_min: float
    RL_min: float

    def as_tuple(self) -> RateTuple:
        return RateTuple(max(self.RS_max, 0.0), max(self.RJ_min, 0.0), max(self.RL_min, 0.0))


@dataclass(frozen=True)
class DegenerateRegion:
    """Region when rho1**2 <= rho2**2: R_S = 0, R_J >= 0, R_L >= RL_min."""

    RS_exact: float
    RJ_min: float
    RL_min: float

    def contains(self, t: RateTuple, tol: float = DEFAULT_TOL) -> bool:
        # the key rate is an equality constraint, no tolerance on it
        return t.R_S == 0.0 and t.R_J >= 0.0 and t.R_L >= self.RL_min - tol


@dataclass(frozen=True)
class LimitedStorageReduction:
    alpha_implied: float
    RS_from_eq17: float
    RS_from_corollary: float


def _require_decoder_stronger(params: SourceParams):
    if classify(params) is not ChannelOrder.DECODER_STRONGER:
        raise WrongOrder("rho1**2 <= rho2**2: use degenerate_region")


def _as_tc(tc) -> TestChannel:
    return tc if isinstance(tc, TestChannel) else TestChannel(tc)


def boundary_point(params: SourceParams, model: ModelKind, tc: TestChannel) -> BoundarySample:
    """Closed-form corner of the box for one alpha."""
    _require_decoder_stronger(params)
    tc = _as_tc(tc)
    a, r1s, r2s = tc.alpha, params.rho1**2, params.rho2**2
    a1 = a * r1s + 1.0 - r1s
    a2 = a * r2s + 1.0 - r2s
    rs = 0.5 * math.log(a2 / a1)
    if model is ModelKind.GS:
        rj = 0.5 * math.log(a1 / a)
    else:
        rj = 0.5 * math.log(a2 / a)
    rl = 0.5 * math.log(a1 / (a * (1.0 - r2s)))
    return BoundarySample(a, rs, rj, rl)


def theorem1_rates(params: SourceParams, model: ModelKind, tc: TestChannel) -> BoundarySample:
    """Same corner computed from conditional mutual informations."""
    _require_decoder_stronger(params)
    tc = _as_tc(tc)
    mi = mi_bundle(params, tc)
    rj = mi.I_XU_given_Y if model is ModelKind.GS else mi.I_XU_given_Z
    return BoundarySample(tc.alpha, mi.I_YU_given_Z, rj, mi.I_XU_given_Y + mi.I_XZ)


def boundary_arrays(rho1, rho2, alpha, model: ModelKind) -> dict:
    """Vectorised ``boundary_point``; inputs are not validated."""
    r1s, r2s, a = (np.asarray(v, dtype=float) ** p for v, p in ((rho1, 2), (rho2, 2), (alpha, 1)))
    a1 = a * r1s + 1.0 - r1s
    a2 = a * r2s + 1.0 - r2s
    rj = 0.5 * np.log((a1 if model is ModelKind.GS else a2) / a)
    return {
        "RS_max": 0.5 * np.log(a2 / a1),
        "RJ_min": rj,
        "RL_min": 0.5 * np.log(a1 / (a * (1.0 - r2s))),
    }


def theorem1_arrays(rho1, rho2, alpha, model: ModelKind) -> dict:
    """Vectorised ``theorem1_rates``; inputs are not validated."""
    mi = mi_bundle_arrays(rho1, rho2, alpha)
    return {
        "RS_max": mi["I_YU_given_Z"],
        "RJ_min": mi["I_XU_given_Y"] if model is ModelKind.GS else mi["I_XU_given_Z"],
        "RL_min": mi["I_XU_given_Y"] + mi["I_XZ"],
    }


def degenerate_region(params: SourceParams) -> DegenerateRegion:
    if classify(params) is not ChannelOrder.EAVESDROPPER_STRONGER:
        raise WrongOrder("rho1**2 > rho2**2: the region is not degenerate")
    return DegenerateRegion(0.0, 0.0, 0.5 * math.log(1.0 / (1.0 - params.rho2**2)))


def rs_supremum(params: SourceParams) -> float:
    """Limit of RS_max as alpha -> 0 (never attained)."""
    _require_decoder_stronger(params)
    return 0.5 * math.log((1.0 - params.rho2**2) / (1.0 - params.rho1**2))


def _rs_curve(params: SourceParams, alpha: float) -> float:
    r1s, r2s = params.rho1**2, params.rho2**2
    return 0.5 * math.log((alpha * r2s + 1.0 - r2s) / (alpha * r1s + 1.0 - r1s))


def _bisect_alpha(params: SourceParams, target: float) -> float:
    """Largest alpha with RS_max(alpha) >= target, by bisection."""
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _rs_curve(params, mid) >= target:
            lo = mid
        else:
            hi = mid
    return lo


def alpha_for_key_rate(params: SourceParams, rs: float) -> float | None:
    """Largest alpha in (0, 1] whose key-rate bound is at least ``rs``.

    Returns None when ``rs`` reaches the supremum, i.e. no alpha works.
    """
    _require_decoder_stronger(params)
    if rs <= 0.0:
        return 1.0
    if rs >= rs_supremum(params):
        return None
    c = math.exp(2.0 * rs)
    r1s, r2s = params.rho1**2, params.rho2**2
    alpha = 1.0 - (c - 1.0) / (c * r1s - r2s)
    if not (0.0 < alpha <= 1.0) or alpha < 1e-12:
        alpha = _bisect_alpha(params, rs)
        return alpha if alpha >= 1e-12 else None
    if _rs_curve(params, alpha) < rs:
        # rounding pushed the inverse just past the curve; step back inside
        alpha = _bisect_alpha(params, rs)
    return alpha


def membership_witness(params: SourceParams, model: ModelKind, t: RateTuple, tol: float = DEFAULT_TOL):
    """An alpha certifying ``t`` is achievable, or None.

    In the degenerate ordering the witness is reported as 1.0 (U constant).
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    if classify(params) is ChannelOrder.EAVESDROPPER_STRONGER:
        return 1.0 if degenerate_region(params).contains(t, tol) else None
    alpha = alpha_for_key_rate(params, max(t.R_S - tol, 0.0))
    if alpha is None:
        return None
    b = boundary_point(params, model, TestChannel(alpha))
    if t.R_J >= b.RJ_min - tol and t.R_L >= b.RL_min - tol:
        return alpha
    return None


def is_achievable(params: SourceParams, model: ModelKind, t: RateTuple, tol: float = DEFAULT_TOL) -> bool:
    return membership_witness(params, model, t, tol) is not None


def default_alpha_grid(num: int = 64, lo: float = 1e-4) -> np.ndarray:
    return np.logspace(math.log10(lo), 0.0, num)


def trace_boundary(params: SourceParams, model: ModelKind, alpha_grid) -> list[BoundarySample]:
    grid = np.asarray(alpha_grid, dtype=float).ravel()
    if grid.size == 0:
        raise InvalidAlpha("empty alpha grid")
    return [boundary_point(params, model, TestChannel(float(a))) for a in grid]


def reduction_limited_storage(params: SourceParams, R_J: float) -> LimitedStorageReduction:
    """Best key rate at storage rate R_J when leakage is unconstrained.

    Evaluated twice: through the alpha implied by saturating the GS storage
    bound, and through the conditional-variance expression.
    """
    _require_decoder_stronger(params)
    if R_J < 0:
        raise ValueError("R_J must be >= 0")
    r1s = params.rho1**2
    alpha = (1.0 - r1s) / (math.exp(2.0 * R_J) - r1s)
    cv = conditional_variances(params)
    e = math.exp(-2.0 * R_J)
    rs17 = 0.5 * math.log((cv.var_y_given_xz * e + cv.var_y_given_z * (1.0 - e)) / cv.var_y_given_xz)
    # alpha may fall below the TestChannel floor for large R_J; use the curve directly
    rs_cor = _rs_curve(params, alpha)
    return LimitedStorageReduction(alpha, rs17, rs_cor)
