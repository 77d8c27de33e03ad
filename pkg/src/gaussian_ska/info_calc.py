"""Gaussian information quantities for the scalar test channel.

The auxiliary variable is U ~ N(0, 1 - alpha) with X = U + Theta and
Theta ~ N(0, alpha) independent of U. Mutual informations are obtained from
log-determinants of conditional covariances of the joint law of
(U, X, Y, Z); the closed forms in ``closed_form_mi`` serve as the
independent check. Everything is in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAlpha, NotPSD, WrongOrder
from .source_model import ChannelOrder, SourceParams, classify, schur_complement, trial_rng

__all__ = [
    "ALPHA_FLOOR",
    "TestChannel",
    "MIBundle",
    "EntropyTerms",
    "MIEstimate",
    "gaussian_cmi",
    "gaussian_entropy",
    "test_channel_covariance",
    "closed_form_mi",
    "mi_bundle",
    "mi_bundle_arrays",
    "gaussian_entropy_terms",
    "mc_mi_estimate",
]

ALPHA_FLOOR = 1e-12
LOG_2PIE = math.log(2.0 * math.pi * math.e)

# index order of test_channel_covariance
U, X, Y, Z = 0, 1, 2, 3


@dataclass(frozen=True)
class TestChannel:
    """Variance split X = U + Theta with Var(Theta) = alpha."""

    __test__ = False  # keep pytest from collecting this class

    alpha: float

    def __post_init__(self):
        a = self.alpha
        if not (np.isfinite(a) and ALPHA_FLOOR <= a <= 1.0):
            raise InvalidAlpha(f"alpha must lie in (0, 1], got {a!r}")
        object.__setattr__(self, "alpha", float(a))


@dataclass(frozen=True)
class MIBundle:
    I_XU: float
    I_YU: float
    I_ZU: float
    I_YU_given_Z: float
    I_XU_given_Y: float
    I_XU_given_Z: float
    I_XZ: float
    I_YZ: float


@dataclass(frozen=True)
class EntropyTerms:
    h_Y_given_Z: float
    h_X_given_Z: float


@dataclass(frozen=True)
class MIEstimate:
    estimate: float
    stderr: float
    samples: int


def _logdet_psd(m: np.ndarray, rtol: float = 1e-13):
    """log-det restricted to the numerically nonzero eigen-directions."""
    if m.size == 0:
        return 0.0, np.zeros((m.shape[0], 0))
    w, v = np.linalg.eigh(m)
    scale = max(1.0, float(np.abs(w).max()))
    if w.min() < -1e-9 * scale:
        raise NotPSD(f"conditional covariance has eigenvalue {w.min():.3g}")
    keep = w > rtol * scale
    return float(np.sum(np.log(w[keep]))), v[:, keep]


def gaussian_cmi(cov, a, b, given=()) -> float:
    """I(A; B | C) for jointly Gaussian coordinates, in nats.

    Coordinates that are deterministic given C carry no information and are
    projected out, so redundant variables (e.g. V = U) are allowed.
    """
    a, b, given = list(a), list(b), list(given)
    cond = schur_complement(cov, a + b, given)
    cond = 0.5 * (cond + cond.T)
    na = len(a)
    _, va = _logdet_psd(cond[:na, :na])
    _, vb = _logdet_psd(cond[na:, na:])
    proj = np.zeros((cond.shape[0], va.shape[1] + vb.shape[1]))
    proj[:na, : va.shape[1]] = va
    proj[na:, va.shape[1] :] = vb
    reduced = proj.T @ cond @ proj
    ka = va.shape[1]
    ld_a = np.linalg.slogdet(reduced[:ka, :ka])[1] if ka else 0.0
    ld_b = np.linalg.slogdet(reduced[ka:, ka:])[1] if reduced.shape[0] > ka else 0.0
    sign, ld_ab = np.linalg.slogdet(reduced)
    if sign <= 0:
        return math.inf
    return 0.5 * (ld_a + ld_b - ld_ab)


def gaussian_entropy(cov, a, given=()) -> float:
    """Differential entropy h(A | C) in nats."""
    cond = schur_complement(cov, list(a), list(given))
    sign, logdet = np.linalg.slogdet(cond)
    if sign <= 0:
        raise NotPSD("conditional covariance is singular; entropy is -inf")
    return 0.5 * (len(cond) * LOG_2PIE + logdet)


def _test_channel_cov_arrays(rho1, rho2, alpha) -> np.ndarray:
    r1, r2, a = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (rho1, rho2, alpha)))
    su = 1.0 - a
    ryz = r2 / r1
    cov = np.empty(r1.shape + (4, 4))
    rows = [
        [su, su, r1 * su, r2 * su],
        [su, np.ones_like(a), r1, r2],
        [r1 * su, r1, np.ones_like(a), ryz],
        [r2 * su, r2, ryz, np.ones_like(a)],
    ]
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            cov[..., i, j] = v
    return cov


def test_channel_covariance(params: SourceParams, tc: TestChannel) -> np.ndarray:
    """4x4 covariance of (U, X, Y, Z) under the degraded law X - Y - Z."""
    if classify(params) is not ChannelOrder.DECODER_STRONGER:
        raise WrongOrder("the test-channel chain U - X - Y - Z needs rho1**2 > rho2**2")
    return _test_channel_cov_arrays(params.rho1, params.rho2, tc.alpha)


def _pair_cmi(cov: np.ndarray, a: int, b: int, c: int | None = None) -> np.ndarray:
    """I(A;B|C) for scalar coordinates of a (batched) covariance.

    Uses the partial covariance of (A, B) given C. A coordinate with zero
    conditional variance is constant and contributes zero information.
    """
    saa, sbb, sab = cov[..., a, a], cov[..., b, b], cov[..., a, b]
    if c is not None:
        scc = cov[..., c, c]
        sac, sbc = cov[..., a, c], cov[..., b, c]
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(scc > 0, 1.0 / scc, 0.0)
        saa = saa - sac * sac * inv
        sbb = sbb - sbc * sbc * inv
        sab = sab - sac * sbc * inv
    denom = saa * sbb
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(denom > 0, sab * sab / denom, 0.0)
    return -0.5 * np.log1p(-np.minimum(r2, 1.0))


def closed_form_mi(params: SourceParams, tc: TestChannel) -> dict:
    """Test-channel informations straight from their closed forms."""
    a, r1s, r2s = tc.alpha, params.rho1**2, params.rho2**2
    i_xu = 0.5 * math.log(1.0 / a)
    i_yu = 0.5 * math.log(1.0 / (a * r1s + 1.0 - r1s))
    i_zu = 0.5 * math.log(1.0 / (a * r2s + 1.0 - r2s))
    return {"I_XU": i_xu, "I_YU": i_yu, "I_ZU": i_zu, "I_XZ": 0.5 * math.log(1.0 / (1.0 - r2s))}


def mi_bundle_arrays(rho1, rho2, alpha) -> dict:
    """Vectorised ``mi_bundle`` over broadcastable parameter arrays.

    No ordering or range validation; callers pass rho1**2 > rho2**2 and
    alpha in (0, 1].
    """
    cov = _test_channel_cov_arrays(rho1, rho2, alpha)
    return {
        "I_XU": _pair_cmi(cov, X, U),
        "I_YU": _pair_cmi(cov, Y, U),
        "I_ZU": _pair_cmi(cov, Z, U),
        "I_YU_given_Z": _pair_cmi(cov, Y, U, Z),
        "I_XU_given_Y": _pair_cmi(cov, X, U, Y),
        "I_XU_given_Z": _pair_cmi(cov, X, U, Z),
        "I_XZ": _pair_cmi(cov, X, Z),
        "I_YZ": _pair_cmi(cov, Y, Z),
    }


def mi_bundle(params: SourceParams, tc: TestChannel) -> MIBundle:
    """All test-channel mutual informations, from the (U, X, Y, Z) covariance."""
    if classify(params) is not ChannelOrder.DECODER_STRONGER:
        raise WrongOrder("the test-channel chain U - X - Y - Z needs rho1**2 > rho2**2")
    vals = mi_bundle_arrays(params.rho1, params.rho2, tc.alpha)
    return MIBundle(**{k: float(v) for k, v in vals.items()})


def gaussian_entropy_terms(params: SourceParams) -> EntropyTerms:
    if classify(params) is not ChannelOrder.DECODER_STRONGER:
        raise WrongOrder("needs rho1**2 > rho2**2")
    r1s, r2s = params.rho1**2, params.rho2**2
    return EntropyTerms(
        h_Y_given_Z=0.5 * (LOG_2PIE + math.log(1.0 - r2s / r1s)),
        h_X_given_Z=0.5 * (LOG_2PIE + math.log(1.0 - r2s)),
    )


_MI_BLOCK = 1 << 16


def mc_mi_estimate(cov, samples: int, seed: int) -> MIEstimate:
    """Monte-Carlo estimate of the mutual information of a bivariate Gaussian.

    Uses the sample correlation r in ``-0.5 * log(1 - r**2)``. Samples are
    drawn in fixed-size blocks with their own seeds and reduced through
    running sums, so the result does not depend on how blocks are scheduled.

    The standard error is a second-order delta-method value: with
    ``s2 = (1 - r**2)**2 / N`` the variance of r,
    ``var = f'(r)**2 s2 + f''(r)**2 s2**2 / 2``. The second term keeps the
    error bar from collapsing to zero at r = 0, where the estimator is a
    scaled chi-square.
    """
    if samples < 1000:
        raise ValueError("mc_mi_estimate needs at least 1000 samples")
    c = np.asarray(cov, dtype=float)
    if c.shape != (2, 2) or not np.allclose(c, c.T):
        raise NotPSD("expected a symmetric 2x2 covariance")
    try:
        lower = np.linalg.cholesky(c)
    except np.linalg.LinAlgError as exc:
        raise NotPSD("covariance is not positive definite") from exc

    sums = np.zeros(5)  # sx, sy, sxx, syy, sxy
    done = 0
    block = 0
    while done < samples:
        m = min(_MI_BLOCK, samples - done)
        xy = trial_rng(seed, block).standard_normal((m, 2)) @ lower.T
        x, y = xy[:, 0], xy[:, 1]
        sums += [x.sum(), y.sum(), x @ x, y @ y, x @ y]
        done += m
        block += 1
    n = float(samples)
    mx, my = sums[0] / n, sums[1] / n
    vxx = sums[2] / n - mx * mx
    vyy = sums[3] / n - my * my
    vxy = sums[4] / n - mx * my
    r = vxy / math.sqrt(vxx * vyy)
    one_m = 1.0 - r * r
    est = -0.5 * math.log(one_m)
    s2 = one_m**2 / n
    d1 = r / one_m
    d2 = (1.0 + r * r) / one_m**2
    stderr = math.sqrt(d1 * d1 * s2 + 0.5 * d2 * d2 * s2 * s2)
    return MIEstimate(estimate=est, stderr=stderr, samples=samples)
