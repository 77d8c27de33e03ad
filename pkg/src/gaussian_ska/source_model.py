"""Jointly Gaussian source triple (X, Y, Z) and its degraded equivalents.

X is the enrolled identifier, Y the observation at the legitimate decoder
and Z the eavesdropper's observation. All three have unit variance::

    Y = rho1 * X + N_y,    N_y ~ N(0, 1 - rho1**2)
    Z = rho2 * X + N_2,    N_2 ~ N(0, 1 - rho2**2)

Every rate quantity downstream is computed on the degraded-equivalent triple,
which keeps the (X, Y) and (X, Z) pair laws intact but makes the triple a
Markov chain (X - Y - Z when the decoder is stronger, X - Z - Y otherwise).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannel, InvalidParams, NotPSD, WrongOrder

__all__ = [
    "SourceParams",
    "ChannelOrder",
    "CovarianceVariant",
    "JointCovariance",
    "ConditionalVariances",
    "classify",
    "original_covariance",
    "degraded_covariance",
    "conditional_variances",
    "schur_complement",
    "sample_joint",
    "trial_rng",
]


class ChannelOrder(enum.Enum):
    DECODER_STRONGER = "decoder_stronger"
    EAVESDROPPER_STRONGER = "eavesdropper_stronger"


class CovarianceVariant(enum.Enum):
    ORIGINAL = "original"
    DEGRADED = "degraded"


@dataclass(frozen=True)
class SourceParams:
    """Correlation coefficients of the decoder and eavesdropper channels."""

    rho1: float
    rho2: float

    def __post_init__(self):
        for name in ("rho1", "rho2"):
            value = getattr(self, name)
            if not np.isfinite(value) or abs(value) >= 1.0:
                raise InvalidParams(f"|{name}| must be < 1, got {value!r}")
        object.__setattr__(self, "rho1", float(self.rho1))
        object.__setattr__(self, "rho2", float(self.rho2))

    @property
    def order(self) -> ChannelOrder:
        return classify(self)

    @property
    def decoder_stronger(self) -> bool:
        return self.rho1**2 > self.rho2**2


@dataclass(frozen=True, eq=False)
class JointCovariance:
    """3x3 covariance of (X, Y, Z) plus the construction it came from."""

    matrix: np.ndarray
    variant: CovarianceVariant

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def submatrix(self, a: str, b: str) -> np.ndarray:
        """2x2 block for two of the names 'x', 'y', 'z'."""
        idx = ["xyz".index(a), "xyz".index(b)]
        return self.matrix[np.ix_(idx, idx)]


@dataclass(frozen=True)
class ConditionalVariances:
    var_y_given_z: float
    var_y_given_xz: float
    var_x_given_z: float


def classify(params: SourceParams) -> ChannelOrder:
    """Channel ordering; the tie rho1**2 == rho2**2 goes to the eavesdropper."""
    if params.rho1**2 > params.rho2**2:
        return ChannelOrder.DECODER_STRONGER
    return ChannelOrder.EAVESDROPPER_STRONGER


def _cov3(exy: float, exz: float, eyz: float) -> np.ndarray:
    return np.array(
        [
            [1.0, exy, exz],
            [exy, 1.0, eyz],
            [exz, eyz, 1.0],
        ]
    )


def original_covariance(params: SourceParams) -> JointCovariance:
    r1, r2 = params.rho1, params.rho2
    return JointCovariance(_cov3(r1, r2, r1 * r2), CovarianceVariant.ORIGINAL)


def degraded_covariance(params: SourceParams) -> JointCovariance:
    """Covariance of the degraded-equivalent triple.

    Decoder stronger: ``Z' = (rho2/rho1) Y + N_z`` with
    ``Var(N_z) = 1 - rho2**2/rho1**2``.

    Eavesdropper stronger: ``Y' = (rho1/rho2) Z + N'`` with
    ``Var(N') = 1 - rho1**2/rho2**2``. The extra noise keeps ``Var(Y') = 1``
    so that the (X, Y) pair law is unchanged.
    """
    r1, r2 = params.rho1, params.rho2
    if classify(params) is ChannelOrder.DECODER_STRONGER:
        if r1 == 0.0:
            raise DegenerateChannel("rho1 must be nonzero")
        eyz = r2 / r1
    else:
        if r2 == 0.0:
            raise DegenerateChannel("rho2 must be nonzero")
        eyz = r1 / r2
    return JointCovariance(_cov3(r1, r2, eyz), CovarianceVariant.DEGRADED)


def schur_complement(cov: np.ndarray, keep, given) -> np.ndarray:
    """Conditional covariance of the ``keep`` coordinates given ``given``.

    Singular conditioning blocks are handled with a pseudo-inverse, which is
    the correct Gaussian conditional when ``given`` has redundant entries.
    """
    cov = np.asarray(cov, dtype=float)
    keep = list(keep)
    given = list(given)
    s_kk = cov[np.ix_(keep, keep)]
    if not given:
        return s_kk.copy()
    s_kg = cov[np.ix_(keep, given)]
    s_gg = cov[np.ix_(given, given)]
    try:
        c = np.linalg.cholesky(s_gg)
        w = np.linalg.solve(c, s_kg.T)
        return s_kk - w.T @ w
    except np.linalg.LinAlgError:
        return s_kk - s_kg @ np.linalg.pinv(s_gg, rcond=1e-12, hermitian=True) @ s_kg.T


def conditional_variances(params: SourceParams) -> ConditionalVariances:
    """Var[Y|Z], Var[Y|X,Z] and Var[X|Z] under the degraded law."""
    if classify(params) is not ChannelOrder.DECODER_STRONGER:
        raise WrongOrder("conditional variances need rho1**2 > rho2**2")
    r1s, r2s = params.rho1**2, params.rho2**2
    # closed forms; the Schur complement of degraded_covariance agrees
    return ConditionalVariances(
        var_y_given_z=(r1s - r2s) / r1s,
        var_y_given_xz=(1.0 - r1s) * (r1s - r2s) / (r1s * (1.0 - r2s)),
        var_x_given_z=1.0 - r2s,
    )


def trial_rng(seed: int, *counters: int) -> np.random.Generator:
    """Generator keyed by ``seed`` and a tuple of counters.

    Streams for different counters are independent, so work can be split
    into blocks in any order without changing results.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(c) for c in counters)))


def _factor(matrix: np.ndarray) -> np.ndarray:
    """Lower factor L with L @ L.T == matrix, allowing semidefinite input."""
    try:
        lower = np.linalg.cholesky(matrix)
        # a near-zero pivot means rank deficiency; eigh keeps exact linear relations tighter
        if np.diag(lower).min() > 1e-6 * math.sqrt(np.diag(matrix).max()):
            return lower
    except np.linalg.LinAlgError:
        pass
    w, v = np.linalg.eigh(matrix)
    if w.min() < -1e-10 * max(1.0, w.max()):
        raise NotPSD(f"matrix is not positive semidefinite (min eigenvalue {w.min():.3g})")
    # numerically null directions are dropped so exact relations survive sampling
    w = np.where(w > 1e-12 * max(1.0, w.max()), w, 0.0)
    return v * np.sqrt(w)


def sample_joint(cov: JointCovariance | np.ndarray, n: int, trials: int, seed: int, first_trial: int = 0):
    """Draw ``trials`` independent blocks of ``n`` i.i.d. (x, y, z) symbols.

    Trial ``t`` uses its own generator derived from ``(seed, t)``; asking for
    trials 0..9 in one call or in two calls gives the same numbers.

    Returns
    -------
    x, y, z : ndarray, shape (trials, n)
    """
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be >= 1")
    m = cov.matrix if isinstance(cov, JointCovariance) else np.asarray(cov, dtype=float)
    if not np.allclose(m, m.T):
        raise NotPSD("covariance must be symmetric")
    lower = _factor(m)
    out = np.empty((trials, n, 3))
    for k in range(trials):
        g = trial_rng(seed, first_trial + k)
        out[k] = g.standard_normal((n, 3)) @ lower.T
    return out[..., 0], out[..., 1], out[..., 2]
