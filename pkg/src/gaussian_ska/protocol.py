"""Finite-blocklength simulation of the random-binning key agreement scheme.

Enrollment quantizes x^n to a codeword of a random Gaussian codebook,
publishes the codeword's bin index j as helper data and extracts the key
s = f(index) with an affine 2-universal hash. Authentication searches bin j
for the unique codeword whose information density with y^n clears a
threshold. In the chosen-secret model the extracted key is a one-time pad
for an independently drawn secret.

All randomness flows from ``ProtocolConfig.seed`` through counter-derived
streams (codebook, trial blocks, leakage outer samples), so results do not
depend on chunking or evaluation order.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from sympy import nextprime

from .errors import LengthMismatch, OutOfRange, RatesInfeasible, TooLarge, Underpowered, WrongOrder
from .info_calc import MIBundle, TestChannel, mi_bundle, test_channel_covariance
from .region import ModelKind
from .source_model import ChannelOrder, SourceParams, classify, degraded_covariance, sample_joint, trial_rng

__all__ = [
    "EncoderMode",
    "DensityPair",
    "ProtocolConfig",
    "TypicalityThresholds",
    "AffineHash",
    "Codebook",
    "Encoding",
    "Decoding",
    "SimReport",
    "LeakageEstimate",
    "draw_hash",
    "build_codebook",
    "info_density",
    "pairwise_density",
    "encode",
    "encode_batch",
    "decode",
    "decode_batch",
    "otp_mask",
    "otp_unmask",
    "run_trials",
    "estimate_secrecy_leakage",
    "privacy_leakage_budget",
    "plugin_entropy",
]

DEFAULT_MAX_SYMBOLS = 1 << 22
TRIAL_BLOCK = 64
# cap on elements of one (rows, Q) density matrix
_CHUNK_ELEMS = 1 << 21

_STREAM_CODEBOOK = 1
_STREAM_TRIALS = 2
_STREAM_LEAK = 3
_STREAM_ENCODE = 4


class EncoderMode(enum.Enum):
    FAITHFUL = "faithful"
    GREEDY = "greedy"


class DensityPair(enum.Enum):
    U_X = "U-X"
    U_Y = "U-Y"
    U_XZ = "U-XZ"


@dataclass(frozen=True)
class TypicalityThresholds:
    """Per-symbol thresholds in nats.

    t_T caps the quantizer density, t_A is the decoder's acceptance level
    and t_B is the B_n level (diagnostic only). ``cover_floor`` is the
    lowest density the Greedy quantizer accepts: a codeword must be more
    likely under p(u|x) than under p(u), otherwise x is not covered and the
    encoder falls back to (j, s) = (1, 1).
    """

    t_T: float
    t_A: float
    t_B: float
    cover_floor: float


@dataclass(frozen=True)
class ProtocolConfig:
    params: SourceParams
    tc: TestChannel
    n: int
    gamma: float
    seed: int = 0
    encoder_mode: EncoderMode = EncoderMode.GREEDY
    model: ModelKind = ModelKind.GS
    max_symbols: int = DEFAULT_MAX_SYMBOLS
    # M_S / M_J overrides for degenerate test configurations
    n_keys: int | None = None
    n_bins: int | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"blocklength n must be a positive integer, got {self.n!r}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be > 0, got {self.gamma!r}")
        if classify(self.params) is not ChannelOrder.DECODER_STRONGER:
            raise WrongOrder("the protocol needs rho1**2 > rho2**2; no positive key rate otherwise")
        for name in ("n_keys", "n_bins"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")

    @cached_property
    def mi(self) -> MIBundle:
        return mi_bundle(self.params, self.tc)

    @property
    def key_rate(self) -> float:
        return self.mi.I_YU_given_Z - 6.0 * self.gamma

    @property
    def storage_rate(self) -> float:
        return self.mi.I_XU_given_Y + 4.0 * self.gamma

    @property
    def leakage_rate(self) -> float:
        return self.mi.I_XU_given_Y + self.mi.I_XZ + 3.0 * self.gamma

    @property
    def thresholds(self) -> TypicalityThresholds:
        mi, g = self.mi, self.gamma
        return TypicalityThresholds(
            t_T=mi.I_XU + g,
            t_A=mi.I_YU - g,
            t_B=mi.I_XU_given_Z - g,
            cover_floor=0.0,
        )

    @property
    def log_codebook_size(self) -> float:
        return self.n * (self.mi.I_XU + 2.0 * self.gamma)

    @property
    def codebook_size(self) -> int:
        return int(math.ceil(math.exp(self.log_codebook_size)))

    @property
    def n_bins_eff(self) -> int:
        if self.n_bins is not None:
            return int(self.n_bins)
        return max(1, int(math.ceil(math.exp(self.n * self.storage_rate))))

    @property
    def n_keys_eff(self) -> int:
        if self.n_keys is not None:
            return int(self.n_keys)
        return max(2, int(math.floor(math.exp(self.n * self.key_rate))))

    def check_feasible(self):
        if self.key_rate <= 0.0:
            raise RatesInfeasible(
                f"I(Y;U|Z) = {self.mi.I_YU_given_Z:.6g} nats does not exceed 6*gamma = {6 * self.gamma:.6g}"
            )
        if self.log_codebook_size + math.log(self.n) > math.log(self.max_symbols):
            raise TooLarge(
                f"codebook of ~exp({self.log_codebook_size:.2f}) words x n={self.n} "
                f"exceeds the ceiling of {self.max_symbols} symbols"
            )


@dataclass(frozen=True)
class AffineHash:
    """index -> ((a * index + b) mod p) mod m, shifted into 1..m."""

    a: int
    b: int
    p: int
    m: int

    def __call__(self, index):
        idx = np.asarray(index, dtype=np.int64)
        return ((self.a * idx + self.b) % self.p) % self.m + 1


def draw_hash(rng: np.random.Generator, q: int, m: int, p: int | None = None) -> AffineHash:
    """Uniform member of the affine family on indices 0..q-1 with m outputs.

    The prime is the first one above 100*q unless given.
    """
    if p is None:
        p = int(nextprime(100 * max(q, 1)))
    a = int(rng.integers(1, p))
    b = int(rng.integers(0, p))
    return AffineHash(a, b, p, int(m))


@dataclass(frozen=True, eq=False)
class Codebook:
    cfg: ProtocolConfig
    codewords: np.ndarray
    bins: np.ndarray
    hash: AffineHash
    sq_norms: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.codewords.shape[0]

    @property
    def n_bins(self) -> int:
        return self.cfg.n_bins_eff

    @property
    def n_keys(self) -> int:
        return self.hash.m

    def key_of(self, index):
        return self.hash(index)

    def bin_of(self, index):
        return self.bins[np.asarray(index)]


def build_codebook(cfg: ProtocolConfig) -> Codebook:
    """Random codebook, uniform binning and a uniformly drawn hash."""
    cfg.check_feasible()
    q = cfg.codebook_size
    rng = trial_rng(cfg.seed, _STREAM_CODEBOOK)
    words = rng.standard_normal((q, cfg.n)) * math.sqrt(1.0 - cfg.tc.alpha)
    bins = rng.integers(1, cfg.n_bins_eff + 1, size=q)
    h = draw_hash(rng, q, cfg.n_keys_eff)
    for arr in (words, bins):
        arr.setflags(write=False)
    return Codebook(cfg, words, bins, h, np.einsum("ij,ij->i", words, words))


# -- information densities -------------------------------------------------


def _gauss_cond(cov: np.ndarray, target: int, given: list[int]):
    """Regression coefficients and residual variance of target on given."""
    if not given:
        return np.zeros(0), float(cov[target, target])
    s_gg = cov[np.ix_(given, given)]
    s_tg = cov[target, given]
    coef = s_tg @ np.linalg.pinv(s_gg, hermitian=True)
    return coef, float(cov[target, target] - coef @ s_tg)


def _log_normal(v, mean, var):
    return -0.5 * (math.log(2.0 * math.pi * var) + (v - mean) ** 2 / var)


_PAIR_SPEC = {
    # pair: (target, numerator conditioning, denominator conditioning), in (U, X, Y, Z) indices
    DensityPair.U_X: (0, [1], []),
    DensityPair.U_Y: (2, [0], []),
    DensityPair.U_XZ: (1, [0, 3], [3]),
}


def info_density(u_seq, obs_seq, pair: DensityPair, params: SourceParams, tc: TestChannel):
    """Normalized information density (1/n) log p(num) / p(den), in nats/symbol.

    ``pair`` selects the ratio:

    U_X
        p(u|x) / p(u), with ``obs_seq = x``
    U_Y
        p(y|u) / p(y), with ``obs_seq = y``
    U_XZ
        p(x|u,z) / p(x|z), with ``obs_seq = (x, z)``

    Leading axes broadcast, the last axis is time.
    """
    pair = DensityPair(pair)
    u = np.asarray(u_seq, dtype=float)
    if pair is DensityPair.U_XZ:
        x, z = (np.asarray(v, dtype=float) for v in obs_seq)
        if x.shape[-1] != z.shape[-1]:
            raise LengthMismatch("x and z differ in length")
        values = {0: u, 1: x, 3: z}
    else:
        o = np.asarray(obs_seq, dtype=float)
        values = {0: u, 1 if pair is DensityPair.U_X else 2: o}
    lengths = {v.shape[-1] for v in values.values()}
    if len(lengths) != 1:
        raise LengthMismatch(f"sequence lengths differ: {sorted(lengths)}")
    if tc.alpha == 1.0:
        # U is constant: every conditional equals its marginal
        shape = np.broadcast_shapes(*(v.shape for v in values.values()))
        return np.zeros(shape[:-1]) if len(shape) > 1 else 0.0
    cov = test_channel_covariance(params, tc)
    target, num_given, den_given = _PAIR_SPEC[pair]

    def cond_logpdf(given):
        coef, var = _gauss_cond(cov, target, given)
        mean = sum(c * values[g] for c, g in zip(coef, given)) if given else 0.0
        return _log_normal(values[target], mean, var)

    out = (cond_logpdf(num_given) - cond_logpdf(den_given)).mean(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def pairwise_density(codewords: np.ndarray, obs: np.ndarray, pair: DensityPair, params: SourceParams,
                     tc: TestChannel, sq_norms: np.ndarray | None = None) -> np.ndarray:
    """Density of every codeword against every observation row.

    Returns an array of shape (len(obs), len(codewords)), built from inner
    products instead of materializing all pairs of sequences. Only the U_X
    and U_Y pairs are supported.
    """
    pair = DensityPair(pair)
    obs = np.atleast_2d(np.asarray(obs, dtype=float))
    n = codewords.shape[1]
    if obs.shape[1] != n:
        raise LengthMismatch("observation length differs from codeword length")
    if sq_norms is None:
        sq_norms = np.einsum("ij,ij->i", codewords, codewords)
    if tc.alpha == 1.0:
        return np.zeros((obs.shape[0], codewords.shape[0]))
    a = tc.alpha
    su = 1.0 - a
    obs_sq = np.einsum("ij,ij->i", obs, obs)
    cross = obs @ codewords.T
    if pair is DensityPair.U_X:
        # u | x ~ N(su * x, a * su), u ~ N(0, su)
        v = a * su
        const = 0.5 * n * math.log(su / v)
        out = cross * (su / v)
        out += (sq_norms * (0.5 / su - 0.5 / v))[None, :]
        out -= (obs_sq * (su * su / (2.0 * v)))[:, None]
    elif pair is DensityPair.U_Y:
        # y | u ~ N(rho1 u, a rho1^2 + 1 - rho1^2), y ~ N(0, 1)
        r1 = params.rho1
        v = a * r1 * r1 + 1.0 - r1 * r1
        const = -0.5 * n * math.log(v)
        out = cross * (r1 / v)
        out -= (sq_norms * (r1 * r1 / (2.0 * v)))[None, :]
        out += (obs_sq * (0.5 - 0.5 / v))[:, None]
    else:
        raise ValueError("pairwise_density supports U_X and U_Y only")
    out += const
    out /= n
    return out


# -- encoder / decoder -----------------------------------------------------


@dataclass(frozen=True)
class Encoding:
    s: int
    j: int
    index: int | None
    fallback: bool


@dataclass(frozen=True)
class Decoding:
    s_hat: int
    index: int | None
    declared_error: bool


def _row_chunks(rows: int, q: int):
    step = max(1, _CHUNK_ELEMS // max(q, 1))
    for lo in range(0, rows, step):
        yield slice(lo, min(rows, lo + step))


def encode_batch(cb: Codebook, thr: TypicalityThresholds, x: np.ndarray, mode: EncoderMode,
                 rng: np.random.Generator | None = None):
    """Quantize each row of ``x``.

    Returns ``(index, s, j, fallback)`` arrays; ``index`` is -1 on fallback,
    where ``(s, j) = (1, 1)``.
    """
    mode = EncoderMode(mode)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if mode is EncoderMode.FAITHFUL and rng is None:
        raise ValueError("faithful mode needs a random generator")
    cfg = cb.cfg
    m = x.shape[0]
    index = np.full(m, -1, dtype=np.int64)
    for sl in _row_chunks(m, cb.size):
        d = pairwise_density(cb.codewords, x[sl], DensityPair.U_X, cfg.params, cfg.tc, cb.sq_norms)
        ok = d <= thr.t_T
        if mode is EncoderMode.GREEDY:
            d = np.where(ok, d, -np.inf)
            best = np.argmax(d, axis=1)
            top = d[np.arange(d.shape[0]), best]
            good = np.isfinite(top) & (top >= thr.cover_floor)
        else:
            keys = rng.random(d.shape)
            keys[~ok] = -1.0
            best = np.argmax(keys, axis=1)
            good = ok.any(axis=1)
        index[sl] = np.where(good, best, -1)
    fallback = index < 0
    safe = np.where(fallback, 0, index)
    s = np.where(fallback, 1, cb.key_of(safe))
    j = np.where(fallback, 1, cb.bins[safe])
    return index, s, j, fallback


def encode(cb: Codebook, thresholds: TypicalityThresholds, x_seq, mode: EncoderMode,
           rng: np.random.Generator | None = None) -> Encoding:
    """Single-sequence encoder.

    Faithful mode draws its uniform choice from ``rng``, defaulting to a
    stream derived from the configuration seed.
    """
    x = np.asarray(x_seq, dtype=float)
    if x.ndim != 1 or x.shape[0] != cb.cfg.n:
        raise LengthMismatch(f"x must have length {cb.cfg.n}")
    if rng is None and EncoderMode(mode) is EncoderMode.FAITHFUL:
        rng = trial_rng(cb.cfg.seed, _STREAM_ENCODE)
    index, s, j, fb = encode_batch(cb, thresholds, x[None, :], mode, rng)
    return Encoding(int(s[0]), int(j[0]), None if fb[0] else int(index[0]), bool(fb[0]))


def decode_batch(cb: Codebook, thr: TypicalityThresholds, y: np.ndarray, j):
    """Decode each row of ``y`` against helper data ``j``.

    Returns ``(index, s_hat, declared_error)``; a declared error (no or
    several acceptable codewords in the bin) yields ``s_hat = 1`` and
    ``index = -1``.
    """
    cfg = cb.cfg
    y = np.atleast_2d(np.asarray(y, dtype=float))
    j = np.broadcast_to(np.asarray(j), (y.shape[0],))
    if np.any((j < 1) | (j > cb.n_bins)):
        raise OutOfRange(f"helper index must lie in 1..{cb.n_bins}")
    m = y.shape[0]
    index = np.full(m, -1, dtype=np.int64)
    for sl in _row_chunks(m, cb.size):
        d = pairwise_density(cb.codewords, y[sl], DensityPair.U_Y, cfg.params, cfg.tc, cb.sq_norms)
        hit = (cb.bins[None, :] == j[sl, None]) & (d >= thr.t_A)
        count = hit.sum(axis=1)
        first = np.argmax(hit, axis=1)
        index[sl] = np.where(count == 1, first, -1)
    declared = index < 0
    s_hat = np.where(declared, 1, cb.key_of(np.where(declared, 0, index)))
    return index, s_hat, declared


def decode(cb: Codebook, thresholds: TypicalityThresholds, y_seq, j: int) -> Decoding:
    y = np.asarray(y_seq, dtype=float)
    if y.ndim != 1 or y.shape[0] != cb.cfg.n:
        raise LengthMismatch(f"y must have length {cb.cfg.n}")
    index, s_hat, err = decode_batch(cb, thresholds, y[None, :], j)
    return Decoding(int(s_hat[0]), None if err[0] else int(index[0]), bool(err[0]))


# -- chosen-secret one-time pad --------------------------------------------


def _check_range(v, m):
    v = np.asarray(v)
    if m < 1 or np.any((v < 1) | (v > m)):
        raise OutOfRange(f"values must lie in 1..{m}")


def otp_mask(secret, pad, m: int):
    """Add ``pad`` to ``secret`` modulo m on labels 1..m; pad 1 is the identity."""
    _check_range(secret, m)
    _check_range(pad, m)
    return (np.asarray(secret) - 1 + np.asarray(pad) - 1) % m + 1


def otp_unmask(masked, pad, m: int):
    _check_range(masked, m)
    _check_range(pad, m)
    return (np.asarray(masked) - np.asarray(pad)) % m + 1


# -- simulation ------------------------------------------------------------


def plugin_entropy(counts) -> float:
    """Plug-in (maximum-likelihood) entropy of a histogram, nats."""
    c = np.asarray(counts, dtype=float).ravel()
    total = c.sum()
    if total <= 0:
        return 0.0
    p = c[c > 0] / total
    return float(-(p * np.log(p)).sum())


def _binomial_radius(p: float, n: int, z: float = 1.96) -> float:
    return z * math.sqrt(max(p * (1.0 - p), 0.25 / n) / n)


@dataclass(frozen=True)
class SimReport:
    trials: int
    error_rate: float
    error_radius: float
    fallback_rate: float
    fallback_radius: float
    declared_error_rate: float
    index_match_rate: float
    bn_failure_rate: float
    key_entropy_hat: float
    key_entropy_max: float
    helper_entropy_hat: float
    pad_roundtrip_failures: int
    M_S: int
    M_J: int
    Q: int
    leakage_hat: float | None = None
    mu_hat: float | None = None
    leakage_bias_bound: float | None = None

    def with_leakage(self, est: "LeakageEstimate") -> "SimReport":
        from dataclasses import replace

        return replace(self, leakage_hat=est.leakage_hat, mu_hat=est.mu_hat, leakage_bias_bound=est.bias_bound)


def run_trials(cfg: ProtocolConfig, cb: Codebook, trials: int) -> SimReport:
    """Enroll and authenticate ``trials`` independent source blocks.

    Source blocks come from the degraded law, TRIAL_BLOCK trials per seed
    block. Counts are summed across blocks, so the report is independent of
    how blocks are scheduled.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    thr = cfg.thresholds
    cov = degraded_covariance(cfg.params)
    m_s, m_j = cb.n_keys, cb.n_bins
    key_hist = np.zeros(m_s, dtype=np.int64)
    helper_hist = np.zeros(m_j, dtype=np.int64)
    errors = fallbacks = declared = matches = bn_fail = pad_fail = 0
    for block in range(-(-trials // TRIAL_BLOCK)):
        lo = block * TRIAL_BLOCK
        nb = min(TRIAL_BLOCK, trials - lo)
        x, y, z = sample_joint(cov, cfg.n, nb, cfg.seed, first_trial=lo)
        rng = trial_rng(cfg.seed, _STREAM_TRIALS, block)
        idx, s, j, fb = encode_batch(cb, thr, x, cfg.encoder_mode, rng)
        idx_hat, s_hat, err = decode_batch(cb, thr, y, j)
        if cfg.model is ModelKind.CS:
            chosen = rng.integers(1, m_s + 1, size=nb)
            masked = otp_mask(chosen, s, m_s)
            chosen_hat = otp_unmask(masked, s_hat, m_s)
            ok_gs = s_hat == s
            pad_fail += int(np.sum(ok_gs & (chosen_hat != chosen)))
            secret, secret_hat = chosen, chosen_hat
        else:
            secret, secret_hat = s, s_hat
        errors += int(np.sum(secret_hat != secret))
        fallbacks += int(fb.sum())
        declared += int(err.sum())
        matches += int(np.sum((idx >= 0) & (idx_hat == idx)))
        enc = ~fb
        if enc.any():
            b_dens = info_density(cb.codewords[idx[enc]], (x[enc], z[enc]), DensityPair.U_XZ, cfg.params, cfg.tc)
            bn_fail += int(np.sum(np.atleast_1d(b_dens) < thr.t_B))
        key_hist += np.bincount(secret - 1, minlength=m_s)
        helper_hist += np.bincount(j - 1, minlength=m_j)
    t = float(trials)
    err_rate, fb_rate = errors / t, fallbacks / t
    return SimReport(
        trials=trials,
        error_rate=err_rate,
        error_radius=_binomial_radius(err_rate, trials),
        fallback_rate=fb_rate,
        fallback_radius=_binomial_radius(fb_rate, trials),
        declared_error_rate=declared / t,
        index_match_rate=matches / t,
        bn_failure_rate=bn_fail / t,
        key_entropy_hat=plugin_entropy(key_hist),
        key_entropy_max=math.log(m_s),
        helper_entropy_hat=plugin_entropy(helper_hist),
        pad_roundtrip_failures=pad_fail,
        M_S=m_s,
        M_J=m_j,
        Q=cb.size,
    )


@dataclass(frozen=True)
class LeakageEstimate:
    leakage_hat: float
    mu_hat: float
    bias_first_order: float
    bias_bound: float
    key_entropy_hat: float
    cond_entropy_hat: float
    outer: int
    inner: int


def estimate_secrecy_leakage(cfg: ProtocolConfig, cb: Codebook, outer: int, inner: int) -> LeakageEstimate:
    """Nested Monte-Carlo estimate of I(S; J, Z^n) for the extracted key.

    For each of ``outer`` eavesdropper sequences z^n, ``inner`` identifiers
    are drawn from the exact conditional law X | Z = z (per symbol
    N(rho2 z, 1 - rho2^2)) and encoded. The per-z (s, j) histogram gives
    H(S | J, Z = z) and the variational distance between P(S, J | z) and
    uniform(S) x P(J | z); mu_hat averages the latter over z.

    ``leakage_hat = H(S) - mean_z H(S | J, z)`` for GS. For CS the
    eavesdropper sees the padded secret, and ``log M_S - mean_z H(S | J, z)``
    is reported instead, which upper-bounds the chosen secret's leakage.

    The per-z plug-in entropies are biased low, which biases leakage_hat
    upward. ``bias_first_order`` is the Miller-Madow size
    (M_S M_J - 1) / (2 inner), around which the estimate sits when nothing
    leaks. ``bias_bound`` is log(1 + (M_S M_J - 1) / inner), a strict upper
    bound on the plug-in bias. Neither is subtracted.
    """
    if outer < 100 or inner < 100:
        raise ValueError("outer and inner must both be >= 100")
    m_s, m_j = cb.n_keys, cb.n_bins
    cells = m_s * m_j
    if cells > 50_000_000:
        raise TooLarge("M_S * M_J histogram does not fit in memory")
    if inner < 10 * cells:
        warnings.warn(
            f"inner={inner} < 10 * M_S * M_J = {10 * cells}; per-z histograms are sparse",
            Underpowered,
            stacklevel=2,
        )
    thr = cfg.thresholds
    r2 = cfg.params.rho2
    sd = math.sqrt(1.0 - r2 * r2)
    pooled = np.zeros(m_s, dtype=np.int64)
    cond_h = np.empty(outer)
    mu = np.empty(outer)
    for k in range(outer):
        rng = trial_rng(cfg.seed, _STREAM_LEAK, k)
        z = rng.standard_normal(cfg.n)
        x = r2 * z + sd * rng.standard_normal((inner, cfg.n))
        _, s, j, _ = encode_batch(cb, thr, x, cfg.encoder_mode, rng)
        joint = np.bincount((j - 1) * m_s + (s - 1), minlength=cells).reshape(m_j, m_s)
        pooled += joint.sum(axis=0)
        cond_h[k] = plugin_entropy(joint) - plugin_entropy(joint.sum(axis=1))
        p_sj = joint / inner
        p_j = p_sj.sum(axis=1, keepdims=True)
        mu[k] = np.abs(p_sj - p_j / m_s).sum()
    h_s = plugin_entropy(pooled)
    mean_cond = float(cond_h.mean())
    ref = h_s if cfg.model is ModelKind.GS else math.log(m_s)
    return LeakageEstimate(
        leakage_hat=ref - mean_cond,
        mu_hat=float(mu.mean()),
        bias_first_order=(cells - 1) / (2.0 * inner),
        bias_bound=math.log1p((cells - 1) / inner),
        key_entropy_hat=h_s,
        cond_entropy_hat=mean_cond,
        outer=outer,
        inner=inner,
    )


def privacy_leakage_budget(cfg: ProtocolConfig) -> float:
    """Per-symbol bound on I(X^n; J, Z^n) / n: storage rate plus I(X; Z)."""
    return cfg.storage_rate + cfg.mi.I_XZ
