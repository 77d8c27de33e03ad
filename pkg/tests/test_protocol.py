import math
import warnings
from dataclasses import replace

import numpy as np
import pytest
from scipy.stats import norm

from gaussian_ska import protocol as pr
from gaussian_ska.errors import LengthMismatch, OutOfRange, RatesInfeasible, TooLarge, Underpowered, WrongOrder
from gaussian_ska.info_calc import TestChannel
from gaussian_ska.protocol import DensityPair, EncoderMode, ProtocolConfig, TypicalityThresholds
from gaussian_ska.region import ModelKind
from gaussian_ska.source_model import SourceParams

MAIN = SourceParams(0.95, 0.1)


def cfg_main(n=8, **kw):
    return ProtocolConfig(MAIN, TestChannel(0.3), n, 0.05, **kw)


@pytest.fixture(scope="module")
def cb8():
    return pr.build_codebook(cfg_main(8, seed=5))


# -- configuration ---------------------------------------------------------


def test_rates_and_sizes_n16():
    cfg = cfg_main(16)
    assert cfg.mi.I_XU == pytest.approx(0.5 * math.log(1 / 0.3))
    assert cfg.codebook_size == math.ceil(math.exp(16 * (0.5 * math.log(1 / 0.3) + 0.1)))
    assert 7.0e4 < cfg.codebook_size < 7.8e4
    assert cfg.n_keys_eff == 23
    assert cfg.thresholds.t_T == pytest.approx(cfg.mi.I_XU + 0.05)
    assert cfg.thresholds.t_A == pytest.approx(cfg.mi.I_YU - 0.05)


def test_infeasible_and_too_large():
    with pytest.raises(RatesInfeasible):
        pr.build_codebook(replace(cfg_main(), gamma=0.2))
    with pytest.raises(TooLarge):
        pr.build_codebook(cfg_main(40))
    with pytest.raises(WrongOrder):
        ProtocolConfig(SourceParams(0.1, 0.95), TestChannel(0.3), 8, 0.05)
    with pytest.raises(ValueError):
        cfg_main(0)
    with pytest.raises(ValueError):
        ProtocolConfig(MAIN, TestChannel(0.3), 8, 0.0)


def test_privacy_budget_example():
    assert pr.privacy_leakage_budget(cfg_main()) == pytest.approx(0.3076, abs=1e-4)
    c = ProtocolConfig(SourceParams(0.95, 0.0), TestChannel(0.3), 8, 0.05)
    assert pr.privacy_leakage_budget(c) == pytest.approx(c.mi.I_XU_given_Y + 0.2, abs=1e-14)


def test_storage_constraint_by_construction():
    for n in (4, 8, 12, 16):
        c = cfg_main(n)
        assert math.log(c.n_bins_eff) <= n * c.storage_rate + 1.0


# -- codebook and hash -----------------------------------------------------


def test_codebook_is_deterministic(cb8):
    other = pr.build_codebook(cfg_main(8, seed=5))
    np.testing.assert_array_equal(cb8.codewords, other.codewords)
    np.testing.assert_array_equal(cb8.bins, other.bins)
    assert cb8.hash == other.hash
    assert not np.array_equal(cb8.codewords, pr.build_codebook(cfg_main(8, seed=6)).codewords)


def test_codebook_shape(cb8):
    assert cb8.size == cfg_main(8).codebook_size
    assert cb8.bins.min() >= 1 and cb8.bins.max() <= cb8.n_bins
    assert cb8.hash.p > 100 * cb8.size
    with pytest.raises(ValueError):
        cb8.codewords[0, 0] = 1.0


def test_hash_outputs_in_range():
    h = pr.draw_hash(np.random.default_rng(0), 1000, 23)
    v = h(np.arange(1000))
    assert v.min() >= 1 and v.max() <= 23


def test_hash_collision_bound():
    q, m, draws = 5000, 23, 10_000
    rng = np.random.default_rng(11)
    pairs = rng.choice(q, size=(100, 2), replace=True)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    hashes = [pr.draw_hash(rng, q, m) for _ in range(draws)]
    p = hashes[0].p
    a = np.array([h.a for h in hashes], dtype=np.int64)[:, None]
    b = np.array([h.b for h in hashes], dtype=np.int64)[:, None]
    hi = ((a * pairs[:, 0] + b) % p) % m
    hj = ((a * pairs[:, 1] + b) % p) % m
    rate = (hi == hj).mean(axis=0)
    bound = 1 / m + 1 / p
    sigma = math.sqrt(bound * (1 - bound) / draws)
    assert np.all(rate <= bound + 3 * sigma)


# -- information density ---------------------------------------------------


def oracle_density(u, obs, pair, r1, r2, a):
    if pair is DensityPair.U_X:
        num = norm.logpdf(u, (1 - a) * obs, math.sqrt(a * (1 - a)))
        den = norm.logpdf(u, 0.0, math.sqrt(1 - a))
    elif pair is DensityPair.U_Y:
        num = norm.logpdf(obs, r1 * u, math.sqrt(a * r1 * r1 + 1 - r1 * r1))
        den = norm.logpdf(obs, 0.0, 1.0)
    else:
        x, z = obs
        # x | u ~ N(u, a) combined with z | x ~ N(r2 x, 1 - r2^2)
        v = 1.0 / (1.0 / a + r2 * r2 / (1 - r2 * r2))
        mean = v * (u / a + r2 * z / (1 - r2 * r2))
        num = norm.logpdf(x, mean, math.sqrt(v))
        den = norm.logpdf(x, r2 * z, math.sqrt(1 - r2 * r2))
    return float(np.mean(num - den))


@pytest.mark.parametrize("pair", list(DensityPair))
def test_info_density_against_scipy(pair):
    rng = np.random.default_rng(3)
    p, tc = SourceParams(0.8, 0.4), TestChannel(0.5)
    for _ in range(20):
        u, x, z = rng.standard_normal((3, 9))
        obs = (x, z) if pair is DensityPair.U_XZ else x
        got = pr.info_density(u, obs, pair, p, tc)
        assert got == pytest.approx(oracle_density(u, obs, pair, 0.8, 0.4, 0.5), abs=1e-12)


def test_info_density_at_origin():
    p, tc = SourceParams(0.8, 0.4), TestChannel(0.5)
    assert pr.info_density(np.zeros(5), np.zeros(5), DensityPair.U_X, p, tc) == pytest.approx(0.5 * math.log(2))


def test_info_density_additive():
    p, tc = SourceParams(0.8, 0.4), TestChannel(0.3)
    one = pr.info_density([0.4], [1.1], DensityPair.U_Y, p, tc)
    two = pr.info_density([0.4, 0.4], [1.1, 1.1], DensityPair.U_Y, p, tc)
    assert one == pytest.approx(two, abs=1e-15)


def test_info_density_errors_and_alpha_one():
    p = SourceParams(0.8, 0.4)
    with pytest.raises(LengthMismatch):
        pr.info_density(np.zeros(3), np.zeros(4), DensityPair.U_X, p, TestChannel(0.5))
    with pytest.raises(LengthMismatch):
        pr.info_density(np.zeros(3), (np.zeros(3), np.zeros(2)), DensityPair.U_XZ, p, TestChannel(0.5))
    assert pr.info_density(np.ones(3), np.ones(3), DensityPair.U_Y, p, TestChannel(1.0)) == 0.0


def test_info_density_mean_is_mutual_information():
    # E[density] under the joint law equals I(X;U)
    rng = np.random.default_rng(8)
    a = 0.3
    u = rng.standard_normal(200_000) * math.sqrt(1 - a)
    x = u + rng.standard_normal(200_000) * math.sqrt(a)
    d = pr.info_density(u, x, DensityPair.U_X, MAIN, TestChannel(a))
    assert d == pytest.approx(0.5 * math.log(1 / a), abs=0.01)


@pytest.mark.parametrize("pair", [DensityPair.U_X, DensityPair.U_Y])
def test_pairwise_matches_direct(cb8, pair):
    rng = np.random.default_rng(1)
    obs = rng.standard_normal((5, 8))
    mat = pr.pairwise_density(cb8.codewords[:40], obs, pair, MAIN, TestChannel(0.3))
    for i in range(5):
        direct = pr.info_density(cb8.codewords[:40], np.broadcast_to(obs[i], (40, 8)), pair, MAIN, TestChannel(0.3))
        np.testing.assert_allclose(mat[i], direct, atol=1e-11)


# -- encoder / decoder -----------------------------------------------------


def test_encoder_fallback_on_empty_candidates(cb8):
    thr = TypicalityThresholds(t_T=-1e9, t_A=0.0, t_B=0.0, cover_floor=0.0)
    x = np.random.default_rng(0).standard_normal(8)
    for mode in EncoderMode:
        e = pr.encode(cb8, thr, x, mode)
        assert e.fallback and (e.s, e.j) == (1, 1) and e.index is None


def test_greedy_is_deterministic_and_best(cb8):
    thr = cb8.cfg.thresholds
    x = np.random.default_rng(4).standard_normal(8)
    e1 = pr.encode(cb8, thr, x, EncoderMode.GREEDY)
    e2 = pr.encode(cb8, thr, x, EncoderMode.GREEDY)
    assert e1 == e2 and not e1.fallback
    d = pr.pairwise_density(cb8.codewords, x, DensityPair.U_X, MAIN, TestChannel(0.3))[0]
    assert e1.index == int(np.argmax(np.where(d <= thr.t_T, d, -np.inf)))
    assert e1.s == cb8.key_of(e1.index) and e1.j == cb8.bins[e1.index]


def test_faithful_picks_from_candidates(cb8):
    thr = cb8.cfg.thresholds
    x = np.random.default_rng(5).standard_normal(8)
    d = pr.pairwise_density(cb8.codewords, x, DensityPair.U_X, MAIN, TestChannel(0.3))[0]
    cands = set(np.flatnonzero(d <= thr.t_T))
    rng = np.random.default_rng(0)
    picks = [pr.encode(cb8, thr, x, EncoderMode.FAITHFUL, rng).index for _ in range(200)]
    assert set(picks) <= cands
    assert len(set(picks)) > 50


def test_encode_length_mismatch(cb8):
    with pytest.raises(LengthMismatch):
        pr.encode(cb8, cb8.cfg.thresholds, np.zeros(7), EncoderMode.GREEDY)


def test_single_key_value_gives_s_one():
    c = cfg_main(8, n_keys=1)
    cb = pr.build_codebook(c)
    x = np.random.default_rng(0).standard_normal((50, 8))
    _, s, _, _ = pr.encode_batch(cb, c.thresholds, x, EncoderMode.GREEDY)
    assert np.all(s == 1)
    assert pr.run_trials(c, cb, 200).error_rate == 0.0


def _hand_codebook(words, bins):
    c = cfg_main(4, n_bins=2)
    words = np.asarray(words, dtype=float)
    h = pr.AffineHash(1, 0, 101, 5)
    return pr.Codebook(c, words, np.asarray(bins), h, np.einsum("ij,ij->i", words, words))


def test_decoder_declares_on_empty_bin():
    cb = _hand_codebook([[1, 1, 1, 1], [-1, -1, -1, -1]], [1, 1])
    thr = replace(cb.cfg.thresholds)
    d = pr.decode(cb, thr, np.ones(4), 2)
    assert d.declared_error and d.s_hat == 1 and d.index is None


def test_decoder_declares_on_two_matches():
    cb = _hand_codebook([[1, 1, 1, 1], [1, 1, 1, 1], [-1, -1, -1, -1]], [1, 1, 2])
    thr = cb.cfg.thresholds
    d = pr.decode(cb, thr, np.ones(4), 1)
    assert d.declared_error and d.s_hat == 1
    ok = pr.decode(cb, thr, -np.ones(4), 2)
    assert not ok.declared_error and ok.index == 2 and ok.s_hat == cb.key_of(2)


def test_decoder_rejects_bad_helper(cb8):
    with pytest.raises(OutOfRange):
        pr.decode(cb8, cb8.cfg.thresholds, np.zeros(8), cb8.n_bins + 1)


def test_high_snr_decoding_recovers_index():
    # y drawn from the channel Y | U around a known codeword
    c = ProtocolConfig(SourceParams(0.99, 0.1), TestChannel(0.3), 4, 0.05, seed=2)
    cb = pr.build_codebook(c)
    rng = np.random.default_rng(0)
    idx = rng.integers(0, cb.size, 1000)
    r1, a = 0.99, 0.3
    y = r1 * cb.codewords[idx] + math.sqrt(a * r1 * r1 + 1 - r1 * r1) * rng.standard_normal((1000, 4))
    got, _, _ = pr.decode_batch(cb, c.thresholds, y, cb.bins[idx])
    assert (got == idx).mean() > 0.5


# -- one-time pad ----------------------------------------------------------


def test_pad_identity_and_roundtrip():
    m = 7
    s = np.arange(1, m + 1)
    np.testing.assert_array_equal(pr.otp_mask(s, 1, m), s)
    ss, kk = np.meshgrid(s, s)
    np.testing.assert_array_equal(pr.otp_unmask(pr.otp_mask(ss, kk, m), kk, m), ss)


def test_pad_uniform_over_keys():
    m = 23
    for s in (1, 5, 23):
        masked = pr.otp_mask(np.full(m, s), np.arange(1, m + 1), m)
        np.testing.assert_array_equal(np.bincount(masked, minlength=m + 1)[1:], np.ones(m))


def test_pad_range_checks():
    with pytest.raises(OutOfRange):
        pr.otp_mask(0, 1, 5)
    with pytest.raises(OutOfRange):
        pr.otp_unmask(3, 6, 5)


# -- simulation ------------------------------------------------------------


def test_run_trials_deterministic(cb8):
    a = pr.run_trials(cb8.cfg, cb8, 300)
    b = pr.run_trials(cb8.cfg, cb8, 300)
    assert a == b
    assert 0.0 <= a.error_rate <= 1.0
    assert a.key_entropy_hat <= math.log(a.M_S) + 1e-12
    assert a.helper_entropy_hat <= math.log(a.M_J) + 1e-12


def test_run_trials_independent_of_block_size(cb8, monkeypatch):
    ref = pr.run_trials(cb8.cfg, cb8, 150)
    monkeypatch.setattr(pr, "TRIAL_BLOCK", 7)
    assert pr.run_trials(cb8.cfg, cb8, 150) == ref


def test_cs_pad_roundtrip_in_simulation():
    c = cfg_main(8, seed=4, model=ModelKind.CS)
    cb = pr.build_codebook(c)
    rep = pr.run_trials(c, cb, 500)
    assert rep.pad_roundtrip_failures == 0
    # a pad failure would show up as more CS errors than GS decoding failures
    gs = pr.run_trials(replace(c, model=ModelKind.GS), cb, 500)
    assert rep.error_rate == gs.error_rate


def test_plugin_entropy():
    assert pr.plugin_entropy([5, 5]) == pytest.approx(math.log(2))
    assert pr.plugin_entropy([0, 0]) == 0.0
    assert pr.plugin_entropy([3, 0, 0]) == 0.0


# -- leakage ---------------------------------------------------------------


def test_leakage_argument_checks(cb8):
    with pytest.raises(ValueError):
        pr.estimate_secrecy_leakage(cb8.cfg, cb8, 99, 100)


def test_leakage_underpowered_warning(cb8):
    with pytest.warns(Underpowered):
        est = pr.estimate_secrecy_leakage(cb8.cfg, cb8, 100, 100)
    assert 0.0 <= est.mu_hat <= 2.0
    assert est.leakage_hat >= -est.bias_bound
    assert est.bias_first_order == pytest.approx((cb8.n_keys * cb8.n_bins - 1) / 200)


def test_leakage_deterministic(cb8):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", Underpowered)
        a = pr.estimate_secrecy_leakage(cb8.cfg, cb8, 100, 120)
        b = pr.estimate_secrecy_leakage(cb8.cfg, cb8, 100, 120)
    assert a == b


def test_leakage_independent_case_small():
    c = ProtocolConfig(SourceParams(0.95, 0.0), TestChannel(0.3), 8, 0.05, seed=1, n_bins=1)
    cb = pr.build_codebook(c)
    est = pr.estimate_secrecy_leakage(c, cb, 200, 400)
    assert abs(est.leakage_hat) <= est.bias_bound


def test_report_with_leakage(cb8):
    rep = pr.run_trials(cb8.cfg, cb8, 64)
    est = pr.LeakageEstimate(0.1, 0.2, 0.01, 0.02, 1.0, 0.9, 100, 100)
    r2 = rep.with_leakage(est)
    assert (r2.leakage_hat, r2.mu_hat, r2.leakage_bias_bound) == (0.1, 0.2, 0.02)
