import numpy as np
import pytest

from gaussian_ska import region, verify


def test_all_checks_pass_small():
    results = verify.run_all(draws=500, seed=3)
    assert len(results) == len(verify.CHECKS)
    failed = [r for r in results if not r.passed]
    assert not failed


def test_single_draw_runs():
    assert all(r.passed for r in verify.run_all(draws=1, seed=0))


def test_draws_validated():
    with pytest.raises(ValueError):
        verify.run_all(draws=0)


def test_sign_flip_is_caught(monkeypatch):
    orig = region.boundary_arrays

    def broken(r1, r2, a, model):
        out = orig(r1, r2, a, model)
        out["RJ_min"] = -out["RJ_min"]
        return out

    monkeypatch.setattr(region, "boundary_arrays", broken)
    res = {r.name: r for r in verify.run_all(draws=50, seed=0)}
    assert not res["closed_form_vs_mi_chain"].passed


def test_nan_residual_fails():
    assert not verify.CheckResult("x", float("nan"), 1e-10, 1).passed
    assert not verify.CheckResult("x", np.inf, 1e-10, 1).passed
