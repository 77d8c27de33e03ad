"""Walk the key / storage / leakage trade-off for a few source settings.

Prints, for each (rho1, rho2), the boundary at a handful of alpha values,
the best key rate reachable at all, and what happens to the key rate when
storage is capped. Run with ``--units bits`` to read everything in bits.
"""

import argparse
import math

from gaussian_ska.info_calc import TestChannel
from gaussian_ska.region import (
    ModelKind,
    RateTuple,
    boundary_point,
    degenerate_region,
    membership_witness,
    reduction_limited_storage,
    rs_supremum,
)
from gaussian_ska.source_model import SourceParams


def show(params, units_scale, unit):
    print(f"\nrho1 = {params.rho1}, rho2 = {params.rho2}")
    if not params.decoder_stronger:
        d = degenerate_region(params)
        print(f"  eavesdropper at least as strong: no key; leakage floor {d.RL_min * units_scale:.4f} {unit}")
        return
    print(f"  key-rate supremum {rs_supremum(params) * units_scale:.4f} {unit} (alpha -> 0)")
    print(f"  {'alpha':>8} {'R_S':>8} {'R_J gs':>8} {'R_J cs':>8} {'R_L':>8}")
    for a in (1.0, 0.5, 0.2, 0.05, 0.01):
        gs = boundary_point(params, ModelKind.GS, TestChannel(a))
        cs = boundary_point(params, ModelKind.CS, TestChannel(a))
        print(
            f"  {a:8.3f} {gs.RS_max * units_scale:8.4f} {gs.RJ_min * units_scale:8.4f}"
            f" {cs.RJ_min * units_scale:8.4f} {gs.RL_min * units_scale:8.4f}"
        )
    # storage caps: how much key survives
    for rj in (0.1, 0.5, 2.0):
        red = reduction_limited_storage(params, rj)
        print(f"  storage {rj:.1f} nats -> best key {red.RS_from_eq17 * units_scale:.4f} {unit}")
    # one tuple inside the region, one just outside
    b = boundary_point(params, ModelKind.GS, TestChannel(0.2))
    inside = RateTuple(0.9 * b.RS_max, b.RJ_min, b.RL_min)
    outside = RateTuple(b.RS_max, 0.9 * b.RJ_min, b.RL_min)
    print(f"  90% of the alpha=0.2 key rate: witness alpha {membership_witness(params, ModelKind.GS, inside):.4f}")
    print(f"  same key with 10% less storage: witness {membership_witness(params, ModelKind.GS, outside)}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--units", choices=["nats", "bits"], default="nats")
    args = ap.parse_args()
    scale = 1 / math.log(2) if args.units == "bits" else 1.0
    for r1, r2 in [(0.95, 0.1), (0.8, 0.4), (0.8, -0.7), (0.4, 0.8)]:
        show(SourceParams(r1, r2), scale, args.units)


if __name__ == "__main__":
    main()
