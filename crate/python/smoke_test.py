#!/usr/bin/env python3
"""Smoke test for the hypgraph_py extension module.

Builds the cdylib if needed, loads it, and checks the reference numbers of
the three example systems. Run from the repository root:

    python3 python/smoke_test.py
"""

import math
import shutil
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def ensure_module():
    so = ROOT / "target" / "release" / "libhypgraph_py.so"
    if not so.exists():
        subprocess.run(
            ["cargo", "build", "--release", "-p", "hypgraph-py"],
            cwd=ROOT,
            check=True,
        )
    target = ROOT / "python" / "hypgraph_py.so"
    if not target.exists() or so.stat().st_mtime > target.stat().st_mtime:
        shutil.copyfile(so, target)
    sys.path.insert(0, str(ROOT / "python"))


def approx(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    ensure_module()
    import hypgraph_py as hg

    horseshoe = (ROOT / "configs" / "horseshoe.toml").read_text()
    anosov = (ROOT / "configs" / "anosov.toml").read_text()
    weierstrass = (ROOT / "configs" / "weierstrass.toml").read_text()

    # Dimension predictions of the three example systems.
    d_s, d, dim, lips = hg.predict(horseshoe)
    approx(d_s, 0.5, 1e-9)
    approx(d, 1.2075187496394219, 1e-8)
    approx(dim, 1.7075187496394219, 1e-8)
    assert not lips

    kappa = (3.0 + math.sqrt(5.0)) / 2.0
    _, d, dim, _ = hg.predict(anosov)
    approx(dim, 3.0 - math.log(1.5) / math.log(kappa), 1e-8)

    _, d, dim, _ = hg.predict(weierstrass)
    approx(d, 2.0 - math.log(1.5) / math.log(3.0), 1e-8)

    # Lipschitz branch at t = 0.
    flat = horseshoe.replace("t = 0.5", "t = 0.0")
    _, _, dim, lips = hg.predict(flat)
    assert lips
    approx(dim, 1.5, 1e-9)
    verdict, delta_u, _ = hg.regularity(flat)
    assert verdict == "lipschitz", verdict
    assert delta_u < 1e-9

    # Pressure roots in closed form.
    approx(hg.bowen_root(2, math.log(0.25)), 0.5, 1e-9)
    approx(
        hg.pressure_root(2, -math.log(1.5), -math.log(4.0)),
        1.2075187496394219,
        1e-9,
    )
    approx(hg.pressure([0.0, math.log(2.0)]), math.log(3.0), 1e-12)

    # Blender overlap of the reference example and the bound crossing.
    lo, hi = hg.overlap_interval(1.5, 0.5)
    approx(lo, 1.0 / 3.0, 1e-12)
    approx(hi, 2.0 / 3.0, 1e-12)
    assert hg.overlap_interval(2.5, 0.5) is None
    d1, d2 = hg.dimension_bounds(0.5, 0.5)
    assert d1 == d2 == 1.0

    # A sampled Weierstrass slice recovers its Holder exponent roughly.
    params, values = hg.sample_slice(weierstrass, 14, 50)
    assert len(params) == 1 << 14
    gamma = hg.holder_exponent(params, values, 3, 10)
    approx(gamma, math.log(1.5) / math.log(3.0), 0.06)

    # Box counting a straight segment gives slope about 1.
    seg = [(i / 4096.0, 0.25) for i in range(4096)]
    slope, _ = hg.box_dimension(seg, 1, 9)
    approx(slope, 1.0, 0.05)

    # Variational counting against the pressure root for the horseshoe.
    t_var, t_root, gap = hg.variational(horseshoe)
    approx(t_root, 0.2075187496394219, 1e-8)
    assert gap < 1e-6, gap

    # Moran cells partition check comes back uniform for constant weights.
    cells = hg.moran_cells(horseshoe, 0.01)
    assert len(cells) == 16
    assert all(len(c) == 4 for c in cells)

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
