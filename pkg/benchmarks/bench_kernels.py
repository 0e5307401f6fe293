"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--quick] [--json out.json]
"""

import argparse
import json
import math
import sys
import timeit

import numpy as np

from vortexkg import kernels
from vortexkg.filament import make_helix_curve
from vortexkg.model import HelixSpec


def cases(n_curve, n_field, n_images):
    c = make_helix_curve(HelixSpec(0.3, 1.0), 2 * math.pi, n_curve)
    r, shift = c.nodes, c.shift
    u = np.arange(n_curve) * 2 * math.pi / n_curve
    rj = r.copy()
    rj[:, 0] = u + 0.1 * np.sin(u)
    rng = np.random.default_rng(0)
    phi = rng.normal(size=n_field) + 1j * rng.normal(size=n_field)
    prev = np.roll(phi, 1)
    d = c.segments()
    mids = r + 0.5 * d
    pts = np.array([[0.3, 2.0, 0.0]])
    return {
        "lia_velocity": lambda k: k.lia_velocity(r, shift, 0.5),
        "lia_rk4": lambda k: k.lia_rk4(r, shift, 0.5, 1e-4),
        "resample": lambda k: k.resample(rj, shift),
        "spline_arclength": lambda k: k.spline_arclength(r, shift),
        "cn_schrodinger_step": lambda k: k.cn_schrodinger_step(phi, 0.3),
        "leapfrog_step": lambda k: k.leapfrog_step(phi, prev, 0.25, 0.01),
        "biot_savart": lambda k: k.biot_savart(pts, mids, d, shift, n_images, 1.0),
    }


def best_time(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def run(quick=False, repeat=5):
    sizes = (32, 64, 8) if quick else (128, 256, 200)
    table = []
    for name, fn in cases(*sizes).items():
        row = {"kernel": name, "python_s": best_time(lambda: fn(kernels.python), 1 if quick else repeat)}
        if kernels.compiled is not None:
            row["compiled_s"] = best_time(lambda: fn(kernels.compiled), 1 if quick else repeat)
            row["speedup"] = row["python_s"] / row["compiled_s"]
        table.append(row)
    return table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="tiny sizes, single repeat")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the table as JSON")
    args = ap.parse_args(argv)
    table = run(args.quick, args.repeat)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':22s}{'python':>12s}{'compiled':>12s}{'speedup':>9s}")
    for row in table:
        comp = f"{row['compiled_s'] * 1e6:10.1f}us" if "compiled_s" in row else f"{'n/a':>12s}"
        spd = f"{row['speedup']:8.1f}x" if "speedup" in row else f"{'':>9s}"
        print(f"{row['kernel']:22s}{row['python_s'] * 1e6:10.1f}us{comp}{spd}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(table, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
