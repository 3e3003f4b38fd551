"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import timeit

import numpy as np

from warpeinstein import curvature, kernels
from warpeinstein import family as fam
from warpeinstein.warp import build_metric


def integrate_once():
    fp = fam.FamilyParams(3, 1.0, 3)
    controls = fam.Controls(beta_stop=8.0 * math.exp(-3.2))
    return fam.integrate_family(fp, fam.FamilyState(0.0, 8.0, 2.0, 1.0), (0.0, 400.0), controls)


def ricci_once(spec, points):
    g = build_metric(spec, scheme="hyperdual")
    for p in points:
        curvature.ricci(g, p)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    traj = integrate_once()
    spec = fam.reconstruct_profiles(traj)
    points = spec.domain.sample(np.random.default_rng(0), 5)
    y = np.array([8.0, 2.0, 1.0])
    cases = {
        "dp54_step x1000": lambda: [kernels.dp54_step(kernels.OMEGA_SYSTEM, y, 0.01, 3, 1.0, 0.25, 1e-10, 1e-13)
                                    for _ in range(1000)],
        "integrate (3.2 e-folds)": integrate_once,
        "ricci, 9-dim, 5 points": lambda: ricci_once(spec, points),
    }
    previous = kernels.BACKEND
    timings = {}
    try:
        for backend in kernels.available_backends():
            kernels.use_backend(backend)
            for name, fn in cases.items():
                timings[name, backend] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    finally:
        kernels.use_backend(previous)

    backends = kernels.available_backends()
    print(f"{'case':28s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name in cases:
        row = [timings[name, b] for b in backends]
        line = f"{name:28s}" + "".join(f"{t * 1e3:10.2f}ms" for t in row)
        if len(row) == 2:
            line += f"{row[1] / row[0]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
