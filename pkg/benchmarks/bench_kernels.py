"""Compare the numba and numpy kernel backends.

Run:  python3 benchmarks/bench_kernels.py [--repeat 5] [--points 1000000]

Both backends are imported side by side from ``sphereum._kernels`` and are
checked for agreement before timing.  Numba compilation is excluded by a
warm-up call.
"""
import argparse
import time

import numpy as np

from sphereum import _kernels as K
from sphereum.states import cs_coefficients


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--points", type=int, default=1_000_000)
    args = p.parse_args(argv)
    if K.numba is None:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, args.points)
    phi = rng.uniform(-np.pi, np.pi, args.points)
    theta = rng.uniform(0, np.pi, args.points)
    coeffs = cs_coefficients(0.2)
    mats = [rng.normal(size=(6, 6)) for _ in range(200)]

    cases = {
        "legendre_series (L=%d)" % (coeffs.size - 1): (
            lambda: K.legendre_series_numpy(coeffs, x),
            lambda: K.legendre_series_numba(coeffs, x)),
        "f_profile (gamma=5, k=2)": (
            lambda: K.f_profile_numpy(phi, theta, np.pi, np.pi / 2, 5.0, 2),
            lambda: K.f_profile_numba(phi, theta, np.pi, np.pi / 2, 5.0, 2)),
        "principal_minor_sums (200 x 6x6)": (
            lambda: [K.principal_minor_sums_numpy(m) for m in mats],
            lambda: [K.principal_minor_sums_numba(m) for m in mats]),
    }
    print(f"{'kernel':36s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, (f_np, f_nb) in cases.items():
        a, b = f_np(), f_nb()
        for u, w in zip(a, b):
            np.testing.assert_allclose(u, w, rtol=1e-10, atol=1e-12)
        t_np, t_nb = best_of(f_np, args.repeat), best_of(f_nb, args.repeat)
        print(f"{name:36s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
