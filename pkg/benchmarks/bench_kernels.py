"""Compare the compiled kernels with their pure-Python twins.

Run with ``python3 benchmarks/bench_kernels.py [--repeat R]``.  Prints one
line per kernel with the best-of-R wall time of each backend, the speedup
and the largest output difference.
"""
import argparse
import itertools
import math
import time
from functools import reduce

import numpy as np

from fermiszego import kernels, schrodinger
from fermiszego.potentials import PotentialSpec
from fermiszego.sampling import _prepare, _rng


def _best(fn, repeat):
    out, best = None, np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def orbit_case():
    V = PotentialSpec("quartic")
    coeffs = np.ascontiguousarray(np.polynomial.polynomial.polyder(V.poly))
    # one period of the x^4 orbit at energy 1, 20000 Yoshida steps
    T, M = 2.62205755429212, 1024
    spp = 20000 // M + 1
    dt = T / (M * spp)
    return lambda mod: mod.symplectic_orbit(coeffs, 1.0, 0.0, dt, M, spp, 4)


def dpp_case(hbar=0.01):
    _, proj = schrodinger.solve(PotentialSpec("harmonic"), hbar, 1.0, box=(-2.2, 2.2))
    prep = _prepare(proj)
    u = _rng(7, 0).random(proj.N)
    return lambda mod: np.asarray(mod.dpp_sample(prep.V, prep.norms0, u, 16))


def dhk_case(n=6, i_range=3):
    vals = range(-i_range, i_range + 1)
    t = np.array([p for p in itertools.product(vals, repeat=n - 1) if abs(sum(p)) <= i_range],
                 dtype=np.int64)
    tuples = np.ascontiguousarray(np.hstack([t, -t.sum(axis=1, keepdims=True)]))
    perms = np.ascontiguousarray(np.array(list(itertools.permutations(range(n))),
                                          dtype=np.int64))
    L = reduce(math.lcm, range(1, n + 1), 1)
    return lambda mod: np.concatenate([np.asarray(a) for a in mod.dhk_sums(tuples, perms, L)])


def _diff(a, b):
    if isinstance(a, tuple):
        return max(_diff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    mods = kernels.backends()
    if "compiled" not in mods:
        print("compiled extension not built; only the python backend is available")
    cases = {"symplectic_orbit": orbit_case(), "dpp_sample": dpp_case(), "dhk_sums": dhk_case()}
    print(f"{'kernel':<18}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}{'max diff':>12}")
    for name, fn in cases.items():
        tp, op = _best(lambda: fn(mods["python"]), args.repeat)
        if "compiled" in mods:
            tc, oc = _best(lambda: fn(mods["compiled"]), args.repeat)
            print(f"{name:<18}{tp:>12.4g}{tc:>14.4g}{tp / tc:>10.2f}{_diff(op, oc):>12.3g}")
        else:
            print(f"{name:<18}{tp:>12.4g}{'-':>14}{'-':>10}{'-':>12}")


if __name__ == "__main__":
    main()
