"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np

from fermiszego.errors import NumericalDegeneracy

_CBRT2 = 2.0 ** (1.0 / 3.0)
_W1 = 1.0 / (2.0 - _CBRT2)
_W0 = -_CBRT2 / (2.0 - _CBRT2)


def _horner(c, x):
    acc = 0.0
    for ck in reversed(c):
        acc = acc * x + ck
    return acc


def symplectic_orbit_callable(dv, x0, xi0, dt, n_samples, steps_per_sample, order=4):
    """Same as :func:`symplectic_orbit` but with ``dv`` any scalar callable."""
    if order == 2:
        sub = (dt,)
    elif order == 4:
        sub = (_W1 * dt, _W0 * dt, _W1 * dt)
    else:
        raise ValueError("order must be 2 or 4")
    xs = np.empty(n_samples + 1)
    xis = np.empty(n_samples + 1)
    x, xi = float(x0), float(xi0)
    xs[0], xis[0] = x, xi
    for s in range(1, n_samples + 1):
        for _ in range(steps_per_sample):
            for h in sub:
                xi -= 0.5 * h * dv(x)
                x += 2.0 * h * xi
                xi -= 0.5 * h * dv(x)
        xs[s], xis[s] = x, xi
    return xs, xis


def symplectic_orbit(dv_coeffs, x0, xi0, dt, n_samples, steps_per_sample, order=4):
    c = [float(v) for v in dv_coeffs]
    return symplectic_orbit_callable(
        lambda x: _horner(c, x), x0, xi0, dt, n_samples, steps_per_sample, order
    )


def dpp_sample(V, norms0, uniforms, reorth_every=16):
    n, N = V.shape
    r = np.array(norms0, dtype=np.float64)
    E = np.zeros((N, N))
    picks = np.empty(N, dtype=np.int64)
    for t in range(N):
        cum = np.cumsum(r)
        target = uniforms[t] * cum[-1]
        sel = int(np.searchsorted(cum, target, side="right"))
        if sel >= n:
            sel = int(np.flatnonzero(r > 0.0)[-1])
        picks[t] = sel

        e = V[sel].copy()
        for _ in range(2):
            e -= E[:t].T @ (E[:t] @ e)
        nrm = e @ e
        if nrm <= 1e-20:
            raise NumericalDegeneracy(
                f"selected row {sel} lies in the span of earlier picks (step {t})"
            )
        e /= np.sqrt(nrm)
        E[t] = e

        c = V @ e
        r -= c * c
        r[sel] = 0.0

        if (t + 1) % reorth_every == 0 and t + 1 < N:
            proj = V @ E[: t + 1].T
            r = norms0 - np.einsum("ij,ij->i", proj, proj)
            r[picks[: t + 1]] = 0.0

        rmin = min(r.min(), 0.0)
        np.maximum(r, 0.0, out=r)
        if rmin < -1e-10:
            raise NumericalDegeneracy(
                f"residual kernel diagonal reached {rmin:.3e} at step {t}"
            )
    return picks


def dhk_sums(tuples, perms, lcm, chunk=2048):
    tuples = np.asarray(tuples, dtype=np.int64)
    perms = np.asarray(perms, dtype=np.int64)
    n = tuples.shape[1]
    weights = np.array([lcm // (r + 1) for r in range(n)], dtype=np.int64)
    lhs = np.empty(len(tuples), dtype=np.int64)
    rhs = np.empty(len(tuples), dtype=np.int64)
    for start in range(0, len(tuples), chunk):
        block = tuples[start : start + chunk]
        # (T, P, n) partial sums over every permutation
        partial = np.cumsum(block[:, perms], axis=2)
        lhs[start : start + chunk] = partial.max(axis=2).sum(axis=1)
        rhs[start : start + chunk] = (np.abs(partial) * weights).sum(axis=(1, 2))
    return lhs, rhs
