"""Action-angle data of the classical flow of ``H(x, xi) = xi^2 + V(x)``.

Conventions
-----------
The flow is ``dx/dt = 2 xi``, ``dxi/dt = -V'(x)``.  The angle map
``psi(theta)`` is the position along the orbit started at the right turning
point, with ``theta = 2 pi t / T``.  Endpoint singularities of
``int dx / sqrt(lam - V)`` are removed by the substitution
``x = x_+ - s^2`` (right half) and ``x = x_- + s^2`` (left half).
"""
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from fermiszego import kernels
from fermiszego.errors import (
    DegenerateEdge,
    EmptyDroplet,
    MultiCutDetected,
    OutOfDroplet,
    SingularDiagonal,
    TruncationWarning,
)
from fermiszego.potentials import minimum, sublevel_components

FLOW_STEPS_PER_PERIOD = 20000
DEFAULT_M = 4096


@lru_cache(maxsize=None)
def _gl(n):
    return np.polynomial.legendre.leggauss(n)


def _composite_nodes(a, b, panels=8, order=32):
    """Composite Gauss-Legendre nodes/weights on [a, b] (arrays broadcast over a, b)."""
    t, w = _gl(order)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    edges = np.linspace(0.0, 1.0, panels + 1)
    u = ((edges[:-1, None] + edges[1:, None]) / 2 + (t[None, :] / 2) / panels).ravel()
    wu = np.tile(w / (2 * panels), panels)
    return a + (b - a) * u, (b - a) * wu


def turning_points(V, lam, n_scan=8001):
    """Endpoints ``(x_-, x_+)`` of the single interval ``{V <= lam}``."""
    comps = sublevel_components(V, lam, n_scan=n_scan)
    if not comps:
        raise EmptyDroplet(f"{{V <= {lam}}} is empty")
    if len(comps) > 1:
        raise MultiCutDetected(lam, comps)
    xm, xp = comps[0]
    for r in (xm, xp):
        if abs(float(V.derivative(r))) < 1e-6:
            raise DegenerateEdge(f"|V'| < 1e-6 at turning point {r}")
    return float(xm), float(xp)


def _half_integrals(V, lam, weight_fn, xm, xp, panels=8, order=32):
    """``int_{x_-}^{x_+} weight_fn(x, lam - V(x))`` after the square-root
    substitution; ``weight_fn(x, gap)`` receives the local ``lam - V``."""
    mid = 0.5 * (xm + xp)
    total = 0.0
    for edge, sgn in ((xp, -1.0), (xm, 1.0)):
        smax = np.sqrt(abs(edge - mid))
        s, w = _composite_nodes(0.0, smax, panels, order)
        x = edge + sgn * s * s
        gap = float(V(edge)) - V(x) + (lam - float(V(edge)))
        total += np.sum(w * 2.0 * s * weight_fn(x, gap))
    return total


def period(V, lam):
    """Period ``T = int dx / sqrt(lam - V)`` of the orbit at energy ``lam``."""
    xm, xp = turning_points(V, lam)
    return float(_half_integrals(V, lam, lambda x, gap: 1.0 / np.sqrt(gap), xm, xp))


def action(V, lam):
    """``g(lam) = (1/pi) int (lam - V)_+^(1/2) dx``; zero at or below min V."""
    try:
        xm, xp = turning_points(V, lam)
    except EmptyDroplet:
        return 0.0
    except DegenerateEdge:
        # lam sits at the bottom of the well: the orbit is a point
        if lam <= minimum(V)[1] + 1e-12:
            return 0.0
        raise
    val = _half_integrals(V, lam, lambda x, gap: np.sqrt(np.maximum(gap, 0.0)), xm, xp)
    return float(val / np.pi)


def inverse_action(V, value, lam_hi=None):
    """Energy ``lam`` with ``g(lam) = value`` (g is increasing)."""
    lo = minimum(V)[1]
    hi = lo + 1.0 if lam_hi is None else lam_hi
    while action(V, hi) < value:
        hi = lo + 2.0 * (hi - lo)
    return brentq(lambda e: action(V, e) - value, lo + 1e-14, hi, xtol=1e-14, rtol=1e-14)


def theta_map(V, mu, x):
    """Angle ``theta(x) = (pi/T) int_x^{x_+} du / sqrt(mu - V(u))``."""
    xm, xp = turning_points(V, mu)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    tol = 1e-12 * max(1.0, abs(xp - xm))
    if np.any(x < xm - tol) or np.any(x > xp + tol):
        raise OutOfDroplet(f"points outside [{xm}, {xp}]")
    x = np.clip(x, xm, xp)
    T = period(V, mu)
    vp, vm = float(V(xp)), float(V(xm))
    out = np.empty_like(x)
    right = x >= 0.5 * (xm + xp)
    # right half: integrate from x_+ inward; left half: pi minus the left tail
    for sel, edge, sgn, vedge in ((right, xp, -1.0, vp), (~right, xm, 1.0, vm)):
        if not sel.any():
            continue
        smax = np.sqrt(np.abs(x[sel] - edge))
        s, w = _composite_nodes(np.zeros_like(smax), smax, panels=4, order=24)
        u = edge + sgn * s * s
        gap = vedge - V(u) + (mu - vedge)
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = np.where(s > 0, 2.0 * s / np.sqrt(gap), 0.0)
        part = np.pi / T * np.sum(w * integrand, axis=-1)
        out[sel] = part if sgn < 0 else np.pi - part
    return out if out.size > 1 else out[0]


def energy(V, x, xi):
    return np.asarray(xi) ** 2 + V(x)


def _orbit(V, x0, xi0, dt, n_samples, steps_per_sample, region):
    coeffs = V.dv_poly_on(*region) if region is not None else None
    if coeffs is not None:
        return kernels.symplectic_orbit(coeffs, float(x0), float(xi0), float(dt),
                                        int(n_samples), int(steps_per_sample))
    dv = lambda t: float(V.derivative(t))  # noqa: E731
    return kernels.symplectic_orbit_callable(dv, x0, xi0, dt, n_samples, steps_per_sample)


def integrate_flow(V, state, t, dt=None):
    """Evolve ``(x, xi)`` for time ``t`` with a fourth-order symplectic scheme.

    The step defaults to ``T / 20000`` for the orbit through ``state``.
    """
    x0, xi0 = float(state[0]), float(state[1])
    if t == 0:
        return x0, xi0
    E = float(energy(V, x0, xi0))
    region = None
    if dt is None:
        try:
            xm, xp = turning_points(V, E)
            dt = period(V, E) / FLOW_STEPS_PER_PERIOD
            region = (xm, xp)
        except (MultiCutDetected, DegenerateEdge, EmptyDroplet):
            dt = 1e-4
    nsteps = max(1, int(np.ceil(abs(t) / dt)))
    h = t / nsteps
    xs, xis = _orbit(V, x0, xi0, h, 1, nsteps, region)
    return float(xs[-1]), float(xis[-1])


@dataclass(frozen=True)
class OrbitData:
    lam: float
    x_minus: float
    x_plus: float
    T: float
    g: float
    theta: np.ndarray
    psi: np.ndarray
    xi: np.ndarray

    @property
    def dpsi(self):
        """``d psi / d theta = (T / pi) xi`` along the samples."""
        return self.T / np.pi * self.xi


@lru_cache(maxsize=256)
def _angle_cached(V, mu, M):
    xm, xp = turning_points(V, mu)
    T = period(V, mu)
    sps = int(np.ceil(FLOW_STEPS_PER_PERIOD / M))
    dt = T / (M * sps)
    xs, xis = _orbit(V, xp, 0.0, dt, M - 1, sps, (xm, xp))
    theta = 2.0 * np.pi * np.arange(M) / M
    return OrbitData(float(mu), xm, xp, T, action(V, mu), theta, xs, xis)


def angle_parametrization(V, mu, M=DEFAULT_M):
    """Sample ``psi(theta_m)``, ``theta_m = 2 pi m / M``, along the flow."""
    if M < 256 or M & (M - 1):
        raise ValueError("M must be a power of two >= 256")
    return _angle_cached(V, float(mu), int(M))


@dataclass(frozen=True)
class FlowFourier:
    I: float
    k: np.ndarray
    coeffs: np.ndarray
    tail: float  # sum over |k| > K of |k| |a_k|^2 among resolved modes

    def __getitem__(self, k):
        return self.coeffs[k + (len(self.k) - 1) // 2]


def flow_fourier_coefficients(f, V, lam, K=None, M=DEFAULT_M):
    """Fourier coefficients ``a_k`` of ``theta -> f(psi(theta))`` (kernel
    ``exp(-i k theta)``) for ``|k| <= K`` (default ``M / 4``)."""
    orb = angle_parametrization(V, lam, M)
    K = M // 4 if K is None else int(K)
    a = np.fft.fft(f(orb.psi)) / M
    idx = np.arange(-K, K + 1)
    coeffs = a[idx % M]
    if max(abs(coeffs[0]), abs(coeffs[-1])) >= 1e-8:
        warnings.warn(f"|a_K| = {abs(coeffs[-1]):.2e} at K = {K}", TruncationWarning,
                      stacklevel=2)
    kk = np.fft.fftfreq(M, 1.0 / M)
    outside = np.abs(kk) > K
    tail = float(np.sum(np.abs(kk[outside]) * np.abs(a[outside]) ** 2) / 2)
    return FlowFourier(orb.g, idx, coeffs, tail)


def predicted_variance_fourier(f, V, mu, M=DEFAULT_M, K=None):
    """``sum_{k >= 1} k |a_k|^2`` at the Fermi orbit."""
    ff = flow_fourier_coefficients(f, V, mu, K=K, M=M)
    K = (len(ff.k) - 1) // 2
    pos = ff.coeffs[K + 1:]
    return float(np.sum(np.arange(1, K + 1) * np.abs(pos) ** 2))


def devinatz_variance(f, V, mu, M=DEFAULT_M):
    """Double-integral form of the variance on the angle grid.

    The diagonal uses the limit of the difference quotient,
    ``(d/dtheta f(psi))^2``.
    """
    orb = angle_parametrization(V, mu, M)
    F = f(orb.psi)
    dF = f.derivative(orb.psi) * orb.dpsi
    total = np.sum(dF * dF)
    for d in range(1, M):
        diff = F - np.roll(F, d)
        total += np.sum(diff * diff) / (4.0 * np.sin(np.pi * d / M) ** 2)
    return float(0.5 * total / M**2)


def gff_kernel(V, mu, x, z):
    """``log|sin((th_x + th_z)/2)| - log|sin((th_x - th_z)/2)|``."""
    tx = np.atleast_1d(theta_map(V, mu, x))
    tz = np.atleast_1d(theta_map(V, mu, z))
    if np.any(np.abs(tx - tz) < 1e-10):
        raise SingularDiagonal("x and z coincide in angle")
    out = np.log(np.abs(np.sin((tx + tz) / 2))) - np.log(np.abs(np.sin((tx - tz) / 2)))
    return out if out.size > 1 else float(out[0])


def gff_variance(f, V, mu, n=160):
    """``(1 / 2 pi^2) iint f'(x) f'(z) H(x, z) dx dz`` over the droplet.

    Uses ``x = c + r cos u`` and splits the kernel as a smooth part plus
    ``-log|u - v|``; the log part is integrated with log-weighted quadrature.
    """
    xm, xp = turning_points(V, mu)
    c, r = 0.5 * (xp + xm), 0.5 * (xp - xm)
    T = period(V, mu)
    t, w = _gl(n)
    u = 0.5 * np.pi * (t + 1.0)
    wu = 0.5 * np.pi * w
    xu = c + r * np.cos(u)
    gu = f.derivative(xu) * r * np.sin(u)
    th = theta_map(V, mu, xu)
    # d theta / du, finite at the ends thanks to the cosine map
    dth = np.pi / T * r * np.sin(u) / np.sqrt(np.maximum(mu - V(xu), 1e-300))

    U, W = np.meshgrid(u, u, indexing="ij")
    TU, TW = np.meshgrid(th, th, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        S = (np.log(np.abs(np.sin((TU + TW) / 2)))
             - np.log(np.abs(np.sin((TU - TW) / 2))) + np.log(np.abs(U - W)))
    diag = np.log(np.abs(np.sin(th))) - np.log(dth / 2)
    S[np.diag_indices(n)] = diag
    smooth = (wu * gu) @ S @ (wu * gu)

    g = lambda v: float(f.derivative(c + r * np.cos(v)) * r * np.sin(v))  # noqa: E731
    logpart = np.empty(n)
    for i, ui in enumerate(u):
        right = quad(g, ui, np.pi, weight="alg-loga", wvar=(0.0, 0.0), limit=200)[0]
        left = quad(g, 0.0, ui, weight="alg-logb", wvar=(0.0, 0.0), limit=200)[0]
        logpart[i] = right + left
    total = smooth - np.sum(wu * gu * logpart)
    return float(total / (2.0 * np.pi**2))
