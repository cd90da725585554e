"""Confining potentials on the line.

Every potential object used by the solvers follows the same small protocol:

``V(x)``
    vectorised evaluation,
``V.derivative(x)``
    vectorised V',
``V.dv_poly_on(lo, hi)``
    ascending coefficients of V' when V is a polynomial on ``[lo, hi]``
    (lets the compiled flow integrator run), otherwise ``None``,
``V.search_interval(level)``
    an interval outside of which ``V > level``.
"""
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq, minimize_scalar

from fermiszego.errors import ValidationError

KINDS = ("harmonic", "double_well", "quartic", "custom_polynomial", "multicut_perturbed")


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(tc > 0, np.exp(-1.0 / np.where(tc > 0, tc, 1.0)), 0.0)
        b = np.where(tc < 1, np.exp(-1.0 / np.where(tc < 1, 1.0 - tc, 1.0)), 0.0)
    return a / (a + b)


def smooth_step_deriv(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    a = np.exp(-1.0 / ti)
    b = np.exp(-1.0 / (1.0 - ti))
    da = a / ti**2
    db = -b / (1.0 - ti) ** 2
    out[inside] = (da * (a + b) - a * (da + db)) / (a + b) ** 2
    return out


@dataclass(frozen=True)
class Cutoff:
    """Smooth plateau: 1 on [a, b], 0 outside [a - taper, b + taper]."""

    weight: float
    a: float
    b: float
    taper: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        left = smooth_step((x - (self.a - self.taper)) / self.taper)
        right = smooth_step(((self.b + self.taper) - x) / self.taper)
        return left * right

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        tl = (x - (self.a - self.taper)) / self.taper
        tr = ((self.b + self.taper) - x) / self.taper
        return (
            smooth_step_deriv(tl) * smooth_step(tr) - smooth_step(tl) * smooth_step_deriv(tr)
        ) / self.taper


@dataclass(frozen=True)
class PotentialSpec:
    """Polynomial potential, optionally with smooth localized shifts.

    Parameters
    ----------
    kind : str
        ``harmonic`` (c x^2), ``quartic`` (c x^4), ``double_well``
        (a x^4 - b x^2), ``custom_polynomial`` (ascending coefficients) or
        ``multicut_perturbed`` (custom polynomial plus ``sum_j w_j chi_j``).
    coefficients : sequence of float
        Kind-dependent parameters; empty means the unit-coefficient default.
    perturbation : sequence of Cutoff
        Only for ``multicut_perturbed``.
    """

    kind: str
    coefficients: tuple = ()
    perturbation: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown potential kind {self.kind!r}")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "perturbation", tuple(self.perturbation))
        if self.perturbation and self.kind != "multicut_perturbed":
            raise ValidationError("perturbation is only allowed for multicut_perturbed")
        poly = self.poly
        if len(poly) < 3 or poly[-1] <= 0 or (len(poly) - 1) % 2:
            raise ValidationError("potential must be an even-degree polynomial with positive lead")

    @property
    def poly(self):
        """Ascending polynomial coefficients of the unperturbed part."""
        c = self.coefficients
        if self.kind == "harmonic":
            return np.array([0.0, 0.0, c[0] if c else 1.0])
        if self.kind == "quartic":
            return np.array([0.0, 0.0, 0.0, 0.0, c[0] if c else 1.0])
        if self.kind == "double_well":
            a, b = c if c else (1.0, 1.0)
            return np.array([0.0, 0.0, -b, 0.0, a])
        return np.trim_zeros(np.array(c, dtype=float), "b")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = P.polyval(x, self.poly)
        for cut in self.perturbation:
            v = v + cut.weight * cut(x)
        return v

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        d = P.polyval(x, P.polyder(self.poly))
        for cut in self.perturbation:
            d = d + cut.weight * cut.derivative(x)
        return d

    def dv_poly_on(self, lo, hi):
        for cut in self.perturbation:
            on_plateau = cut.a <= lo and hi <= cut.b
            off_support = hi <= cut.a - cut.taper or lo >= cut.b + cut.taper
            if not (on_plateau or off_support):
                return None
        return np.ascontiguousarray(P.polyder(self.poly), dtype=float)

    def search_interval(self, level):
        # Cauchy root bound of poly - level, widened by the perturbation size
        c = self.poly.copy()
        c[0] -= level + sum(abs(cut.weight) for cut in self.perturbation)
        r = 1.0 + np.max(np.abs(c[:-1] / c[-1]))
        return -r, r


def minimum(V, lo=None, hi=None, n_scan=4001):
    """Global minimum of V on ``[lo, hi]`` (scan, then bounded refinement)."""
    if lo is None:
        lo, hi = V.search_interval(float(V(0.0)))
    x = np.linspace(lo, hi, n_scan)
    vals = V(x)
    i = int(np.argmin(vals))
    a, b = x[max(i - 1, 0)], x[min(i + 1, n_scan - 1)]
    res = minimize_scalar(lambda t: float(V(t)), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12})
    return (res.x, res.fun) if res.fun < vals[i] else (x[i], vals[i])


def sublevel_components(V, level, lo=None, hi=None, n_scan=8001, xtol=1e-15):
    """Connected components of ``{V <= level}`` as a list of (left, right) roots.

    Components are isolated on a scan grid and their endpoints refined with
    Brent's method.
    """
    if lo is None:
        lo, hi = V.search_interval(level)
    x = np.linspace(lo, hi, n_scan)
    inside = V(x) <= level
    if not inside.any():
        return []
    edges = np.diff(inside.astype(np.int8))
    starts = list(np.flatnonzero(edges == 1) + 1)
    ends = list(np.flatnonzero(edges == -1))
    if inside[0]:
        starts.insert(0, 0)
    if inside[-1]:
        ends.append(n_scan - 1)
    g = lambda t: float(V(t)) - level  # noqa: E731
    comps = []
    for s, e in zip(starts, ends):
        left = brentq(g, x[s - 1], x[s], xtol=xtol, rtol=1e-15) if s > 0 else x[0]
        right = brentq(g, x[e], x[e + 1], xtol=xtol, rtol=1e-15) if e < n_scan - 1 else x[-1]
        comps.append((left, right))
    return comps
