"""Finite-difference discretisation of -hbar^2 d^2/dx^2 + V and its spectral projector."""
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.linalg import LinAlgError, eigh_tridiagonal

from fermiszego.errors import (
    AmbiguousFermiLevel,
    BoxTooSmall,
    EigenSolveError,
    ValidationError,
)
from fermiszego.potentials import minimum, sublevel_components


@dataclass(frozen=True)
class Grid:
    """Interior nodes of a uniform grid on ``[x_min, x_max]`` (Dirichlet ends)."""

    x_min: float
    x_max: float
    n: int

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.n + 1)

    @property
    def points(self):
        return self.x_min + self.dx * np.arange(1, self.n + 1)


def build_grid(x_min, x_max, n):
    if not np.isfinite(x_min) or not np.isfinite(x_max) or not x_min < x_max:
        raise ValidationError(f"degenerate interval [{x_min}, {x_max}]")
    if int(n) != n or n < 16:
        raise ValidationError(f"need n >= 16 interior points, got {n}")
    return Grid(float(x_min), float(x_max), int(n))


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    diag: np.ndarray
    offdiag: np.ndarray
    grid: Grid
    hbar: float


def discretize_hamiltonian(grid, V, hbar, mu_max=None, margin=0.0):
    """Three-point stencil for ``-hbar^2 d^2/dx^2 + V`` on ``grid``.

    If ``mu_max`` is given, the potential at both box ends must exceed
    ``mu_max + margin`` or :class:`BoxTooSmall` is raised.
    """
    if hbar <= 0:
        raise ValidationError("hbar must be positive")
    if mu_max is not None:
        ends = V(np.array([grid.x_min, grid.x_max]))
        if np.min(ends) <= mu_max + margin:
            raise BoxTooSmall(
                f"V at box ends {ends} not above mu_max + margin = {mu_max + margin}"
            )
    c = hbar * hbar / grid.dx**2
    diag = 2.0 * c + V(grid.points)
    off = np.full(grid.n - 1, -c)
    return TridiagonalHamiltonian(diag, off, grid, float(hbar))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs with eigenvalue <= ``cap``; columns of ``eigenfunctions``
    are normalised so that ``sum(phi**2) * dx == 1``."""

    hbar: float
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    grid: Grid
    cap: float

    def orthonormality_residual(self):
        Phi = self.eigenfunctions
        G = Phi.T @ Phi * self.grid.dx
        return float(np.max(np.abs(G - np.eye(G.shape[0])))) if G.size else 0.0


def _fix_signs(vecs):
    amax = np.max(np.abs(vecs), axis=0)
    first = np.argmax(np.abs(vecs) > 1e-3 * amax, axis=0)
    signs = np.sign(vecs[first, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def eigendecompose(H, lambda_cap):
    """All eigenpairs of ``H`` with eigenvalue <= ``lambda_cap``."""
    try:
        w, v = eigh_tridiagonal(
            H.diag, H.offdiag, select="v", select_range=(-np.inf, lambda_cap),
            lapack_driver="stemr",
        )
    except LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenSolveError(str(exc)) from exc
    dx = H.grid.dx
    v = _fix_signs(v / np.sqrt(dx)) if v.size else v.reshape(H.grid.n, 0)
    return SpectralDecomposition(H.hbar, w, np.ascontiguousarray(v), H.grid, float(lambda_cap))


@dataclass(frozen=True)
class Projector:
    """Rank-N spectral projector stored as eigenfunction columns."""

    N: int
    mu: float
    columns: np.ndarray
    source: SpectralDecomposition

    @property
    def grid(self):
        return self.source.grid

    @property
    def hbar(self):
        return self.source.hbar

    def kernel(self):
        """Kernel matrix ``K(x_i, x_j) = sum_k phi_k(x_i) phi_k(x_j)``."""
        return self.columns @ self.columns.T

    def density(self):
        """Diagonal ``K(x_i, x_i)``."""
        return np.einsum("ij,ij->i", self.columns, self.columns)

    def idempotency_residual(self):
        K = self.kernel()
        return float(np.max(np.abs(K @ K * self.grid.dx - K))) if self.N else 0.0


def spectral_projector(dec, mu, gap_tol=None):
    """Projector onto eigenvalues <= ``mu``.

    Raises :class:`AmbiguousFermiLevel` when an eigenvalue lies within
    ``gap_tol`` (default ``1e-3 * hbar``) of ``mu``.
    """
    if gap_tol is None:
        gap_tol = 1e-3 * dec.hbar
    if mu + gap_tol > dec.cap:
        raise ValidationError(f"mu = {mu} is not below the eigensolve cap {dec.cap}")
    lam = dec.eigenvalues
    if lam.size:
        j = int(np.argmin(np.abs(lam - mu)))
        if abs(lam[j] - mu) <= gap_tol:
            raise AmbiguousFermiLevel(mu, float(lam[j]), gap_tol)
    N = int(np.count_nonzero(lam <= mu))
    return Projector(N, float(mu), dec.eigenfunctions[:, :N], dec)


def weyl_count(V, mu, hbar):
    """Semiclassical particle number ``(1/(pi hbar)) int (mu - V)_+^(1/2) dx``."""
    total = 0.0
    for a, b in sublevel_components(V, mu):
        val, _ = quad(lambda x: np.sqrt(max(mu - float(V(x)), 0.0)), a, b,
                      epsabs=1e-13, epsrel=1e-12, limit=200)
        total += val
    return total / (np.pi * hbar)


# ---------------------------------------------------------------- grid policy

def auto_box(V, mu_max, hbar, clearance=2.0, agmon=30.0):
    """Box whose ends satisfy ``V >= mu_max + clearance`` and lie at Agmon
    distance ``>= agmon`` from the classically allowed set."""
    comps = sublevel_components(V, mu_max + clearance)
    if not comps:
        raise ValidationError("potential never drops below mu_max + clearance")
    lo, hi = comps[0][0], comps[-1][1]
    allowed = sublevel_components(V, mu_max)
    if allowed:
        a0, b0 = allowed[0][0], allowed[-1][1]
        decay = lambda t: np.sqrt(max(float(V(t)) - mu_max, 0.0)) / hbar  # noqa: E731
        step = 0.05
        while quad(decay, lo, a0, limit=200)[0] < agmon:
            lo -= step
        while quad(decay, b0, hi, limit=200)[0] < agmon:
            hi += step
    return float(lo), float(hi)


def auto_n(V, box, mu_max, hbar, tol=0.05):
    """Number of interior nodes so the stencil dispersion error at the
    largest classical momentum stays below ``tol * hbar``."""
    vmin = minimum(V, *box)[1]
    p2 = max(mu_max - vmin, 1e-12)
    dx = hbar**1.5 * np.sqrt(12.0 * tol) / p2
    return max(16, int(np.ceil((box[1] - box[0]) / dx)) - 1)


def solve(V, hbar, mu, box=None, n=None, lambda_cap=None, tol=0.05, margin=0.0):
    """Convenience: grid, Hamiltonian, eigensolve and projector in one call."""
    cap = mu + 0.5 if lambda_cap is None else lambda_cap
    if box is None:
        box = auto_box(V, cap, hbar)
    if n is None:
        n = auto_n(V, box, mu, hbar, tol)
    grid = build_grid(box[0], box[1], n)
    H = discretize_hamiltonian(grid, V, hbar, mu_max=mu, margin=margin)
    dec = eigendecompose(H, cap)
    return dec, spectral_projector(dec, mu)


def write_spectrum_csv(dec, stem):
    """Write ``<stem>_eigenvalues.csv`` and ``<stem>_eigenfunctions.csv``."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    with open(f"{stem}_eigenvalues.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "lambda"])
        for j, lam in enumerate(dec.eigenvalues):
            w.writerow([j, "%.17g" % lam])
    data = np.column_stack([dec.grid.points, dec.eigenfunctions])
    header = ",".join(["x"] + [f"phi_{j}" for j in range(dec.eigenfunctions.shape[1])])
    np.savetxt(f"{stem}_eigenfunctions.csv", data, delimiter=",", fmt="%.17g",
               header=header, comments="")
