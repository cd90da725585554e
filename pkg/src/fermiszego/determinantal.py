"""Exact finite-hbar statistics of the projection DPP on the grid.

All traces are taken in the discrete L^2 inner product with weight ``dx``;
``Phi`` denotes the ``n x N`` matrix of occupied eigenfunctions.
"""
import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor

from fermiszego import classical, kernels
from fermiszego.errors import NormTooLarge, SymbolTooLarge

ETA_STEP = 0.05


def _weights(proj):
    """Diagonal ``sum_j phi_j(x_i)^2 dx`` of the projector."""
    return proj.density() * proj.grid.dx


def _compress(proj, a):
    """``Phi^T diag(a) Phi dx`` for a symbol sampled on the grid."""
    Phi = proj.columns
    return Phi.T @ (a[:, None] * Phi) * proj.grid.dx


def linear_statistic_mean(proj, f):
    """``tr(f Pi)``."""
    return float(np.dot(f(proj.grid.points), _weights(proj)))


def exact_variance(proj, f, return_forms=False):
    """``tr(f^2 Pi) - tr(f Pi f Pi)``.

    With ``return_forms`` also returns the commutator form
    ``||(1 - Pi) f Pi||_HS^2``, which must agree to round-off.
    """
    fx = f(proj.grid.points)
    G = _compress(proj, fx)
    trace_form = float(np.dot(fx * fx, _weights(proj)) - np.sum(G * G))
    if not return_forms:
        return trace_form
    R = fx[:, None] * proj.columns - proj.columns @ G
    comm_form = float(np.sum(R * R) * proj.grid.dx)
    return trace_form, comm_form


def _symbol(proj, f, eta):
    a = np.expm1(eta * f(proj.grid.points))
    amax = float(np.max(np.abs(a))) if a.size else 0.0
    if amax >= 1.0:
        raise SymbolTooLarge(f"max|exp(eta f) - 1| = {amax:.4f} >= 1 at eta = {eta}")
    return a


def log_laplace(proj, f, eta):
    """``log det(I + (exp(eta f) - 1) Pi) = log E exp(eta X(f))``.

    Real ``eta``: pivoted LU.  Complex ``eta``: sum of principal logarithms of
    the eigenvalues of ``I_N + Phi^T a Phi dx`` (all lie in the disc
    ``|z - 1| < 1``, so the branch is continuous in ``eta``).
    """
    if proj.N == 0 or eta == 0:
        return 0.0 if np.isrealobj(eta) else 0j
    a = _symbol(proj, f, eta)
    M = np.eye(proj.N) + _compress(proj, a)
    if np.isrealobj(a):
        lu, _ = lu_factor(M, check_finite=False)
        return float(np.sum(np.log(np.abs(np.diag(lu)))))
    return complex(np.sum(np.log(np.linalg.eigvals(M))))


@dataclass
class CumulantReport:
    hbar: float
    f_name: str
    kappa1: float
    kappa2_exact: float
    kappa2_fd: float
    kappa3: float
    kappa4: float
    eta_step: float
    kappa3_half: float
    kappa4_half: float
    sigma2_fourier: Optional[float] = None
    sigma2_devinatz: Optional[float] = None
    sigma2_gff: Optional[float] = None
    szego_residual: Optional[float] = None

    @property
    def stencil_error(self):
        """Richardson-style estimate: change of kappa_3, kappa_4 when the step halves."""
        return (abs(self.kappa3 - self.kappa3_half), abs(self.kappa4 - self.kappa4_half))

    def as_dict(self):
        d = {k: v for k, v in self.__dict__.items()}
        d["stencil_error_k3"], d["stencil_error_k4"] = self.stencil_error
        return d


def _fd_cumulants(proj, f, h):
    L = {m: log_laplace(proj, f, m * h) for m in (-2, -1, 1, 2)}
    L[0] = 0.0
    k2 = (-L[2] + 16 * L[1] - 30 * L[0] + 16 * L[-1] - L[-2]) / (12 * h * h)
    k3 = (L[2] - 2 * L[1] + 2 * L[-1] - L[-2]) / (2 * h**3)
    k4 = (L[2] - 4 * L[1] + 6 * L[0] - 4 * L[-1] + L[-2]) / h**4
    return k2, k3, k4


def cumulants(proj, f, eta_step=ETA_STEP, name=""):
    """kappa_1, kappa_2 exactly; kappa_3, kappa_4 by five-point central
    differences of ``eta -> log_laplace``, repeated at half the step."""
    pts = proj.grid.points
    if np.max(np.abs(np.expm1(4 * eta_step * f(pts)))) >= 1.0:
        raise SymbolTooLarge(f"eta_step = {eta_step} too large for this f and box")
    k1 = linear_statistic_mean(proj, f)
    k2 = exact_variance(proj, f)
    k2fd, k3, k4 = _fd_cumulants(proj, f, eta_step)
    _, k3h, k4h = _fd_cumulants(proj, f, eta_step / 2)
    return CumulantReport(proj.hbar, name, k1, k2, k2fd, k3, k4, eta_step, k3h, k4h)


def szego_residual(proj, f, sigma2, etas=None, kappa1=None):
    """``max |log_laplace(eta) - eta kappa_1 - eta^2 sigma2 / 2|`` over ``etas``.

    Default ``etas``: 13 real points in [-0.3, 0.3] and 8 points on the
    complex circle of radius 0.3.
    """
    if etas is None:
        etas = np.concatenate([np.linspace(-0.3, 0.3, 13),
                               0.3 * np.exp(2j * np.pi * np.arange(8) / 8)])
    k1 = linear_statistic_mean(proj, f) if kappa1 is None else kappa1
    res = [abs(log_laplace(proj, f, e) - e * k1 - e * e * sigma2 / 2) for e in etas]
    return float(max(res))


# ------------------------------------------------------------------ Upsilon

@dataclass
class UpsilonResult:
    n: np.ndarray
    raw: np.ndarray          # tr(Pi A^n Pi) - tr((Pi A Pi)^n)
    upsilon: np.ndarray      # (-1)^n / n * raw
    rho: float
    commutator_hs2: float
    tail_bound: float

    @property
    def series(self):
        return complex(np.sum(self.upsilon)) if np.iscomplexobj(self.upsilon) \
            else float(np.sum(self.upsilon))

    def bound(self):
        n = self.n
        return n * (n - 1) / 4 * self.commutator_hs2 * self.rho ** (n - 2)

    def bound_holds(self, upto=8, slack=1e-12):
        """Bound checked on the raw trace differences (implies the scaled one)."""
        sel = self.n <= upto
        return bool(np.all(np.abs(self.raw[sel]) <= self.bound()[sel] * (1 + 1e-9) + slack))


def _power_norm(A, iters=200, seed=0):
    v = np.random.default_rng(seed).standard_normal(A.shape[1])
    lam = 0.0
    for _ in range(iters):
        w = A.conj().T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        new = np.sqrt(nw / np.linalg.norm(v))
        v = w / nw
        if abs(new - lam) < 1e-13 * max(new, 1.0):
            lam = new
            break
        lam = new
    return float(lam)


def upsilon_coefficients(proj, A, n_max=None, tol=1e-17, n_cap=5000):
    """Coefficients of ``log det(I + Pi A Pi) - tr(Pi log(1 + A) Pi)``.

    ``A`` is either a symbol sampled on the grid (1-D array: multiplication
    operator, traces are exact on the grid) or an operator on the grid
    (2-D array acting on grid vectors), which is compressed to the span of
    all eigenfunctions retained by the eigensolve.  Without ``n_max`` terms
    are added until they fall below ``tol`` for ten consecutive orders.
    """
    A = np.asarray(A)
    Phi_all = proj.source.eigenfunctions
    dx = proj.grid.dx
    N = proj.N
    if A.ndim == 1:
        rho = float(np.max(np.abs(A)))
        w = _weights(proj)
        G = _compress(proj, A)
        hs2 = 2.0 * float(np.dot(np.abs(A) ** 2, w) - np.sum(np.abs(G) ** 2))
        diag_pow = lambda n: np.dot(A**n, w)  # noqa: E731
        B = None
    else:
        B = Phi_all.T @ A @ Phi_all * dx
        rho = _power_norm(A)
        G = B[:N, :N]
        off1, off2 = B[N:, :N], B[:N, N:]
        hs2 = float(np.sum(np.abs(off1) ** 2) + np.sum(np.abs(off2) ** 2))
        diag_pow = None
    if rho >= 1.0:
        raise NormTooLarge(f"||A|| ~ {rho:.4f} >= 1")
    mu_G = np.linalg.eigvals(G) if N else np.zeros(0)
    cplx = np.iscomplexobj(A)
    ns, raws = [], []
    Y = B[:, :N].copy() if B is not None else None
    small = 0
    n = 1
    while True:
        n += 1
        if B is not None:
            Y = B @ Y if n > 2 else B @ B[:, :N]
            t_full = np.trace(Y[:N])
        else:
            t_full = diag_pow(n)
        t_comp = np.sum(mu_G**n)
        raw = t_full - t_comp
        raw = raw if cplx else float(np.real(raw))
        ns.append(n)
        raws.append(raw)
        if n_max is not None:
            if n >= n_max:
                break
            continue
        small = small + 1 if abs(raw) / n < tol else 0
        if small >= 10 or n >= n_cap:
            break
    ns = np.array(ns)
    raws = np.array(raws)
    ups = (-1.0) ** ns / ns * raws
    n_last = ns[-1]
    # commutator-bound tail: sum_{n > n_last} (n - 1) / 4 * hs2 * rho^(n - 2)
    m = np.arange(n_last + 1, n_last + 2001)
    tail = float(np.sum((m - 1) / 4 * hs2 * rho ** (m - 2.0))) if rho > 0 else 0.0
    return UpsilonResult(ns, raws, ups, rho, hs2, tail)


# --------------------------------------------------------- Toeplitz structure

@dataclass
class MatrixElements:
    window: tuple
    band: int
    entries: np.ndarray  # full block over the window (plus band margin)

    @property
    def hermiticity_residual(self):
        E = self.entries
        return float(np.max(np.abs(E - E.conj().T)))

    def off_band_max(self):
        E = self.entries
        idx = np.arange(E.shape[0])
        d = np.abs(idx[:, None] - idx[None, :])
        sel = d == self.band
        return float(np.max(np.abs(E[sel]))) if sel.any() else 0.0


def right_gauge(Phi):
    """Flip columns so each is positive at its last grid point above
    ``1e-3`` of its maximum (phases aligned at the right turning point)."""
    amax = np.max(np.abs(Phi), axis=0)
    big = np.abs(Phi) > 1e-3 * amax
    last = Phi.shape[0] - 1 - np.argmax(big[::-1], axis=0)
    s = np.sign(Phi[last, np.arange(Phi.shape[1])])
    s[s == 0] = 1.0
    return Phi * s


def matrix_elements(dec, f, window, band=2, decay_tol=1e-6, gauge="right"):
    """``A_jk = <phi_j, f phi_k>`` on ``window = (j0, j1)``; the band is
    enlarged until the entries at distance ``band`` fall below ``decay_tol``.

    ``gauge="right"`` rephases the eigenfunctions with :func:`right_gauge`,
    the phase convention in which the entries approach the flow-Fourier
    coefficients; ``gauge=None`` keeps the eigensolver's signs.
    """
    j0, j1 = window
    Phi = dec.eigenfunctions[:, j0:j1]
    if gauge == "right":
        Phi = right_gauge(Phi)
    E = Phi.T @ (f(dec.grid.points)[:, None] * Phi) * dec.grid.dx
    me = MatrixElements(window, band, E)
    while me.off_band_max() >= decay_tol and me.band < E.shape[0] - 1:
        me = MatrixElements(window, me.band + 1, E)
    return me


@dataclass
class ToeplitzDeviation:
    max_deviation: float
    rows: list = field(default_factory=list)  # (j, k, A_jk, a_hat, |diff|)


def toeplitz_deviation(dec, f, mu, band=2, window=0.05, V=None, M=1024,
                       return_details=False):
    """Max over a Fermi window of ``|A_jk - a_{k-j}(lam)|`` with
    ``g(lam) = (j + k) hbar / 2``.

    ``window`` is the half-width in action units around the Fermi index N;
    ``V`` is the potential the decomposition was computed for.
    """
    if V is None:
        raise ValueError("the potential V is required")
    hbar = dec.hbar
    N = int(np.count_nonzero(dec.eigenvalues <= mu))
    W = max(1, int(round(window / hbar)))
    j0, j1 = N - W, N + W
    if j0 - band < 0 or j1 + band + 1 > dec.eigenvalues.size:
        raise ValueError("eigensolve cap too low for the requested window")
    me = matrix_elements(dec, f, (j0 - band, j1 + band + 1), band=band)
    A = me.entries
    lam_cache = {}
    rows = []
    worst = 0.0
    for j in range(j0, j1 + 1):
        for k in range(j - band, j + band + 1):
            s = j + k
            if s not in lam_cache:
                lam = classical.inverse_action(V, s * hbar / 2)
                ff = classical.flow_fourier_coefficients(f, V, lam, K=band + 1, M=M)
                lam_cache[s] = ff
            ahat = lam_cache[s][k - j]
            val = A[j - j0 + band, k - j0 + band]
            dev = abs(val - ahat)
            worst = max(worst, dev)
            rows.append((j, k, float(val), complex(ahat), float(dev)))
    if return_details:
        return ToeplitzDeviation(float(worst), rows)
    return float(worst)


# ----------------------------------------------------------------------- DHK

@dataclass
class DHKResult:
    ok: bool
    n: int
    i_range: int
    n_tuples: int
    counterexample: Optional[tuple] = None

    def __bool__(self):
        return self.ok


def zero_sum_tuples(n, i_range):
    vals = range(-i_range, i_range + 1)
    tup = np.array([t for t in itertools.product(vals, repeat=n - 1)
                    if abs(sum(t)) <= i_range], dtype=np.int64).reshape(-1, n - 1)
    last = -tup.sum(axis=1, keepdims=True)
    return np.ascontiguousarray(np.hstack([tup, last]))


def dhk_sides(tuples, n):
    """Exact integer sides ``(2 L lhs, rhs)`` of the identity with ``L = lcm(1..n)``."""
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    L = reduce(math.lcm, range(1, n + 1), 1)
    lhs, rhs = kernels.dhk_sums(np.ascontiguousarray(tuples, dtype=np.int64),
                                np.ascontiguousarray(perms), L)
    return 2 * L * lhs, rhs


def dhk_check(n, i_range):
    """Check ``sum_sigma m_*(i_sigma) = sum_r (1/2r) sum_sigma |S_r(i_sigma)|``
    for every zero-sum tuple with entries in ``[-i_range, i_range]``."""
    if not 2 <= n <= 7:
        raise ValueError("n must be in 2..7")
    tuples = zero_sum_tuples(n, i_range)
    left, right = dhk_sides(tuples, n)
    bad = np.flatnonzero(left != right)
    if bad.size:
        return DHKResult(False, n, i_range, len(tuples), tuple(int(v) for v in tuples[bad[0]]))
    return DHKResult(True, n, i_range, len(tuples))


# ------------------------------------------------------------ counting field

def _mask_block(proj, x):
    m = proj.grid.points <= x
    Phi = proj.columns[m]
    return Phi.T @ Phi * proj.grid.dx


def counting_covariance(proj, x, z):
    """``Cov(#{points <= x}, #{points <= z})``."""
    Bx, Bz = _mask_block(proj, x), _mask_block(proj, z)
    Bmin = Bx if x <= z else Bz
    return float(np.trace(Bmin) - np.sum(Bx * Bz))
