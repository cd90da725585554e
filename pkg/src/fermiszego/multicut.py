"""Multi-well potentials: localized wells, eigenvalue separation, projector
decomposition and additivity of the fluctuations.

Geometry
--------
The wells are the components ``C_j`` of ``{V <= mu + eps}``.  Between two
neighbouring components the separator ``x_b`` is the barrier top (maximum
of ``V``) and ``r`` its distance to the nearer component.  With the blend
width ``d = min r / 2``, the host interval ``I_j'`` runs from ``d / 2``
past the left separator to ``d / 2`` before the right one; outermost hosts
end where ``V`` reaches the plateau ``P = mu + 1 + eps``.  The localized
well ``W_j`` equals ``V`` on ``I_j'`` and blends into ``P`` with the quintic
smoothstep ``10t^3 - 15t^4 + 6t^5`` over width ``d``, so the blend sits in
the forbidden region well away from the turning points.  A weight ``w_j``
shifts the whole well, so its spectrum is the unshifted one plus ``w_j``.
The full perturbed potential is ``V + sum_j w_j chi_j`` with ``chi_j`` a
smooth plateau equal to 1 on ``I_j'`` and tapering over the same width.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from fermiszego import classical, determinantal, schrodinger
from fermiszego.errors import NotMultiCut, SeparationFailed
from fermiszego.potentials import Cutoff, PotentialSpec, minimum, sublevel_components


def _quintic(t):
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10 - 15 * t + 6 * t * t)


def _quintic_deriv(t):
    inside = (t > 0) & (t < 1)
    tc = np.clip(t, 0.0, 1.0)
    return np.where(inside, 30 * tc * tc * (1 - tc) ** 2, 0.0)


@dataclass(frozen=True)
class LocalizedWell:
    """``V`` on ``[a, b]``, blended to ``plateau`` over width ``d``, plus ``shift``."""

    base: PotentialSpec
    a: float
    b: float
    d: float
    plateau: float
    shift: float = 0.0

    def shifted(self, w):
        return replace(self, shift=float(w))

    def _blend(self, x):
        tl = (self.a - x) / self.d
        tr = (x - self.b) / self.d
        return np.where(x < self.a, tl, np.where(x > self.b, tr, 0.0))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = self.base(x)
        s = _quintic(self._blend(x))
        return v + s * (self.plateau - v) + self.shift

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        v, dv = self.base(x), self.base.derivative(x)
        t = self._blend(x)
        dt = np.where(x < self.a, -1.0 / self.d, np.where(x > self.b, 1.0 / self.d, 0.0))
        s = _quintic(t)
        return dv * (1 - s) + _quintic_deriv(t) * dt * (self.plateau - v)

    def dv_poly_on(self, lo, hi):
        if self.a <= lo and hi <= self.b:
            return self.base.dv_poly_on(lo, hi)
        return None

    def search_interval(self, level):
        return self.a - self.d, self.b + self.d


def host_intervals(V, mu, eps, plateau):
    """Host intervals ``I_j'`` and blend width ``d`` (see module notes)."""
    comps = sublevel_components(V, mu + eps)
    if len(comps) < 2:
        return [(a, b) for a, b in comps], 0.0
    neg = lambda x: -V(x)  # noqa: E731
    seps, reach = [], []
    for (_, b0), (a1, _) in zip(comps, comps[1:]):
        xb = float(minimum(neg, b0, a1)[0])
        seps.append(xb)
        reach.append(min(xb - b0, a1 - xb))
    d = 0.5 * min(reach)
    outer = sublevel_components(V, plateau)
    lo, hi = outer[0][0], outer[-1][1]
    edges = [lo] + [e for xb in seps for e in (xb - d / 2, xb + d / 2)] + [hi]
    return [(edges[2 * i], edges[2 * i + 1]) for i in range(len(comps))], d


@dataclass(frozen=True)
class WellFamily:
    spec: PotentialSpec
    mu: float
    eps: float
    w: tuple
    hosts: tuple
    d: float
    plateau: float

    @property
    def ell(self):
        return len(self.hosts)

    @property
    def base_wells(self):
        return tuple(LocalizedWell(self.spec, a, b, self.d, self.plateau)
                     for a, b in self.hosts)

    @property
    def wells(self):
        return tuple(W.shifted(wj) for W, wj in zip(self.base_wells, self.w))

    @property
    def full(self):
        cuts = tuple(Cutoff(wj, a, b, self.d) for wj, (a, b) in zip(self.w, self.hosts))
        return PotentialSpec("multicut_perturbed", tuple(self.spec.poly), cuts)

    def with_weights(self, w):
        return replace(self, w=tuple(float(v) for v in w))

    def check(self, points):
        """Grid check that each ``W_j`` exceeds ``mu + eps/2`` outside its
        host interval, and that each well is one-cut at ``mu``."""
        ok = True
        for (a, b), W in zip(self.hosts, self.wells):
            outside = (points < a) | (points > b)
            ok &= bool(np.all(W(points[outside]) >= self.mu + self.eps / 2))
            classical.turning_points(W, self.mu)
        return ok


def build_well_family(V, mu, w, eps, plateau_offset=1.0):
    """Localized wells of ``V`` at Fermi level ``mu`` with weights ``w``."""
    w = tuple(float(v) for v in w)
    plateau = float(mu + plateau_offset + eps)
    hosts, d = host_intervals(V, mu, eps, plateau)
    if len(hosts) < 2 or len(hosts) != len(w):
        raise NotMultiCut(f"{{V <= mu + eps}} has {len(hosts)} components, "
                          f"{len(w)} weights given")
    return WellFamily(V, float(mu), float(eps), w, tuple(hosts), d, plateau)


# ---------------------------------------------------------------- spectra

@dataclass(frozen=True)
class FamilySpectra:
    """Unshifted per-well eigensolves on a grid shared with the full potential."""

    hbar: float
    grid: schrodinger.Grid
    wells: tuple  # SpectralDecomposition per base well
    cap: float


def separation_half_width(family, hbar):
    T = min(classical.period(W, family.mu) for W in family.wells)
    return max(family.eps, 2 * np.pi * hbar / T)


def family_spectra(family, hbar, box, n=None, tol=0.05):
    if n is None:
        n = schrodinger.auto_n(family.spec, box, family.mu, hbar, tol)
    grid = schrodinger.build_grid(box[0], box[1], n)
    T = min(classical.period(W, family.mu) for W in family.base_wells)
    hw = max(family.eps, 2 * np.pi * hbar / T)
    cap = family.mu + 2 * hw + 2 * family.eps
    decs = []
    for W in family.base_wells:
        H = schrodinger.discretize_hamiltonian(grid, W, hbar, mu_max=family.mu)
        decs.append(schrodinger.eigendecompose(H, cap))
    return FamilySpectra(float(hbar), grid, tuple(decs), cap)


@dataclass
class SeparationReport:
    min_cross_gap: float
    min_mu_distance: float
    threshold: float
    window: tuple

    @property
    def cross_ok(self):
        return self.min_cross_gap > self.threshold

    @property
    def mu_ok(self):
        return self.min_mu_distance > self.threshold

    @property
    def passed(self):
        return self.cross_ok and self.mu_ok


def separation_from_spectra(eigs, mu, half_width, threshold):
    """Separation minima for per-well eigenvalue lists inside
    ``[mu - half_width, mu + half_width]``."""
    lo, hi = mu - half_width, mu + half_width
    sel = [np.asarray(e)[(np.asarray(e) >= lo) & (np.asarray(e) <= hi)] for e in eigs]
    cross = np.inf
    for i in range(len(sel)):
        for j in range(i + 1, len(sel)):
            if sel[i].size and sel[j].size:
                cross = min(cross, float(np.min(np.abs(sel[i][:, None] - sel[j][None, :]))))
    allw = np.concatenate([s for s in sel]) if sel else np.zeros(0)
    dmu = float(np.min(np.abs(allw - mu))) if allw.size else np.inf
    return SeparationReport(cross, dmu, float(threshold), (lo, hi))


def separation_report(family, hbar, spectra=None, box=None, delta=None):
    """Cross-well gaps and distances to ``mu`` near the Fermi level;
    threshold ``delta`` defaults to ``hbar^3``."""
    if spectra is None:
        spectra = family_spectra(family, hbar, box)
    delta = hbar**3 if delta is None else delta
    eigs = [dec.eigenvalues + wj for dec, wj in zip(spectra.wells, family.w)]
    hw = separation_half_width(family, hbar)
    return separation_from_spectra(eigs, family.mu, hw, delta)


# ---------------------------------------------------------- decomposition

def _gap_tol(hbar):
    # separated families only guarantee distance hbar^3 from mu
    return hbar**3


def _well_projectors(family, spectra):
    projs = []
    for dec, wj in zip(spectra.wells, family.w):
        shifted = replace(dec, eigenvalues=dec.eigenvalues + wj, cap=dec.cap + wj)
        projs.append(schrodinger.spectral_projector(shifted, family.mu,
                                                    _gap_tol(spectra.hbar)))
    return projs


def full_projector(family, spectra):
    H = schrodinger.discretize_hamiltonian(spectra.grid, family.full, spectra.hbar,
                                           mu_max=family.mu)
    dec = schrodinger.eigendecompose(H, family.mu + 0.5 * (spectra.cap - family.mu))
    return schrodinger.spectral_projector(dec, family.mu, _gap_tol(spectra.hbar))


def _hs_kernel_difference(Phi, Psis, dx, chunk=1024):
    n = Phi.shape[0]
    total = 0.0
    for s in range(0, n, chunk):
        D = Phi[s:s + chunk] @ Phi.T
        for Psi in Psis:
            D -= Psi[s:s + chunk] @ Psi.T
        total += float(np.sum(D * D))
    return np.sqrt(total) * dx


@dataclass
class DecompositionReport:
    hs_error: float
    commutators: dict
    N_full: int
    N_wells: tuple

    @property
    def rank_additive(self):
        return self.N_full == sum(self.N_wells)


def projector_decomposition_error(family, hbar, spectra=None, box=None, check=True):
    """Hilbert-Schmidt norm of ``Pi - sum_j Pi_j`` and of the pairwise
    commutators ``[Pi_i, Pi_j]``."""
    if spectra is None:
        spectra = family_spectra(family, hbar, box)
    if check:
        rep = separation_report(family, hbar, spectra)
        if not rep.passed:
            raise SeparationFailed(f"separation fails: {rep}")
    P = full_projector(family, spectra)
    Pj = _well_projectors(family, spectra)
    dx = spectra.grid.dx
    err = _hs_kernel_difference(P.columns, [p.columns for p in Pj], dx)
    comms = {}
    for i in range(len(Pj)):
        for j in range(i + 1, len(Pj)):
            C = Pj[i].columns.T @ Pj[j].columns * dx
            hs2 = 2.0 * (np.sum(C * C) - np.sum((C @ C.T) ** 2))
            comms[(i, j)] = float(np.sqrt(max(hs2, 0.0)))
    return DecompositionReport(err, comms, P.N, tuple(p.N for p in Pj))


@dataclass
class MulticutVarianceReport:
    var_full: float
    var_wells_exact: tuple
    var_wells_classical: tuple
    log_laplace_full: float
    log_laplace_wells: tuple
    eta: float

    @property
    def rel_gap_classical(self):
        s = sum(self.var_wells_classical)
        return abs(self.var_full - s) / abs(s)

    @property
    def rel_gap_exact(self):
        s = sum(self.var_wells_exact)
        return abs(self.var_full - s) / abs(s)

    @property
    def log_laplace_gap(self):
        return abs(self.log_laplace_full - sum(self.log_laplace_wells))


def multicut_variance_check(family, hbar, f, eta=0.2, spectra=None, box=None, check=True,
                            M=classical.DEFAULT_M):
    """Compare the full-projector variance and log-Laplace transform with
    the sums over the localized wells."""
    if spectra is None:
        spectra = family_spectra(family, hbar, box)
    if check and not separation_report(family, hbar, spectra).passed:
        raise SeparationFailed("separation fails for this family")
    P = full_projector(family, spectra)
    Pj = _well_projectors(family, spectra)
    cls = tuple(classical.predicted_variance_fourier(f, W, family.mu, M=M)
                for W in family.wells)
    return MulticutVarianceReport(
        determinantal.exact_variance(P, f),
        tuple(determinantal.exact_variance(p, f) for p in Pj),
        cls,
        determinantal.log_laplace(P, f, eta),
        tuple(determinantal.log_laplace(p, f, eta) for p in Pj),
        eta,
    )


# ------------------------------------------------------------ genericity scan

def draw_weights(seed, draw_id, ell, eps):
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(draw_id),)))
    return tuple(rng.uniform(-eps, eps, ell)) if eps > 0 else (0.0,) * ell


@dataclass
class ScanResult:
    pass_rate: dict
    rows: list = field(default_factory=list)  # (hbar, draw_id, passed, min_gap, min_mu_dist)


def resonance_scan(V, mu, eps, hbars, n_draws, seed, box, eps_family=None, ell=2):
    """Empirical pass rate of the separation test for random weights.

    Host intervals are built with ``eps_family`` (default ``eps``); weights
    are drawn uniformly from ``[-eps, eps]^ell``.
    """
    base = build_well_family(V, mu, (0.0,) * ell, eps if eps_family is None else eps_family)
    out = ScanResult({})
    for h in hbars:
        spectra = family_spectra(base, h, box)
        passed = 0
        for k in range(n_draws):
            fam = base.with_weights(draw_weights(seed, k, ell, eps))
            rep = separation_report(fam, h, spectra)
            passed += rep.passed
            out.rows.append((h, k, rep.passed, rep.min_cross_gap, rep.min_mu_distance))
        out.pass_rate[h] = passed / n_draws
    return out
