"""Exact sampling of the projection DPP on the grid and Monte Carlo checks."""
from dataclasses import dataclass

import numpy as np

from fermiszego import kernels

REORTH_EVERY = 16


def _rng(seed, index):
    # one independent stream per sample index
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


@dataclass(frozen=True)
class _Prepared:
    V: np.ndarray
    norms0: np.ndarray
    points: np.ndarray


def _prepare(proj):
    V = np.ascontiguousarray(proj.columns * np.sqrt(proj.grid.dx))
    norms0 = np.einsum("ij,ij->i", V, V)
    return _Prepared(V, norms0, proj.grid.points)


def sample_indices(proj, seed, index=0, prepared=None):
    """Grid indices (sorted) of one DPP draw; stream ``(seed, index)``."""
    if proj.N < 1:
        raise ValueError("projector has rank 0")
    prep = prepared or _prepare(proj)
    u = _rng(seed, index).random(proj.N)
    picks = kernels.dpp_sample(prep.V, prep.norms0, u, REORTH_EVERY)
    return np.sort(np.asarray(picks))


def sample_dpp(proj, seed, index=0):
    """One configuration of N grid points."""
    return proj.grid.points[sample_indices(proj, seed, index)]


@dataclass(frozen=True)
class SampleBatch:
    seed: int
    n_samples: int
    indices: np.ndarray  # (n_samples, N) sorted grid indices
    points_grid: np.ndarray

    @property
    def configurations(self):
        return self.points_grid[self.indices]

    def linear_statistic(self, f):
        return f(self.points_grid)[self.indices].sum(axis=1)


def sample_batch(proj, n_samples, seed):
    prep = _prepare(proj)
    idx = np.empty((n_samples, proj.N), dtype=np.int64)
    for i in range(n_samples):
        idx[i] = sample_indices(proj, seed, i, prep)
    return SampleBatch(int(seed), int(n_samples), idx, prep.points)


def _moments(X):
    """Mean, variance, skewness, excess kurtosis along the last axis."""
    m = X.mean(axis=-1)
    d = X - m[..., None]
    var = (d * d).mean(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        skew = np.where(var > 0, (d**3).mean(axis=-1) / var**1.5, 0.0)
        kurt = np.where(var > 0, (d**4).mean(axis=-1) / var**2 - 3.0, 0.0)
    n = X.shape[-1]
    return m, var * n / (n - 1), skew, kurt


@dataclass
class MomentReport:
    n_samples: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    se_mean: float
    se_variance: float
    se_skewness: float
    se_kurtosis: float
    target_mean: float
    target_variance: float

    def z(self, which):
        est, se, tgt = {
            "mean": (self.mean, self.se_mean, self.target_mean),
            "variance": (self.variance, self.se_variance, self.target_variance),
            "skewness": (self.skewness, self.se_skewness, 0.0),
            "kurtosis": (self.excess_kurtosis, self.se_kurtosis, 0.0),
        }[which]
        if se == 0:
            return 0.0 if est == tgt else np.inf
        return float((est - tgt) / se)

    def as_dict(self):
        d = dict(self.__dict__)
        d.update({f"z_{k}": self.z(k) for k in ("mean", "variance", "skewness", "kurtosis")})
        return d


def bootstrap_moments(X, n_boot=1000, seed=0, target_mean=np.nan, target_variance=np.nan):
    X = np.asarray(X, dtype=float)
    m, v, s, k = _moments(X)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(2**32 - 1,)))
    ses = []
    for chunk in np.array_split(np.arange(n_boot), max(1, n_boot // 100)):
        idx = rng.integers(0, X.size, size=(chunk.size, X.size))
        ses.append(np.stack(_moments(X[idx]), axis=0))
    boot = np.concatenate(ses, axis=1)
    se = boot.std(axis=1, ddof=1)
    return MomentReport(X.size, float(m), float(v), float(s), float(k),
                        *map(float, se), float(target_mean), float(target_variance))


def monte_carlo_clt(proj, f, n_samples, seed, target_variance=None, n_boot=1000,
                    batch=None):
    """Empirical moments of ``X(f)`` with bootstrap standard errors.

    ``target_variance`` defaults to the exact finite-hbar variance.
    """
    from fermiszego.determinantal import exact_variance, linear_statistic_mean

    if batch is None:
        batch = sample_batch(proj, n_samples, seed)
    X = batch.linear_statistic(f)
    tv = exact_variance(proj, f) if target_variance is None else target_variance
    return bootstrap_moments(X, n_boot, seed, linear_statistic_mean(proj, f), tv)


@dataclass
class CountingField:
    probes: np.ndarray
    covariance: np.ndarray
    stderr: np.ndarray


def empirical_counting_field(batch, probes, n_blocks=50):
    """Covariance of ``h(x) = #{points <= x}`` at ``probes`` with
    delete-one-block jackknife errors."""
    probes = np.asarray(probes, dtype=float)
    pts = batch.configurations
    H = (pts[:, :, None] <= probes[None, None, :]).sum(axis=1).astype(float)
    C = np.cov(H, rowvar=False)
    blocks = np.array_split(np.arange(H.shape[0]), n_blocks)
    reps = []
    for b in blocks:
        keep = np.ones(H.shape[0], bool)
        keep[b] = False
        reps.append(np.cov(H[keep], rowvar=False))
    reps = np.array(reps)
    g = len(blocks)
    se = np.sqrt((g - 1) / g * ((reps - reps.mean(axis=0)) ** 2).sum(axis=0))
    return CountingField(probes, np.atleast_2d(C), np.atleast_2d(se))
