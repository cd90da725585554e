"""Reference ensembles: Toeplitz determinants (CUE) and the GUE/harmonic case."""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, toeplitz


@dataclass(frozen=True)
class CircleSymbol:
    """Real function on the circle given by its Fourier coefficients.

    ``coeffs[K + k]`` holds ``f_k`` for ``k = -K..K``.
    """

    coeffs: np.ndarray

    @property
    def K(self):
        return (len(self.coeffs) - 1) // 2

    def __getitem__(self, k):
        return self.coeffs[self.K + k] if abs(k) <= self.K else 0.0

    @classmethod
    def from_function(cls, func, K=64, M=None):
        M = M or max(1024, 8 * K)
        theta = 2 * np.pi * np.arange(M) / M
        c = np.fft.fft(func(theta)) / M
        return cls(c[np.arange(-K, K + 1) % M])

    @classmethod
    def cosine(cls, amplitude, k):
        """``amplitude * cos(k theta)``."""
        c = np.zeros(2 * k + 1, dtype=complex)
        c[0] = c[-1] = amplitude / 2
        return cls(c)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        k = np.arange(-self.K, self.K + 1)
        return np.real(np.exp(1j * np.multiply.outer(theta, k)) @ self.coeffs)

    def tail(self):
        return float(max(abs(self.coeffs[0]), abs(self.coeffs[-1])))


def _grid_size(N, K):
    m = max(1024, 4 * N, 8 * K)
    return 1 << int(np.ceil(np.log2(m)))


def toeplitz_log_det(symbol, N, M=None):
    """``log det [ (e^f)_{i-j} ]_{i,j<N}`` via pivoted LU."""
    M = M or _grid_size(N, symbol.K)
    theta = 2 * np.pi * np.arange(M) / M
    g = np.fft.fft(np.exp(symbol(theta))) / M
    col = g[np.arange(N) % M]          # entries (i - j) >= 0
    row = g[(-np.arange(N)) % M]       # entries (i - j) <= 0
    T = toeplitz(col, row)
    if np.allclose(T.imag, 0, atol=1e-15):
        T = T.real
    lu, _ = lu_factor(T, check_finite=False)
    return float(np.sum(np.log(np.abs(np.diag(lu)))))


def szego_rhs(symbol):
    """``(1/2) sum_k |k| f_k f_{-k}``."""
    K = symbol.K
    k = np.arange(-K, K + 1)
    return float(np.real(0.5 * np.sum(np.abs(k) * symbol.coeffs * symbol.coeffs[::-1])))


def szego_residual(symbol, N):
    return toeplitz_log_det(symbol, N) - N * float(np.real(symbol[0])) - szego_rhs(symbol)


def gue_chebyshev_variance(f, M=4096):
    """``sum_{k >= 1} k |c_k|^2`` with ``c_k`` the Fourier coefficients of ``f(cos theta)``."""
    theta = 2 * np.pi * np.arange(M) / M
    c = np.fft.fft(f(np.cos(theta))) / M
    k = np.arange(1, M // 2)
    return float(np.sum(k * np.abs(c[k]) ** 2))


def cue_log_laplace(symbol, N, M=None):
    """``log det(I + (e^f - 1) Pi_N)`` for the CUE projector onto
    ``span{e^{i k theta}, 0 <= k < N}``, built on an explicit angle grid."""
    M = M or _grid_size(N, symbol.K)
    theta = 2 * np.pi * np.arange(M) / M
    dtheta = 2 * np.pi / M
    Phi = np.exp(1j * np.outer(theta, np.arange(N))) / np.sqrt(2 * np.pi)
    a = np.expm1(symbol(theta))
    G = np.eye(N) + Phi.conj().T @ (a[:, None] * Phi) * dtheta
    sign, logdet = np.linalg.slogdet(G)
    return float(logdet)


def log_symbol(rho, s, K=None):
    """Symbol ``f = 2 s sum_k rho^k / k cos(k theta)``, i.e.
    ``exp(f) = |1 - rho e^{i theta}|^{-2 s}`` (slow, geometric convergence)."""
    if K is None:
        K = int(np.ceil(np.log(1e-13) / np.log(rho))) + 1
    k = np.arange(1, K + 1)
    c = np.zeros(2 * K + 1, dtype=complex)
    c[K + k] = s * rho**k / k
    c[K - k] = s * rho**k / k
    return CircleSymbol(c)
