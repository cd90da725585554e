# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.

Every function here has a pure-Python twin in ``_pykernels`` with the same
signature and the same arithmetic order where it matters (inverse-CDF
search in the sampler), so the two backends are interchangeable.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from scipy.linalg.cython_blas cimport dgemm, dgemv

from fermiszego.errors import NumericalDegeneracy

cnp.import_array()

# Yoshida triple-jump weights (4th order composition of leapfrog)
cdef double _CBRT2 = 2.0 ** (1.0 / 3.0)
cdef double _W1 = 1.0 / (2.0 - _CBRT2)
cdef double _W0 = -_CBRT2 / (2.0 - _CBRT2)


cdef inline double _horner(const double[::1] c, Py_ssize_t m, double x) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t k
    for k in range(m - 1, -1, -1):
        acc = acc * x + c[k]
    return acc


cdef inline void _leapfrog(const double[::1] c, Py_ssize_t m, double h,
                           double* x, double* xi) noexcept nogil:
    # H = xi^2 + V(x):  dx/dt = 2 xi,  dxi/dt = -V'(x)
    xi[0] -= 0.5 * h * _horner(c, m, x[0])
    x[0] += 2.0 * h * xi[0]
    xi[0] -= 0.5 * h * _horner(c, m, x[0])


def symplectic_orbit(double[::1] dv_coeffs, double x0, double xi0, double dt,
                     Py_ssize_t n_samples, Py_ssize_t steps_per_sample, int order=4):
    """Sample the flow of xi^2 + V with V' given by ascending coefficients.

    Returns arrays of length ``n_samples + 1`` taken every
    ``steps_per_sample`` steps of size ``dt`` (sample 0 is the initial state).
    """
    cdef Py_ssize_t m = dv_coeffs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.empty(n_samples + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xis = np.empty(n_samples + 1)
    cdef double[::1] xs_v = xs
    cdef double[::1] xis_v = xis
    cdef double x = x0, xi = xi0
    cdef double h1 = _W1 * dt, h0 = _W0 * dt
    cdef Py_ssize_t s, k
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    xs_v[0] = x
    xis_v[0] = xi
    with nogil:
        for s in range(1, n_samples + 1):
            for k in range(steps_per_sample):
                if order == 2:
                    _leapfrog(dv_coeffs, m, dt, &x, &xi)
                else:
                    _leapfrog(dv_coeffs, m, h1, &x, &xi)
                    _leapfrog(dv_coeffs, m, h0, &x, &xi)
                    _leapfrog(dv_coeffs, m, h1, &x, &xi)
            xs_v[s] = x
            xis_v[s] = xi
    return xs, xis


def dpp_sample(double[:, ::1] V, double[::1] norms0, double[::1] uniforms,
               Py_ssize_t reorth_every=16):
    """Sequential sampler for the projection DPP with kernel V V^T.

    ``V`` is n x N with orthonormal columns, ``norms0`` its squared row
    norms and ``uniforms`` one U(0,1) draw per point.  Returns the N
    selected row indices in selection order.
    """
    cdef Py_ssize_t n = V.shape[0], N = V.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] picks = np.empty(N, dtype=np.int64)
    cdef double[::1] r = np.array(norms0, dtype=np.float64)
    cdef double[:, ::1] E = np.zeros((N, N))
    cdef double[::1] e = np.empty(N)
    cdef double[::1] c = np.empty(n)
    cdef double[::1] R = np.empty(n * N)
    cdef char transn = b'N'
    cdef int gm, gn, gk, ldc
    cdef Py_ssize_t t, i, j, s, k, sel, p
    cdef double total, target, run, dot, nrm, rmin
    cdef char trans = b'T'
    cdef int bm = <int>N, bn = <int>n, lda = <int>N, inc = 1
    cdef double one = 1.0, zero = 0.0

    for t in range(N):
        total = 0.0
        for i in range(n):
            total += r[i]
        target = uniforms[t] * total
        run = 0.0
        sel = -1
        for i in range(n):
            run += r[i]
            if run > target:
                sel = i
                break
        if sel < 0:
            # round-off at the top of the CDF: last index with positive mass
            for i in range(n - 1, -1, -1):
                if r[i] > 0.0:
                    sel = i
                    break
        picks[t] = sel

        for j in range(N):
            e[j] = V[sel, j]
        # classical Gram-Schmidt, applied twice
        for p in range(2):
            for s in range(t):
                dot = 0.0
                for j in range(N):
                    dot += E[s, j] * e[j]
                for j in range(N):
                    e[j] -= dot * E[s, j]
        nrm = 0.0
        for j in range(N):
            nrm += e[j] * e[j]
        if nrm <= 1e-20:
            raise NumericalDegeneracy(
                f"selected row {sel} lies in the span of earlier picks (step {t})")
        nrm = sqrt(nrm)
        for j in range(N):
            e[j] /= nrm
            E[t, j] = e[j]

        # c = V e  (row-major V is a column-major N x n matrix)
        dgemv(&trans, &bm, &bn, &one, &V[0, 0], &lda, &e[0], &inc, &zero, &c[0], &inc)
        for i in range(n):
            r[i] -= c[i] * c[i]
        r[sel] = 0.0

        if (t + 1) % reorth_every == 0 and t + 1 < N:
            # R (column-major n x (t+1)) = V E[:t+1]^T
            gm = <int>n
            gn = <int>(t + 1)
            gk = <int>N
            ldc = <int>n
            dgemm(&trans, &transn, &gm, &gn, &gk, &one, &V[0, 0], &lda,
                  &E[0, 0], &lda, &zero, &R[0], &ldc)
            for i in range(n):
                run = norms0[i]
                for s in range(t + 1):
                    dot = R[i + s * n]
                    run -= dot * dot
                r[i] = run
            for k in range(t + 1):
                r[picks[k]] = 0.0

        rmin = 0.0
        for i in range(n):
            if r[i] < rmin:
                rmin = r[i]
            if r[i] < 0.0:
                r[i] = 0.0
        if rmin < -1e-10:
            raise NumericalDegeneracy(
                f"residual kernel diagonal reached {rmin:.3e} at step {t}")
    return picks


def dhk_sums(long long[:, ::1] tuples, long long[:, ::1] perms, long long lcm):
    """Permutation sums of the running maximum and of |partial sums|.

    For each row ``i`` of ``tuples`` returns
    ``lhs = sum_sigma max_r S_r(i_sigma)`` and
    ``rhs = sum_r (lcm / r) sum_sigma |S_r(i_sigma)|`` (integers), so that
    the identity reads ``2 * lcm * lhs == rhs``.
    """
    cdef Py_ssize_t T = tuples.shape[0], n = tuples.shape[1], P = perms.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lhs = np.zeros(T, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] rhs = np.zeros(T, dtype=np.int64)
    cdef Py_ssize_t a, p, r
    cdef long long run, best, acc_l, acc_r, v
    for a in range(T):
        acc_l = 0
        acc_r = 0
        for p in range(P):
            run = 0
            best = -(1LL << 62)
            for r in range(n):
                run += tuples[a, perms[p, r]]
                if run > best:
                    best = run
                v = run if run >= 0 else -run
                acc_r += (lcm // (r + 1)) * v
            acc_l += best
        lhs[a] = acc_l
        rhs[a] = acc_r
    return lhs, rhs
