# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: cyclic Jacobi eigensolver for complex Hermitian
matrices and the dense grid scan used by the product-vector positivity
threshold.  Semantics match `freespec._kernels.pure`.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, fabs, sin, sqrt

cnp.import_array()

NAME = "compiled"

cdef Py_ssize_t MAX_SWEEPS = 60


def eigh_kernel(a):
    """Eigenvalues and eigenvectors of a complex Hermitian matrix.

    Cyclic-by-rows Jacobi with complex rotations.  Returns (w, v) with w
    the real diagonal after convergence (unsorted) and v unitary.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] A = np.array(a, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("matrix must be square")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] V = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([A[0, 0].real]), V

    cdef double scale = 0.0, off, r, tau, t, c, s, app, aqq, tmp
    cdef double complex apq, ph, vip, viq, aip, aiq
    cdef Py_ssize_t p, q, i, sweep

    for p in range(n):
        for q in range(n):
            tmp = abs(A[p, q])
            if tmp > scale:
                scale = tmp
    if scale == 0.0:
        return np.zeros(n), V
    cdef double tol = 1e-15 * scale
    cdef double tiny = 1e-300

    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(A[p, q]) ** 2
        off = sqrt(2.0 * off)
        if off <= tol * n:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r <= tiny:
                    continue
                ph = apq / r
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * r)
                # smaller-magnitude root of t^2 - 2*tau*t - 1 = 0
                if tau >= 0.0:
                    t = -1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                # A <- J* A J with J[:,p] = (c, s*conj(ph)) and
                # J[:,q] = (-s, c*conj(ph)) on rows (p, q).
                A[p, p] = app + t * r
                A[q, q] = aqq - t * r
                A[p, q] = 0.0
                A[q, p] = 0.0
                for i in range(n):
                    if i == p or i == q:
                        continue
                    aip = A[i, p]
                    aiq = A[i, q]
                    A[i, p] = c * aip + s * ph.conjugate() * aiq
                    A[i, q] = -s * aip + c * ph.conjugate() * aiq
                    A[p, i] = A[i, p].conjugate()
                    A[q, i] = A[i, q].conjugate()
                for i in range(n):
                    vip = V[i, p]
                    viq = V[i, q]
                    V[i, p] = c * vip + s * ph.conjugate() * viq
                    V[i, q] = -s * vip + c * ph.conjugate() * viq

    w = np.empty(n)
    for p in range(n):
        w[p] = A[p, p].real
    return w, V


def quartic_grid_scan(qn, qm, Py_ssize_t n_theta, Py_ssize_t n_phi):
    """Grid maximum of f = qn^2 - qm over (theta, phi); see pure backend."""
    cdef double an = qn[0], bn = qn[1], cn = qn[2], dn = qn[3]
    cdef double am = qm[0], bm = qm[1], cm = qm[2], dm = qm[3]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] theta = np.linspace(0.0, np.pi / 2.0, n_theta)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rn = cn * np.cos(phi) + dn * np.sin(phi)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rm = cm * np.cos(phi) + dm * np.sin(phi)

    cdef double best = -np.inf
    cdef Py_ssize_t best_i = 0, best_j = 0, i, j
    cdef double c2, s2, qnv, qmv, f
    for i in range(n_theta):
        c2 = cos(2.0 * theta[i])
        s2 = sin(2.0 * theta[i])
        for j in range(n_phi):
            qnv = an + bn * c2 + s2 * rn[j]
            qmv = am + bm * c2 + s2 * rm[j]
            f = qnv * qnv - qmv
            if f > best:
                best = f
                best_i = i
                best_j = j
    return best, float(theta[best_i]), float(phi[best_j])
