"""Pure numpy implementations of the hot kernels.

These mirror the compiled extension in `_core.pyx`; either backend may be
active, so both must satisfy the same contracts:

* ``eigh_kernel(a)`` returns ``(w, v)`` with real eigenvalues ``w`` (any
  order) and a unitary ``v`` whose columns are eigenvectors of the complex
  Hermitian matrix ``a``.
* ``quartic_grid_scan(qn, qm, n_theta, n_phi)`` maximises
  ``f(theta, phi) = qn(theta, phi)**2 - qm(theta, phi)`` over the grid
  ``theta in [0, pi/2]`` (``n_theta`` points, endpoints included) and
  ``phi in [0, 2*pi)`` (``n_phi`` points), where each quadratic form is
  ``q(theta, phi) = a + b*cos(2*theta) + sin(2*theta)*(c*cos(phi) + d*sin(phi))``
  parametrised by the 4-vector ``(a, b, c, d)``.  Returns
  ``(value, theta, phi)`` at the first grid argmax in row-major scan order.
"""

from __future__ import annotations

import numpy as np

NAME = "pure"

# Rows of theta processed per chunk in the grid scan; bounds peak memory at
# a few MB even for the default 1001 x 4000 grid.
_CHUNK = 64


def eigh_kernel(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(a)


def _theta_phi_axes(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    theta = np.linspace(0.0, np.pi / 2.0, n_theta)
    phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    return theta, phi


def quartic_grid_scan(
    qn: np.ndarray, qm: np.ndarray, n_theta: int, n_phi: int
) -> tuple[float, float, float]:
    theta, phi = _theta_phi_axes(n_theta, n_phi)
    cos2t = np.cos(2.0 * theta)
    sin2t = np.sin(2.0 * theta)
    cphi = np.cos(phi)
    sphi = np.sin(phi)

    an, bn, cn, dn = (float(x) for x in qn)
    am, bm, cm, dm = (float(x) for x in qm)
    rn = cn * cphi + dn * sphi
    rm = cm * cphi + dm * sphi

    best = -np.inf
    best_i = 0
    best_j = 0
    for lo in range(0, n_theta, _CHUNK):
        hi = min(lo + _CHUNK, n_theta)
        qn_blk = an + bn * cos2t[lo:hi, None] + sin2t[lo:hi, None] * rn[None, :]
        qm_blk = am + bm * cos2t[lo:hi, None] + sin2t[lo:hi, None] * rm[None, :]
        f_blk = qn_blk * qn_blk - qm_blk
        flat = int(np.argmax(f_blk))
        val = float(f_blk.flat[flat])
        if val > best:
            best = val
            best_i = lo + flat // n_phi
            best_j = flat % n_phi
    return best, float(theta[best_i]), float(phi[best_j])
