"""Operator-system membership oracles over a polyhedral cone.

For a salient polyhedral cone C in R^d with order unit u, two canonical
operator systems extend C to matrix levels:

* the largest one: A = (A_1, ..., A_d) belongs at level s iff
  (v* A_1 v, ..., v* A_d v) lies in C for every vector v, equivalently
  (ell (x) id)(A) >= 0 for every facet functional ell of C;
* the smallest one: A belongs at level s iff A = sum_k c_k (x) P_k with
  the c_k among the generators of C and P_k PSD.

The smallest-system test is a semidefinite feasibility problem over the
generator weights; its infeasibility certificate converts into a separating
functional phi(B) = sum_i tr(conj(N_i) B_i) that is nonnegative on the
system and strictly negative on the query, which in turn yields a separating
linear pencil by the Effros-Winkler construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.optimize

from . import _kernels, linalg, sdp
from .cones import PolyhedralCone
from .linalg import SIGMA_X, SIGMA_Z, HermitianMatrix, as_hermitian
from .pencil import (
    LinearPencil,
    MatrixTuple,
    MembershipResult,
    circular_cone_pencil,
    classify_margin,
    membership,
)

SEPARATOR_SHIFT = 1e-8
STRICTNESS_EPS = 1e-6


# --------------------------------------------------------------------------
# Largest system: facet-wise positivity
# --------------------------------------------------------------------------


def max_membership(
    cone: PolyhedralCone, a: MatrixTuple, tol: float = 1e-8
) -> MembershipResult:
    """Membership of a tuple in the largest system of the cone.

    Classification is by the smallest eigenvalue over all facet evaluations
    (ell_k (x) id)(A); the worst facet index is reported.
    """
    if cone.dim != a.d:
        raise ValueError(f"cone has dimension {cone.dim}, tuple has {a.d}")
    worst = None
    margin = math.inf
    for k in range(cone.n_facets):
        f = sum(cone.facets[k, i] * a.entries[i].mat for i in range(a.d))
        m = linalg.min_eigenvalue(HermitianMatrix(f))
        if m < margin:
            margin = m
            worst = k
    return MembershipResult(
        classification=classify_margin(margin, tol), margin=margin, worst_facet=worst
    )


# --------------------------------------------------------------------------
# Smallest system: generator-weight SDP
# --------------------------------------------------------------------------


class MinMembershipStatus(enum.Enum):
    MEMBER = "Member"
    NOT_MEMBER = "NotMember"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class MinMembershipCertificate:
    """PSD weights P_k with sum_k c_k (x) P_k equal to the queried tuple."""

    weights: tuple[HermitianMatrix, ...]
    residual: float


@dataclass(frozen=True)
class SeparationFunctional:
    """phi(B) = sum_i Re tr(conj(N_i) B_i) with strictness margin.

    The margin is the smallest eigenvalue of sum_i u_i N_i; a positive
    margin makes phi strictly positive on every u (x) vv*.
    """

    matrices: tuple[HermitianMatrix, ...]
    margin: float

    @property
    def d(self) -> int:
        return len(self.matrices)

    @property
    def level(self) -> int:
        return self.matrices[0].dim

    def evaluate(self, b: MatrixTuple) -> float:
        if b.d != self.d or b.level != self.level:
            raise ValueError("tuple shape does not match the functional")
        return float(
            sum(
                np.real(np.trace(np.conj(n.mat) @ e.mat))
                for n, e in zip(self.matrices, b.entries)
            )
        )


@dataclass(frozen=True)
class MinMembershipResult:
    status: MinMembershipStatus
    certificate: Optional[MinMembershipCertificate] = None
    separator: Optional[SeparationFunctional] = None
    message: str = ""


def _min_membership_problem(
    cone: PolyhedralCone, a: MatrixTuple, eps: float = 0.0
) -> sdp.SdpProblem:
    m = cone.n_generators
    s = a.level
    d = cone.dim
    basis = linalg.hermitian_basis(s)
    blocks = [s] * m
    constraints = []
    for i in range(d):
        for e in basis:
            coeffs = tuple(
                HermitianMatrix(cone.generators[k, i] * e) if cone.generators[k, i] != 0.0 else None
                for k in range(m)
            )
            rhs = float(np.real(np.trace(e @ a.entries[i].mat)))
            constraints.append((coeffs, rhs))
    return sdp.SdpProblem.make(blocks, constraints)


def _positivity_shift_functional(cone: PolyhedralCone) -> np.ndarray:
    """A functional strictly positive on the cone, normalised at the unit."""
    f = cone.facets.mean(axis=0)
    return f / float(f @ cone.unit)


def _separator_from_farkas(
    cone: PolyhedralCone, a: MatrixTuple, cert: sdp.FarkasCertificate
) -> SeparationFunctional:
    s = a.level
    d = cone.dim
    basis = linalg.hermitian_basis(s)
    per = len(basis)
    mats = []
    for i in range(d):
        acc = np.zeros((s, s), dtype=np.complex128)
        for alpha, e in enumerate(basis):
            acc += cert.y[i * per + alpha] * e
        mats.append(-np.conj(acc))
    margin = linalg.min_eigenvalue(
        HermitianMatrix(sum(u * n for u, n in zip(cone.unit, mats)))
    )
    if margin < SEPARATOR_SHIFT:
        shift = _positivity_shift_functional(cone)
        mats = [n + SEPARATOR_SHIFT * shift[i] * np.eye(s) for i, n in enumerate(mats)]
        margin = linalg.min_eigenvalue(
            HermitianMatrix(sum(u * n for u, n in zip(cone.unit, mats)))
        )
    return SeparationFunctional(
        matrices=tuple(HermitianMatrix(n) for n in mats), margin=float(margin)
    )


def min_membership(
    cone: PolyhedralCone,
    a: MatrixTuple,
    tol: float = 1e-8,
    dump_to=None,
    max_iter: int = sdp.DEFAULT_MAX_ITER,
) -> MinMembershipResult:
    """Membership of a tuple in the smallest system of a polyhedral cone.

    Decides feasibility of A = sum_k c_k (x) P_k over PSD weights P_k on
    the generators c_k.  A Member outcome carries the weights; a NotMember
    outcome carries a separating functional built from the infeasibility
    certificate, nonnegative on the system and negative on the query.
    """
    if cone.dim != a.d:
        raise ValueError(f"cone has dimension {cone.dim}, tuple has {a.d}")
    problem = _min_membership_problem(cone, a)
    if dump_to is not None:
        sdp.dump_problem(problem, dump_to)
    outcome = sdp.solve(problem, tol=tol, max_iter=max_iter)
    if outcome.status in (sdp.SdpStatus.FEASIBLE, sdp.SdpStatus.OPTIMAL):
        weights = outcome.primal
        residual = 0.0
        for i in range(cone.dim):
            acc = sum(
                cone.generators[k, i] * weights[k].mat for k in range(cone.n_generators)
            )
            residual = max(residual, float(np.max(np.abs(acc - a.entries[i].mat))))
        if residual > 1e-6:
            return MinMembershipResult(
                status=MinMembershipStatus.UNKNOWN,
                message=f"weight reconstruction residual {residual:.3e} too large",
            )
        return MinMembershipResult(
            status=MinMembershipStatus.MEMBER,
            certificate=MinMembershipCertificate(weights=weights, residual=residual),
        )
    if outcome.status is sdp.SdpStatus.INFEASIBLE:
        sep = _separator_from_farkas(cone, a, outcome.dual_certificate)
        return MinMembershipResult(
            status=MinMembershipStatus.NOT_MEMBER, separator=sep
        )
    return MinMembershipResult(
        status=MinMembershipStatus.UNKNOWN, message=outcome.message
    )


def circular_min_membership(a: MatrixTuple, tol: float = 1e-8) -> MembershipResult:
    """Smallest-system membership for the circular cone a^2+b^2 <= c^2.

    The 2 x 2 pencil (sigma_z, sigma_x, I) realizes that system, so pencil
    membership is the exact test; no generator SDP is involved.
    """
    return membership(circular_cone_pencil(), a, tol=tol)


# --------------------------------------------------------------------------
# Rank-one projection witnesses over the square cone
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PauliWitness:
    """Level-2 element of the square-cone smallest system with rank-one parts.

    components = (A_1, A_2, A_3, A_4) are rank-one projections with
    A_1 + A_2 = A_3 + A_4 = I; the tuple is sum_k v_k (x) A_k over the
    square's generators v_k, giving (2 sin(a) sigma_x, 2 cos(a) sigma_z, 2 I).
    """

    alpha: float
    tuple: MatrixTuple
    components: tuple[HermitianMatrix, HermitianMatrix, HermitianMatrix, HermitianMatrix]


def pauli_witness(alpha: float) -> PauliWitness:
    if not (0.0 < alpha < math.pi / 2.0):
        raise ValueError(f"alpha must be in (0, pi/2), got {alpha}")
    eye = np.eye(2)
    sz, sx = SIGMA_Z.mat, SIGMA_X.mat
    c, s = math.cos(alpha), math.sin(alpha)
    a1 = HermitianMatrix((eye - c * sz + s * sx) / 2.0)
    a2 = HermitianMatrix((eye + c * sz - s * sx) / 2.0)
    a3 = HermitianMatrix((eye + c * sz + s * sx) / 2.0)
    a4 = HermitianMatrix((eye - c * sz - s * sx) / 2.0)
    tup = MatrixTuple.of(2.0 * s * sx, 2.0 * c * sz, 2.0 * eye)
    return PauliWitness(alpha=alpha, tuple=tup, components=(a1, a2, a3, a4))


# --------------------------------------------------------------------------
# Essential boundary of the square-cone smallest system
# --------------------------------------------------------------------------


class EssentialBoundaryStatus(enum.Enum):
    IN_ESSENTIAL_BOUNDARY = "InEssentialBoundary"
    NO = "No"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class EssentialBoundaryResult:
    status: EssentialBoundaryStatus
    functional: Optional[SeparationFunctional] = None
    message: str = ""


def essential_boundary_square(
    components: Sequence,
    eps: float = STRICTNESS_EPS,
    tol: float = 1e-8,
    dump_to=None,
) -> EssentialBoundaryResult:
    """Essential-boundary test for sum_k v_k (x) A_k over the square cone.

    With PSD components A_1..A_4, the element lies in the essential boundary
    iff there are Hermitian M_3 > 0 (normalised tr M_3 = 1, strictness
    encoded as M_3 >= eps*I) and D, S with M_3 +- D >= 0, M_3 +- S >= 0 and
    A_1 ⟂ (M_3 + D),  A_2 ⟂ (M_3 - D),  A_3 ⟂ (M_3 + S),  A_4 ⟂ (M_3 - S)
    in the trace inner product.  The decision is a semidefinite feasibility
    problem in the shifted variables P_1 = M_3 + D, P_2 = M_3 - D,
    P_3 = M_3 + S, P_4 = M_3 - S and Z_0 = M_3 - eps*I.

    Like any numerical feasibility test this decides up to the solver
    tolerance: component configurations whose exact system is infeasible
    but lies within ~1e-8 of a feasible one can classify either way.
    The No answer is always backed by a verified infeasibility certificate.
    """
    if len(components) != 4:
        raise ValueError("expected exactly four components")
    comps = [as_hermitian(c) for c in components]
    s = comps[0].dim
    for k, c in enumerate(comps):
        if c.dim != s:
            raise ValueError(f"component {k} has size {c.dim}, expected {s}")
        if c.norm() <= 1e-12:
            raise ValueError(f"component {k} is zero; inputs must be nonzero")
        if not linalg.is_psd(c, tol=1e-9):
            raise ValueError(f"component {k} is not positive semidefinite")
    if eps * s >= 1.0:
        raise ValueError("strictness eps too large for the trace normalisation")

    basis = linalg.hermitian_basis(s)
    blocks = [s] * 5
    constraints = []
    eye = np.eye(s)
    for pair, (i1, i2) in (("D", (0, 1)), ("S", (2, 3))):
        for e in basis:
            coeffs = [None] * 5
            coeffs[i1] = HermitianMatrix(e)
            coeffs[i2] = HermitianMatrix(e)
            coeffs[4] = HermitianMatrix(-2.0 * e)
            rhs = 2.0 * eps * float(np.real(np.trace(e)))
            constraints.append((tuple(coeffs), rhs))
    coeffs = [None] * 5
    coeffs[4] = HermitianMatrix(eye)
    constraints.append((tuple(coeffs), 1.0 - eps * s))
    for k in range(4):
        coeffs = [None] * 5
        coeffs[k] = comps[k]
        constraints.append((tuple(coeffs), 0.0))

    problem = sdp.SdpProblem.make(blocks, constraints)
    if dump_to is not None:
        sdp.dump_problem(problem, dump_to)
    outcome = sdp.solve(problem, tol=tol)
    if outcome.status is sdp.SdpStatus.FEASIBLE:
        p1, p2, p3, p4, z0 = (blk.mat for blk in outcome.primal)
        m3 = z0 + eps * eye
        dmat = (p1 - p2) / 2.0
        smat = (p3 - p4) / 2.0
        m1 = (smat + dmat) / 2.0
        m2 = (smat - dmat) / 2.0
        mats = tuple(HermitianMatrix(np.conj(m)) for m in (m1, m2, m3))
        margin = linalg.min_eigenvalue(HermitianMatrix(m3))
        return EssentialBoundaryResult(
            status=EssentialBoundaryStatus.IN_ESSENTIAL_BOUNDARY,
            functional=SeparationFunctional(matrices=mats, margin=float(margin)),
        )
    if outcome.status is sdp.SdpStatus.INFEASIBLE:
        return EssentialBoundaryResult(status=EssentialBoundaryStatus.NO)
    return EssentialBoundaryResult(
        status=EssentialBoundaryStatus.UNKNOWN, message=outcome.message
    )


# --------------------------------------------------------------------------
# Effros-Winkler separation
# --------------------------------------------------------------------------


def effros_winkler_separation(
    phi: SeparationFunctional, u, tol: float = 1e-10
) -> LinearPencil:
    """Separating pencil M_i = T^(-1/2) N_i T^(-1/2) with T = sum_i u_i N_i.

    Requires T positive definite (margin > tol).  The resulting pencil is
    unit-normalised and its free spectrahedron contains every tuple on
    which phi-type functionals of the source system are nonnegative, while
    any tuple with phi(A) < 0 lies strictly outside at its level.
    """
    u = np.asarray(u, dtype=float)
    if len(u) != phi.d:
        raise ValueError("unit length does not match the functional")
    t = sum(ui * n.mat for ui, n in zip(u, phi.matrices))
    t = HermitianMatrix(t)
    if linalg.min_eigenvalue(t) <= tol:
        raise ValueError(
            "functional is not strictly positive at the unit (sum u_i N_i not PD)"
        )
    ti = linalg.inv_sqrt_pd(t)
    mats = [HermitianMatrix(ti @ n.mat @ ti) for n in phi.matrices]
    return LinearPencil(mats, u)


# --------------------------------------------------------------------------
# Positivity thresholds for a Hermitian pair (full versus product vectors)
# --------------------------------------------------------------------------


def lambda1_block(m, n) -> float:
    """Smallest lam with [[M + lam*I, N], [N, I]] >= 0, as max_v (v*N^2v - v*Mv)."""
    hm, hn = as_hermitian(m), as_hermitian(n)
    if hm.dim != hn.dim:
        raise ValueError("matrices must have the same size")
    return linalg.max_eigenvalue(HermitianMatrix(hn.mat @ hn.mat - hm.mat))


@dataclass(frozen=True)
class Lambda2Result:
    value: float
    argmax: np.ndarray
    lower_bound_only: bool


def _quartic(mmat: np.ndarray, nmat: np.ndarray, v: np.ndarray) -> float:
    qn = float(np.real(v.conj() @ nmat @ v))
    qm = float(np.real(v.conj() @ mmat @ v))
    return qn * qn - qm


def _bloch_params(h: np.ndarray) -> np.ndarray:
    return np.array(
        [
            (h[0, 0].real + h[1, 1].real) / 2.0,
            (h[0, 0].real - h[1, 1].real) / 2.0,
            h[0, 1].real,
            -h[0, 1].imag,
        ]
    )


def lambda2_products(
    m,
    n,
    *,
    theta_points: int = 1001,
    phi_points: int = 4000,
    refine: bool = True,
    restarts: int = 200,
    seed: int = 0,
) -> Lambda2Result:
    """Global maximum of (v*Nv)^2 - v*Mv over unit vectors v.

    For 2 x 2 inputs this is a dense two-parameter grid scan (default step
    pi/2000 in each angle) followed by local ascent refinement, exact up to
    the grid resolution.  For size >= 3 a multistart projected-gradient
    search runs instead and the returned value is a certified lower bound
    only (the problem is nonconvex).
    """
    hm, hn = as_hermitian(m), as_hermitian(n)
    if hm.dim != hn.dim:
        raise ValueError("matrices must have the same size")
    s = hm.dim

    if s == 2:
        qm = _bloch_params(hm.mat)
        qn = _bloch_params(hn.mat)
        val, theta, phi = _kernels.quartic_grid_scan(qn, qm, theta_points, phi_points)

        def vec(t, p):
            return np.array([math.cos(t), math.sin(t) * complex(math.cos(p), math.sin(p))])

        best_v = vec(theta, phi)
        if refine:
            neg = lambda x: -_quartic(hm.mat, hn.mat, vec(x[0], x[1]))
            res = scipy.optimize.minimize(
                neg,
                np.array([theta, phi]),
                method="Nelder-Mead",
                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 400},
            )
            if -res.fun > val:
                val = float(-res.fun)
                best_v = vec(res.x[0], res.x[1])
        return Lambda2Result(value=float(val), argmax=best_v, lower_bound_only=False)

    rng = np.random.default_rng(seed)
    starts = []
    for mat in (hn.mat, hn.mat @ hn.mat - hm.mat):
        dec = linalg.eigh(mat)
        starts.extend(dec.eigenvectors.T)
    while len(starts) < restarts:
        v = rng.standard_normal(s) + 1j * rng.standard_normal(s)
        starts.append(v / np.linalg.norm(v))

    def neg_real(x):
        v = x[:s] + 1j * x[s:]
        nv = np.linalg.norm(v)
        return -_quartic(hm.mat, hn.mat, v / nv)

    best_val = -math.inf
    best_v = None
    for v0 in starts[: max(restarts, len(starts))]:
        x0 = np.concatenate([np.real(v0), np.imag(v0)])
        res = scipy.optimize.minimize(neg_real, x0, method="BFGS", options={"maxiter": 120})
        if -res.fun > best_val:
            best_val = float(-res.fun)
            v = res.x[:s] + 1j * res.x[s:]
            best_v = v / np.linalg.norm(v)
    return Lambda2Result(value=best_val, argmax=best_v, lower_bound_only=True)


def common_eigenvector_residual(m, n, v: np.ndarray) -> tuple[float, float]:
    """Residuals ||Mv - (v*Mv)v|| and ||Nv - (v*Nv)v|| for a unit vector."""
    hm, hn = as_hermitian(m), as_hermitian(n)
    v = np.asarray(v, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    rm = hm.mat @ v - (v.conj() @ hm.mat @ v) * v
    rn = hn.mat @ v - (v.conj() @ hn.mat @ v) * v
    return float(np.linalg.norm(rm)), float(np.linalg.norm(rn))


# --------------------------------------------------------------------------
# Witness-compression obstruction harness
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CompressionReport:
    """Numerical evidence that rank-one witnesses at distinct angles cannot
    be compressed into the essential boundary at level r.

    The orthogonality constraints require 2r pairwise orthogonal nonzero
    vectors in C^r; random (and isometry-structured) attempts never push
    the worst pairing residual below the threshold.
    """

    r: int
    angles: tuple[float, ...]
    required_orthogonal_columns: int
    space_dimension: int
    dimension_obstruction: bool
    trials: int
    min_max_residual: float
    degenerate_trials: int
    threshold: float

    @property
    def obstruction_confirmed(self) -> bool:
        return self.dimension_obstruction and self.min_max_residual >= self.threshold


def compression_obstruction_demo(
    r: int,
    angles: Sequence[float],
    trials: int = 10_000,
    seed: int = 0,
    threshold: float = 1e-3,
) -> CompressionReport:
    if r < 1:
        raise ValueError("r must be at least 1")
    angles = tuple(float(a) for a in angles)
    if len(angles) != r:
        raise ValueError("need exactly r angles")
    if any(not (0.0 < a < math.pi / 2.0) for a in angles):
        raise ValueError("angles must lie in (0, pi/2)")
    if len(set(angles)) != r:
        raise ValueError("angles must be distinct")

    # rank-one directions of the four projections per angle
    pvecs = np.zeros((r, 4, 2), dtype=np.complex128)
    for i, a in enumerate(angles):
        w = pauli_witness(a)
        for k, comp in enumerate(w.components):
            dec = linalg.eigh(comp)
            pvecs[i, k] = dec.eigenvectors[:, -1]

    rng = np.random.default_rng(seed)
    min_max_residual = math.inf
    degenerate = 0
    batch = 500
    done = 0
    while done < trials:
        t = min(batch, trials - done)
        vs = rng.standard_normal((t, r, r, 2)) + 1j * rng.standard_normal((t, r, r, 2))
        if done == 0:
            # structured attempts: stacked isometries
            for i in range(r):
                q, _ = np.linalg.qr(
                    rng.standard_normal((r, 2)) + 1j * rng.standard_normal((r, 2))
                )
                vs[0, i] = q[:, :2]
        x = np.einsum("tirc,ikc->tikr", vs, pvecs)
        norms = np.linalg.norm(x, axis=3)
        degenerate += int(np.sum(np.any(norms < 1e-9, axis=(1, 2))))
        for pair in ((0, 1), (2, 3)):
            g = np.abs(np.einsum("tir,tjr->tij", np.conj(x[:, :, pair[0]]), x[:, :, pair[1]]))
            den = norms[:, :, pair[0]][:, :, None] * norms[:, :, pair[1]][:, None, :] + 1e-30
            resid = (g / den).reshape(t, -1).max(axis=1)
            min_max_residual = min(min_max_residual, float(resid.min()))
        done += t

    return CompressionReport(
        r=r,
        angles=angles,
        required_orthogonal_columns=2 * r,
        space_dimension=r,
        dimension_obstruction=2 * r > r,
        trials=trials,
        min_max_residual=min_max_residual,
        degenerate_trials=degenerate,
        threshold=threshold,
    )
