"""Inclusion of spectrahedra: scalar test, matricial relaxation, scaling.

The scalar inclusion problem asks whether the level-1 cone of a source
pencil lies inside that of a target pencil.  Its matricial strengthening
asks for Kraus operators V_j with sum_j V_j* M_i V_j = N_i, a semidefinite
feasibility problem in the Choi matrix of the connecting map; feasibility
is equivalent to inclusion of the free spectrahedra at every matrix level.
For a simplex source the strengthening is tight; for non-simplex polyhedral
sources it can fail even when scalar inclusion holds, and explicit level-2
witnesses certify the gap.  Scaled-cone inclusion bounds quantify how much
the source must shrink before the strengthening becomes a relaxation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg, sdp
from .cones import (
    PolyhedralCone,
    SimplexCone,
    find_sandwich_simplex,
    is_centrally_symmetric,
    is_simplex,
    section_of,
)
from .linalg import SIGMA_X, SIGMA_Z, HermitianMatrix
from .opsys import (
    MinMembershipStatus,
    max_membership,
    min_membership,
)
from .pencil import (
    Classification,
    LinearPencil,
    MatrixTuple,
    diagonal_pencil,
    elliptic_cone_pencil,
    evaluate,
    membership,
)

KRAUS_EIG_CUTOFF = 1e-9
CERT_RESIDUAL_TOL = 1e-6


# --------------------------------------------------------------------------
# Scalar inclusion
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarInclusionResult:
    holds: bool
    margins: np.ndarray  # per source generator, min eigenvalue at level 1
    witness_ray: Optional[np.ndarray] = None
    witness_margin: Optional[float] = None


def scalar_inclusion(
    src: PolyhedralCone, tgt: LinearPencil, tol: float = 1e-8
) -> ScalarInclusionResult:
    """Level-1 inclusion of a polyhedral cone in a pencil's spectrahedron.

    Decidable by generator checks: the cone is included iff every extreme
    ray evaluates to a PSD matrix (margin >= -tol).
    """
    if src.dim != tgt.d:
        raise ValueError(f"cone dimension {src.dim} != pencil variables {tgt.d}")
    margins = []
    worst = None
    for g in src.generators:
        m = linalg.min_eigenvalue(
            HermitianMatrix(sum(gi * mi.mat for gi, mi in zip(g, tgt.matrices)))
        )
        margins.append(m)
        if worst is None or m < margins[worst]:
            worst = len(margins) - 1
    margins = np.array(margins)
    if margins[worst] < -tol:
        return ScalarInclusionResult(
            holds=False,
            margins=margins,
            witness_ray=src.generators[worst].copy(),
            witness_margin=float(margins[worst]),
        )
    return ScalarInclusionResult(holds=True, margins=margins)


# --------------------------------------------------------------------------
# Matricial relaxation via the Choi matrix
# --------------------------------------------------------------------------


class RelaxationStatus(enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class RelaxationCertificate:
    """Choi matrix and Kraus operators of a map carrying M_i to N_i."""

    choi: HermitianMatrix
    kraus: tuple[np.ndarray, ...]
    residual: float


@dataclass(frozen=True)
class RelaxationFarkas:
    """Dual witness: Hermitian Y_i with sum_i M_i^T (x) Y_i <= 0 and
    sum_i <Y_i, N_i> = 1, ruling out any completely positive connecting map."""

    y_matrices: tuple[HermitianMatrix, ...]
    gap: float
    lambda_max: float


@dataclass(frozen=True)
class RelaxationResult:
    status: RelaxationStatus
    certificate: Optional[RelaxationCertificate] = None
    farkas: Optional[RelaxationFarkas] = None
    message: str = ""


def _choi_problem(src: LinearPencil, tgt: LinearPencil) -> sdp.SdpProblem:
    r, t = src.r, tgt.r
    basis_t = linalg.hermitian_basis(t)
    constraints = []
    for i in range(src.d):
        mt = src.matrices[i].mat.T.copy()
        for f in basis_t:
            coeff = HermitianMatrix(np.kron(mt, f))
            rhs = float(np.real(np.trace(f @ tgt.matrices[i].mat)))
            constraints.append(((coeff,), rhs))
    return sdp.SdpProblem.make([r * t], constraints)


def kraus_from_choi(choi: HermitianMatrix, r: int, t: int) -> tuple[np.ndarray, ...]:
    """Kraus operators V_j in M_{r,t} from the spectral decomposition.

    Eigenvalues below cutoff * tr(J) are dropped; the map acts as
    X -> sum_j V_j* X V_j.
    """
    dec = linalg.eigh(choi)
    cutoff = KRAUS_EIG_CUTOFF * max(float(np.sum(dec.eigenvalues)), 1e-30)
    ops = []
    for lam, w in zip(dec.eigenvalues, dec.eigenvectors.T):
        if lam > cutoff:
            ops.append(math.sqrt(lam) * np.conj(w.reshape(r, t)))
    return tuple(ops)


def apply_kraus(kraus, x) -> HermitianMatrix:
    x = np.asarray(x, dtype=np.complex128)
    acc = sum(v.conj().T @ x @ v for v in kraus)
    return HermitianMatrix(acc)


def relaxation(
    src: LinearPencil, tgt: LinearPencil, tol: float = 1e-8, dump_to=None
) -> RelaxationResult:
    """Matricial strengthening of the inclusion problem.

    Searches for a completely positive map with sum_j V_j* M_i V_j = N_i
    as a feasibility SDP in the Choi variable J >= 0 of size r*t with
    d * t^2 real constraints; feasibility is equivalent to inclusion of the
    free spectrahedra at every level.  An Infeasible outcome carries a
    verified dual witness.
    """
    if src.d != tgt.d:
        raise ValueError(f"pencils have different variable counts {src.d} != {tgt.d}")
    problem = _choi_problem(src, tgt)
    if dump_to is not None:
        sdp.dump_problem(problem, dump_to)
    outcome = sdp.solve(problem, tol=tol)
    r, t = src.r, tgt.r
    if outcome.status is sdp.SdpStatus.FEASIBLE:
        choi = outcome.primal[0]
        kraus = kraus_from_choi(choi, r, t)
        residual = 0.0
        for i in range(src.d):
            img = apply_kraus(kraus, src.matrices[i].mat)
            residual = max(
                residual, float(np.max(np.abs(img.mat - tgt.matrices[i].mat)))
            )
        if residual > CERT_RESIDUAL_TOL:
            return RelaxationResult(
                status=RelaxationStatus.UNKNOWN,
                message=f"Kraus reconstruction residual {residual:.3e} too large",
            )
        return RelaxationResult(
            status=RelaxationStatus.FEASIBLE,
            certificate=RelaxationCertificate(choi=choi, kraus=kraus, residual=residual),
        )
    if outcome.status is sdp.SdpStatus.INFEASIBLE:
        basis_t = linalg.hermitian_basis(t)
        per = len(basis_t)
        y = outcome.dual_certificate.y
        ymats = []
        for i in range(src.d):
            acc = np.zeros((t, t), dtype=np.complex128)
            for beta, f in enumerate(basis_t):
                acc += y[i * per + beta] * f
            ymats.append(HermitianMatrix(acc))
        big = sum(
            np.kron(src.matrices[i].mat.T, ymats[i].mat) for i in range(src.d)
        )
        lam_max = linalg.max_eigenvalue(HermitianMatrix(big))
        gap = float(
            sum(linalg.trace_inner(tgt.matrices[i], ymats[i]) for i in range(src.d))
        )
        return RelaxationResult(
            status=RelaxationStatus.INFEASIBLE,
            farkas=RelaxationFarkas(
                y_matrices=tuple(ymats), gap=gap, lambda_max=float(lam_max)
            ),
        )
    return RelaxationResult(status=RelaxationStatus.UNKNOWN, message=outcome.message)


# --------------------------------------------------------------------------
# Level-2 free witnesses for the square cone
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FreeWitness:
    """A level-s tuple inside the source's largest system but outside the
    target's spectrahedron at the same level."""

    tuple: MatrixTuple
    level: int
    source_margin: float
    target_margin: float


def free_witness_square(alpha: float) -> FreeWitness:
    """The anticommuting pair witness (sigma_z, sigma_x, I) for the square.

    It sits on the boundary of the square's largest system at level 2
    (each facet evaluation I +- sigma has eigenvalue 0) while the elliptic
    target pencil at angle alpha evaluates to minimum eigenvalue
    1 - sin(alpha) - cos(alpha) < 0.
    """
    if not (0.0 < alpha < math.pi / 2.0):
        raise ValueError(f"alpha must be in (0, pi/2), got {alpha}")
    a = MatrixTuple.of(SIGMA_Z, SIGMA_X, np.eye(2))
    from .cones import square_cone

    src_margin = max_membership(square_cone(), a).margin
    tgt_margin = membership(elliptic_cone_pencil(alpha), a).margin
    return FreeWitness(
        tuple=a, level=2, source_margin=src_margin, target_margin=tgt_margin
    )


def _cyclic_orders(k: int):
    base = list(range(k))
    for start in range(k):
        yield [base[(start + i) % k] for i in range(k)]
        yield [base[(start - i) % k] for i in range(k)]


def _angular_order(cone: PolyhedralCone) -> list[int]:
    """Indices of the generators in cyclic order around the section centre."""
    n = cone.facets.mean(axis=0)
    sec = section_of(cone, n)
    centre = sec.vertices.mean(axis=0)
    rel = sec.vertices - centre
    angles = np.arctan2(rel[:, 1], rel[:, 0])
    return list(np.argsort(angles))


def _quad_map_from_square(src: PolyhedralCone) -> Optional[np.ndarray]:
    """Linear map L in GL_3 carrying the square cone's rays onto the rays of
    a quadrilateral cone (projective transform of the section squares)."""
    from .cones import square_cone

    if src.dim != 3 or src.n_generators != 4:
        return None
    sq = square_cone()
    sq_order = _angular_order(sq)
    try:
        src_order = _angular_order(src)
    except ValueError:
        return None
    gens_sq = sq.generators
    gens_src = src.generators
    for order in _cyclic_orders(4):
        pairs = [(gens_sq[sq_order[k]], gens_src[src_order[order[k]]]) for k in range(4)]
        # unknowns: 9 entries of L plus 4 scales; rows L w - s g = 0
        sys = np.zeros((12, 13))
        for k, (w, g) in enumerate(pairs):
            for row in range(3):
                sys[3 * k + row, 3 * row : 3 * row + 3] = w
                sys[3 * k + row, 9 + k] = -g[row]
        _, sv, vt = np.linalg.svd(sys)
        # 12 x 13 system: vt[-1] is the exact null direction; a tiny 12th
        # singular value would mean the solution is not unique
        if sv[-1] <= 1e-10 * sv[0]:
            continue
        sol = vt[-1]
        scales = sol[9:]
        if np.all(scales > 1e-9) or np.all(scales < -1e-9):
            if scales[0] < 0:
                sol = -sol
            l = sol[:9].reshape(3, 3)
            if abs(np.linalg.det(l)) > 1e-10:
                # fix the ray-wise scale freedom: send the square's unit to
                # the section height 1 of the source (mean-facet functional)
                ell = src.facets.mean(axis=0)
                h = float(ell @ (l @ sq.unit))
                if h > 1e-12:
                    return l / h
    return None


def square_type_witness(src: PolyhedralCone) -> Optional[MatrixTuple]:
    """Push the square's level-2 witness through a projective map onto a
    quadrilateral source cone; None when the source is not of that type."""
    from .cones import rays_equal, square_cone

    base = MatrixTuple.of(SIGMA_Z, SIGMA_X, np.eye(2))
    sq = square_cone()
    if (
        src.dim == 3
        and src.n_generators == 4
        and rays_equal(src.generators, sq.generators)
        and np.max(np.abs(src.unit / np.linalg.norm(src.unit) - sq.unit)) < 1e-12
    ):
        return base
    l = _quad_map_from_square(src)
    if l is None:
        return None
    cand = base.scaled_by(l)
    if max_membership(src, cand, tol=1e-7).inside_or_boundary:
        return cand
    return None


# --------------------------------------------------------------------------
# End-to-end inclusion verdict
# --------------------------------------------------------------------------


class VerdictConsistencyError(RuntimeError):
    """Produced verdict violates the relaxation/inclusion implications."""


@dataclass(frozen=True)
class InclusionVerdict:
    scalar: ScalarInclusionResult
    relaxation: RelaxationResult
    free_witness: Optional[FreeWitness] = None

    def __post_init__(self):
        if self.relaxation.status is RelaxationStatus.FEASIBLE and not self.scalar.holds:
            raise VerdictConsistencyError(
                "relaxation feasible but scalar inclusion fails"
            )
        if (
            self.free_witness is not None
            and self.relaxation.status is RelaxationStatus.FEASIBLE
        ):
            raise VerdictConsistencyError("free witness exists despite feasible relaxation")


def check_inclusion(
    src: PolyhedralCone, tgt: LinearPencil, tol: float = 1e-8, dump_to=None
) -> InclusionVerdict:
    """Scalar inclusion, then the matricial relaxation on the source's
    diagonal realization, then a constructive level-2 witness when the
    source is of square type and the witness verifiably escapes the target."""
    scal = scalar_inclusion(src, tgt, tol=tol)
    relax = relaxation(diagonal_pencil(src), tgt, tol=tol, dump_to=dump_to)
    witness = None
    if relax.status is not RelaxationStatus.FEASIBLE and not is_simplex(src):
        cand = square_type_witness(src)
        if cand is not None:
            tgt_res = membership(tgt, cand, tol=tol)
            if tgt_res.classification is Classification.OUTSIDE:
                witness = FreeWitness(
                    tuple=cand,
                    level=cand.level,
                    source_margin=max_membership(src, cand).margin,
                    target_margin=tgt_res.margin,
                )
    return InclusionVerdict(scalar=scal, relaxation=relax, free_witness=witness)


# --------------------------------------------------------------------------
# Commuting targets: the strengthening is tight
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CommutingTargetReport:
    max_commutator: float
    max_offdiagonal: float  # after joint diagonalisation
    scalar: ScalarInclusionResult
    relaxation: RelaxationResult


def commuting_target_tightness(
    src: PolyhedralCone, tgt: LinearPencil, tol: float = 1e-8
) -> CommutingTargetReport:
    """For pairwise commuting targets containing the cone at scalar level,
    the relaxation must be feasible (the target spectrahedron is then a
    polyhedron, realized diagonally).  Raises on non-commuting targets."""
    max_comm = 0.0
    for i in range(tgt.d):
        for j in range(i + 1, tgt.d):
            a, b = tgt.matrices[i].mat, tgt.matrices[j].mat
            max_comm = max(max_comm, float(np.linalg.norm(a @ b - b @ a)))
    if max_comm >= 1e-9:
        raise ValueError(f"target matrices do not commute (||[N_i,N_j]|| = {max_comm:.3e})")
    rng = np.random.default_rng(2)
    w = rng.standard_normal(tgt.d)
    combo = HermitianMatrix(sum(wi * m.mat for wi, m in zip(w, tgt.matrices)))
    u = linalg.eigh(combo).eigenvectors
    max_off = 0.0
    for m in tgt.matrices:
        dd = u.conj().T @ m.mat @ u
        max_off = max(max_off, float(np.max(np.abs(dd - np.diag(np.diag(dd))))))
    scal = scalar_inclusion(src, tgt, tol=tol)
    relax = relaxation(diagonal_pencil(src), tgt, tol=tol)
    return CommutingTargetReport(
        max_commutator=max_comm,
        max_offdiagonal=max_off,
        scalar=scal,
        relaxation=relax,
    )


# --------------------------------------------------------------------------
# Scaled inclusion of the largest system in the smallest
# --------------------------------------------------------------------------


def scaled_tuple(a: MatrixTuple, nu: float) -> MatrixTuple:
    """(nu*A_1, ..., nu*A_{d-1}, A_d): scaling about the unit e_d along the
    coordinate hyperplane spanned by e_1..e_{d-1}."""
    entries = [HermitianMatrix(nu * e.mat) for e in a.entries[:-1]]
    entries.append(a.entries[-1])
    return MatrixTuple(tuple(entries))


def scaled_max_in_min(
    cone: PolyhedralCone, nu: float, a: MatrixTuple, tol: float = 1e-8
):
    """Test whether the nu-scaled tuple enters the smallest system.

    Requires coordinates arranged so the unit is e_d and the section
    hyperplane is spanned by e_1..e_{d-1}; the input must belong to the
    cone's largest system.  Returns the smallest-system result for
    (nu*A_1, ..., nu*A_{d-1}, A_d).
    """
    if not (0.0 < nu <= 1.0):
        raise ValueError(f"scaling factor must be in (0, 1], got {nu}")
    ed = np.zeros(cone.dim)
    ed[-1] = 1.0
    if np.max(np.abs(cone.unit - ed)) > 1e-12:
        raise ValueError("coordinate convention requires the unit to be e_d")
    source = max_membership(cone, a, tol=tol)
    if source.classification is Classification.OUTSIDE:
        raise ValueError(
            f"tuple is outside the largest system (margin {source.margin:.3e})"
        )
    return min_membership(cone, scaled_tuple(a, nu), tol=tol)


@dataclass(frozen=True)
class ScalingReport:
    nu_general: float
    nu_symmetric: Optional[float]
    certified_nu: float
    certificate: Optional[SimplexCone]
    sampling: Optional[dict] = None


def scaling_bound(
    cone: PolyhedralCone,
    h_normal,
    resolution: float = 1e-3,
    verify_samples: int = 0,
    seed: int = 0,
) -> ScalingReport:
    """Scaling factors for which the scaled largest system enters the
    smallest system.

    nu_general = 1/(d+1) holds for a suitable unit (the barycenter of a
    maximum-volume inscribed simplex); nu_symmetric = 1/(d-1) holds when
    the section is centrally symmetric about the unit.  certified_nu is the
    largest factor (bisection at the given resolution) for which an explicit
    sandwich simplex certifies the inclusion; it is sound but may fall short
    of the theoretical bounds, which can instead be spot-checked by level-2
    sampling through scaled_max_in_min when the unit is e_d.
    """
    d = cone.dim
    nu_general = 1.0 / (d + 1)
    nu_symmetric = 1.0 / (d - 1) if is_centrally_symmetric(cone, h_normal) else None

    if is_simplex(cone):
        cert = find_sandwich_simplex(cone, 1.0, h_normal)
        report_nu = 1.0
    else:
        lo, hi = 0.0, 1.0
        cert = None
        report_nu = 0.0
        # establish a working lower bound first
        for probe in (0.5, 1.0 / 3.0, 0.25, 0.1):
            c = find_sandwich_simplex(cone, probe, h_normal)
            if c is not None:
                lo, cert, report_nu = probe, c, probe
                break
        while hi - lo > resolution:
            mid = (lo + hi) / 2.0
            c = find_sandwich_simplex(cone, mid, h_normal)
            if c is not None:
                lo, cert, report_nu = mid, c, mid
            else:
                hi = mid
    sampling = None
    if verify_samples > 0:
        sampling = _sampling_verification(cone, nu_general, nu_symmetric, verify_samples, seed)
    return ScalingReport(
        nu_general=nu_general,
        nu_symmetric=nu_symmetric,
        certified_nu=report_nu,
        certificate=cert,
        sampling=sampling,
    )


def random_max_tuple(
    cone: PolyhedralCone, s: int, rng: np.random.Generator
) -> MatrixTuple:
    """Random level-s member of the cone's largest system.

    Draws Hermitian A_1..A_{d-1} and sets A_d = t*I with t just large
    enough that every facet evaluation is PSD (with a small random slack).
    Requires the unit to be e_d."""
    d = cone.dim
    ed = np.zeros(d)
    ed[-1] = 1.0
    if np.max(np.abs(cone.unit - ed)) > 1e-12:
        raise ValueError("random_max_tuple requires the unit to be e_d")
    head = [linalg.random_hermitian(rng, s) for _ in range(d - 1)]
    t_req = 0.0
    for k in range(cone.n_facets):
        f = sum(cone.facets[k, i] * head[i].mat for i in range(d - 1))
        lam = linalg.min_eigenvalue(HermitianMatrix(f))
        coef = cone.facets[k, -1]
        if coef <= 1e-12:
            raise ValueError("facet does not involve the unit coordinate")
        t_req = max(t_req, -lam / coef)
    t = t_req + 0.05 * float(rng.random())
    entries = head + [HermitianMatrix(t * np.eye(s))]
    return MatrixTuple(tuple(entries))


def _sampling_verification(cone, nu_general, nu_symmetric, samples, seed) -> dict:
    rng = np.random.default_rng(seed)
    out = {}
    for label, nu in (("nu_general", nu_general), ("nu_symmetric", nu_symmetric)):
        if nu is None:
            continue
        good = 0
        for _ in range(samples):
            a = random_max_tuple(cone, 2, rng)
            res = scaled_max_in_min(cone, nu, a)
            if res.status is MinMembershipStatus.MEMBER:
                good += 1
        out[label] = {"nu": nu, "samples": samples, "members": good}
    return out


# --------------------------------------------------------------------------
# Entanglement demo: the ball-cone pencil does not realize a smallest system
# --------------------------------------------------------------------------


def partial_transpose(x, dims: tuple[int, int] = (2, 2), subsystem: int = 1) -> HermitianMatrix:
    """Partial transpose of a bipartite matrix on the chosen factor."""
    a, b = dims
    m = np.asarray(x, dtype=np.complex128).reshape(a, b, a, b)
    if subsystem == 0:
        m = m.transpose(2, 1, 0, 3)
    elif subsystem == 1:
        m = m.transpose(0, 3, 2, 1)
    else:
        raise ValueError("subsystem must be 0 or 1")
    return HermitianMatrix(m.reshape(a * b, a * b))


@dataclass(frozen=True)
class EntangledExampleReport:
    x: HermitianMatrix
    blocks: tuple[HermitianMatrix, HermitianMatrix, HermitianMatrix, HermitianMatrix]
    identity_residual: float
    pt_min_eig: float
    pt_min_eig_normalized: float
    entangled: bool
    conclusion: str


def ball_pencil() -> LinearPencil:
    """The four-variable pencil over the ball cone in R^4:
    sigma_z (x) x + sigma_x (x) y + [[0, i], [-i, 0]] (x) w + I (x) z."""
    third = np.array([[0.0, 1.0j], [-1.0j, 0.0]])
    return LinearPencil(
        [SIGMA_Z.mat, SIGMA_X.mat, third, np.eye(2)], np.array([0.0, 0.0, 0.0, 1.0])
    )


def entangled_example() -> EntangledExampleReport:
    """PSD block matrix with no PSD product decomposition.

    X is twice the rank-one projection onto (1,0,0,1)/sqrt(2).  Its blocks
    A, B, C give exactly 2X = L(A-C, B+B*, (B-B*)/i, A+C) for the ball-cone
    pencil L, i.e. the tuple (sigma_z, sigma_x, sigma_y, I) lies in the
    pencil's level-2 spectrahedron.  If L realized the smallest operator
    system of the ball cone, X would decompose into PSD products and hence
    have PSD partial transpose; its partial transpose has a negative
    eigenvalue, so X is entangled (the 2x2 partial-transpose test is exact)
    and no such realization exists.
    """
    x = HermitianMatrix(
        np.array(
            [
                [1.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 1.0],
            ]
        )
    )
    xm = x.mat
    a_blk = xm[:2, :2]
    b_blk = xm[:2, 2:]
    c_blk = xm[2:, 2:]
    tup = MatrixTuple.of(
        a_blk - c_blk,
        b_blk + b_blk.conj().T,
        (b_blk - b_blk.conj().T) / 1.0j,
        a_blk + c_blk,
    )
    lp = ball_pencil()
    img = evaluate(lp, tup)
    identity_residual = float(np.max(np.abs(img.mat - 2.0 * xm)))
    pt = partial_transpose(xm)
    pt_min = linalg.min_eigenvalue(pt)
    pt_min_norm = pt_min / float(np.real(np.trace(xm)))
    entangled = pt_min < -1e-12
    conclusion = (
        "the displayed PSD matrix is entangled (negative partial transpose), "
        "so the four-variable ball-cone pencil is not a minimal-system realization"
    )
    return EntangledExampleReport(
        x=x,
        blocks=tuple(tup.entries),
        identity_residual=identity_residual,
        pt_min_eig=pt_min,
        pt_min_eig_normalized=pt_min_norm,
        entangled=entangled,
        conclusion=conclusion,
    )
