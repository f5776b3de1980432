"""Salient polyhedral cones in R^d with generator and facet descriptions.

Cones are stored with both descriptions; constructors accept either and
complete the other by exhaustive enumeration over (d-1)-subsets, which is
entirely adequate at the scales handled here (d <= 6, <= 16 generators).
Facet functionals are normalised so that ell(u) = 1 for the order unit u.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

GEOM_TOL = 1e-9


class ConeConstructionError(ValueError):
    """Degenerate or inconsistent cone data."""


def _null_vector(rows: np.ndarray) -> Optional[np.ndarray]:
    """Unit vector spanning the null space of `rows` if it is 1-dimensional."""
    d = rows.shape[1]
    _, sv, vt = np.linalg.svd(rows, full_matrices=True)
    rank = int(np.sum(sv > GEOM_TOL * max(1.0, sv[0] if len(sv) else 1.0)))
    if rank != d - 1:
        return None
    return vt[-1]


def _dedupe_rows(rows: list[np.ndarray], tol: float = 1e-8) -> np.ndarray:
    out: list[np.ndarray] = []
    for r in rows:
        if not any(np.max(np.abs(r - q)) <= tol for q in out):
            out.append(r)
    return np.array(out)


class PolyhedralCone:
    """A full-dimensional salient polyhedral cone with interior order unit.

    Attributes:
        dim: ambient dimension d.
        generators: (m, d) array of extreme rays.
        facets: (k, d) array of facet functionals with facets @ u == 1.
        unit: the order unit u (interior point).
    """

    def __init__(self, generators, unit, facets=None, _validate: bool = True):
        g = np.atleast_2d(np.asarray(generators, dtype=float))
        u = np.asarray(unit, dtype=float)
        d = g.shape[1]
        if u.shape != (d,):
            raise ConeConstructionError(f"unit has shape {u.shape}, expected ({d},)")
        if g.shape[0] < d:
            raise ConeConstructionError("need at least d generators for a full-dimensional cone")
        if np.linalg.matrix_rank(g, tol=1e-10) < d:
            raise ConeConstructionError("generators do not span R^d")
        norm_g = g / np.linalg.norm(g, axis=1)[:, None]
        for i, j in itertools.combinations(range(len(norm_g)), 2):
            if np.max(np.abs(norm_g[i] - norm_g[j])) <= 1e-9:
                raise ConeConstructionError(f"generators {i} and {j} are repeated rays")

        if facets is None:
            f = self._facets_from_generators(g, u)
        else:
            f = np.atleast_2d(np.asarray(facets, dtype=float))
            fu = f @ u
            if np.any(fu <= GEOM_TOL):
                raise ConeConstructionError("unit is not strictly interior (ell(u) <= 0)")
            f = f / fu[:, None]

        self.dim = d
        self.generators = g
        self.facets = f
        self.unit = u
        for a in (self.generators, self.facets, self.unit):
            a.flags.writeable = False
        if _validate:
            self._validate()

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def _facets_from_generators(g: np.ndarray, u: np.ndarray) -> np.ndarray:
        m, d = g.shape
        scale = max(1.0, float(np.max(np.abs(g))))
        cands = []
        for subset in itertools.combinations(range(m), d - 1):
            n = _null_vector(g[list(subset)])
            if n is None:
                continue
            vals = g @ n
            lo, hi = float(vals.min()), float(vals.max())
            if lo >= -GEOM_TOL * scale:
                cands.append(n)
            elif hi <= GEOM_TOL * scale:
                cands.append(-n)
        if not cands:
            raise ConeConstructionError("no facets found; cone is degenerate")
        cands = _dedupe_rows(cands)
        fu = cands @ u
        if np.any(np.abs(fu) <= GEOM_TOL):
            raise ConeConstructionError("unit lies on the boundary of the cone")
        cands = cands * np.sign(fu)[:, None]
        return cands / (cands @ u)[:, None]

    @classmethod
    def from_generators(cls, generators, unit=None, facets=None) -> "PolyhedralCone":
        g = np.atleast_2d(np.asarray(generators, dtype=float))
        if unit is None:
            rows = g / np.linalg.norm(g, axis=1)[:, None]
            unit = rows.sum(axis=0)
        return cls(g, unit, facets=facets)

    @classmethod
    def from_facets(cls, facets, unit) -> "PolyhedralCone":
        f = np.atleast_2d(np.asarray(facets, dtype=float))
        u = np.asarray(unit, dtype=float)
        k, d = f.shape
        fu = f @ u
        if np.any(fu <= GEOM_TOL):
            raise ConeConstructionError("unit is not strictly interior to the facet system")
        f = f / fu[:, None]
        scale = max(1.0, float(np.max(np.abs(f))))
        rays = []
        for subset in itertools.combinations(range(k), d - 1):
            r = _null_vector(f[list(subset)])
            if r is None:
                continue
            vals = f @ r
            if np.all(vals >= -GEOM_TOL * scale):
                rays.append(r)
            elif np.all(-vals >= -GEOM_TOL * scale):
                rays.append(-r)
        if not rays:
            raise ConeConstructionError("no extreme rays found; facet system degenerate")
        rays = [r for r in rays if np.linalg.norm(r) > GEOM_TOL]
        rays = [r / np.linalg.norm(r) for r in rays]
        # keep only extreme rays: tight facets must have rank d-1
        kept = []
        for r in rays:
            tight = f[np.abs(f @ r) <= 1e-8]
            if len(tight) >= d - 1 and np.linalg.matrix_rank(tight, tol=1e-10) == d - 1:
                kept.append(r)
        rays = _dedupe_rows(kept)
        return cls(rays, u, facets=f)

    # -- validation ----------------------------------------------------------

    def _validate(self) -> None:
        g, f, u, d = self.generators, self.facets, self.unit, self.dim
        scale = max(1.0, float(np.max(np.abs(g))))
        vals = g @ f.T  # (m, k)
        if float(vals.min()) < -1e-8 * scale:
            raise ConeConstructionError(
                f"generator violates a facet by {-float(vals.min()):.3e}"
            )
        if np.linalg.matrix_rank(f, tol=1e-10) < d:
            raise ConeConstructionError("cone is not salient (facets do not span)")
        for g_i, v in zip(g, vals):
            if np.all(v <= 1e-8 * scale):
                raise ConeConstructionError("cone is not salient (contains a line)")
        for j in range(f.shape[0]):
            tight = g[np.abs(vals[:, j]) <= 1e-7 * scale]
            if len(tight) < d - 1 or np.linalg.matrix_rank(tight, tol=1e-10) < d - 1:
                raise ConeConstructionError(f"facet {j} is not supported by d-1 generators")
        for i in range(g.shape[0]):
            tight = f[np.abs(vals[i]) <= 1e-7 * scale]
            if len(tight) < d - 1 or np.linalg.matrix_rank(tight, tol=1e-10) < d - 1:
                raise ConeConstructionError(f"generator {i} is not an extreme ray")

    # -- queries ---------------------------------------------------------------

    @property
    def n_generators(self) -> int:
        return self.generators.shape[0]

    @property
    def n_facets(self) -> int:
        return self.facets.shape[0]

    def contains_point(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(self.facets @ x >= -tol * (1.0 + np.max(np.abs(x)))))

    def facet_values(self, x) -> np.ndarray:
        return self.facets @ np.asarray(x, dtype=float)

    def __repr__(self) -> str:
        return (
            f"PolyhedralCone(dim={self.dim}, generators={self.n_generators}, "
            f"facets={self.n_facets})"
        )


class SimplexCone(PolyhedralCone):
    """Cone with exactly d linearly independent extreme rays.

    ``cond`` reports the condition number of the generator matrix.
    """

    def __init__(self, generators, unit, facets=None):
        super().__init__(generators, unit, facets=facets)
        if self.n_generators != self.dim:
            raise ConeConstructionError("simplex cone must have exactly d generators")
        self.cond = float(np.linalg.cond(self.generators))


def is_simplex(cone: PolyhedralCone) -> bool:
    """True iff the cone has d linearly independent generators."""
    if cone.n_generators != cone.dim:
        return False
    return np.linalg.matrix_rank(cone.generators, tol=1e-10) == cone.dim


def as_simplex(cone: PolyhedralCone) -> SimplexCone:
    if isinstance(cone, SimplexCone):
        return cone
    if not is_simplex(cone):
        raise ConeConstructionError("cone is not a simplex")
    return SimplexCone(cone.generators, cone.unit, facets=cone.facets)


def square_cone() -> PolyhedralCone:
    """The cone over the square: generators (+-1, -+1, 1), unit (0, 0, 1).

    Facet order: c - a, c + a, c - b, c + b as functionals of (a, b, c).
    """
    generators = np.array(
        [[1.0, -1.0, 1.0], [-1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [-1.0, -1.0, 1.0]]
    )
    facets = np.array(
        [[-1.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, -1.0, 1.0], [0.0, 1.0, 1.0]]
    )
    return PolyhedralCone(generators, np.array([0.0, 0.0, 1.0]), facets=facets)


def rays_equal(a: np.ndarray, b: np.ndarray, tol: float = GEOM_TOL) -> bool:
    """Equality of two generator sets as sets of rays."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    if a.shape != b.shape:
        return False
    an = a / np.linalg.norm(a, axis=1)[:, None]
    bn = b / np.linalg.norm(b, axis=1)[:, None]
    used = set()
    for r in an:
        hit = None
        for j, q in enumerate(bn):
            if j not in used and np.max(np.abs(r - q)) <= tol:
                hit = j
                break
        if hit is None:
            return False
        used.add(hit)
    return True


# --------------------------------------------------------------------------
# Sections: the polytope C ∩ (u + H) in orthonormal coordinates on H
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Section:
    """Bounded affine section of a cone.

    ``normal`` is scaled so <normal, u> = 1; ``basis`` (d x (d-1)) holds an
    orthonormal basis of H = normal^perp; ``vertices`` are the generator
    images in section coordinates (u maps to the origin); the section facet
    system is  1 + facet_rows @ y >= 0.
    """

    cone: PolyhedralCone
    normal: np.ndarray
    basis: np.ndarray
    vertices: np.ndarray
    facet_rows: np.ndarray

    def to_ambient(self, y) -> np.ndarray:
        return self.cone.unit + self.basis @ np.asarray(y, dtype=float)

    def to_coords(self, x) -> np.ndarray:
        return self.basis.T @ (np.asarray(x, dtype=float) - self.cone.unit)

    def contains(self, y, tol: float = GEOM_TOL) -> bool:
        vals = 1.0 + self.facet_rows @ np.asarray(y, dtype=float)
        return bool(np.all(vals >= -tol))


def _hyperplane_basis(normal: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of normal^perp via Gram-Schmidt."""
    d = len(normal)
    nh = normal / np.linalg.norm(normal)
    basis: list[np.ndarray] = []
    for i in range(d):
        v = np.zeros(d)
        v[i] = 1.0
        v = v - (nh @ v) * nh
        for b in basis:
            v = v - (b @ v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-9:
            basis.append(v / nv)
        if len(basis) == d - 1:
            break
    return np.column_stack(basis)


def section_of(cone: PolyhedralCone, h_normal) -> Section:
    n = np.asarray(h_normal, dtype=float)
    nu = float(n @ cone.unit)
    if abs(nu) <= GEOM_TOL:
        raise ValueError("hyperplane normal is orthogonal to the unit")
    n = n / nu
    gv = cone.generators @ n
    if np.any(gv <= GEOM_TOL):
        raise ValueError(
            "section is unbounded: the hyperplane meets the cone away from 0"
        )
    pts = cone.generators / gv[:, None]
    basis = _hyperplane_basis(n)
    vertices = (pts - cone.unit) @ basis
    facet_rows = cone.facets @ basis
    return Section(
        cone=cone, normal=n, basis=basis, vertices=vertices, facet_rows=facet_rows
    )


def scaled_cone(cone: PolyhedralCone, nu: float, h_normal) -> PolyhedralCone:
    """Shrink the section C ∩ (u + H) by factor nu about u and re-cone."""
    if not (0.0 < nu <= 1.0):
        raise ValueError(f"scaling factor must be in (0, 1], got {nu}")
    sec = section_of(cone, h_normal)
    pts = cone.generators / (cone.generators @ sec.normal)[:, None]
    new_gens = cone.unit + nu * (pts - cone.unit)
    return PolyhedralCone(new_gens, cone.unit)


def is_centrally_symmetric(cone: PolyhedralCone, h_normal, tol: float = GEOM_TOL) -> bool:
    """True iff the section vertex set is invariant under y -> -y about u."""
    sec = section_of(cone, h_normal)
    v = sec.vertices
    scale = 1.0 + float(np.max(np.abs(v)))
    for r in v:
        if not any(np.max(np.abs(r + q)) <= tol * scale for q in v):
            return False
    return True


def _simplex_volume(points: np.ndarray) -> float:
    diffs = points[1:] - points[0]
    return abs(float(np.linalg.det(diffs))) / math.factorial(len(points) - 1)


def _simplex_facets(points: np.ndarray, tol: float = 1e-12):
    """Facet system {w_j . y <= c_j} of a nondegenerate simplex."""
    k = len(points)  # == dim + 1
    rows = []
    for omit in range(k):
        face = np.delete(points, omit, axis=0)
        base = face[0]
        span = face[1:] - base
        n = _null_vector_affine(span, points.shape[1])
        if n is None:
            return None
        c = float(n @ base)
        if n @ points[omit] > c:  # orient inward
            n, c = -n, -c
        rows.append((n, c))
    return rows


def _null_vector_affine(span: np.ndarray, d: int) -> Optional[np.ndarray]:
    if span.size == 0:
        return np.ones(d) if d == 1 else None
    _, sv, vt = np.linalg.svd(span, full_matrices=True)
    rank = int(np.sum(sv > 1e-12 * max(1.0, sv[0])))
    if rank != d - 1:
        return None
    return vt[-1]


@dataclass(frozen=True)
class MaxVolumeSimplex:
    simplex: SimplexCone
    vertex_indices: tuple[int, ...]
    volume: float
    section_barycenter: np.ndarray
    barycenter: np.ndarray  # ambient point on u + H


def max_volume_inscribed_simplex(cone: PolyhedralCone, h_normal) -> MaxVolumeSimplex:
    """Largest-volume simplex with vertices at section vertices.

    Exhaustive over vertex subsets; a maximum-volume inscribed simplex in a
    polytope can always be chosen with vertices at polytope vertices, so the
    search is exact for the section polytope.
    """
    sec = section_of(cone, h_normal)
    verts = sec.vertices
    d = cone.dim
    best = None
    for subset in itertools.combinations(range(len(verts)), d):
        vol = _simplex_volume(verts[list(subset)])
        if best is None or vol > best[1] + 1e-15:
            best = (subset, vol)
    subset, vol = best
    if vol <= GEOM_TOL:
        raise ValueError("section vertices are affinely degenerate")
    pts = verts[list(subset)]
    bary = pts.mean(axis=0)
    rays = np.array([sec.to_ambient(y) for y in pts])
    simplex = SimplexCone(rays, sec.to_ambient(bary))
    return MaxVolumeSimplex(
        simplex=simplex,
        vertex_indices=tuple(subset),
        volume=vol,
        section_barycenter=bary,
        barycenter=sec.to_ambient(bary),
    )


def _sandwich_candidates(sec: Section) -> list[np.ndarray]:
    """Candidate simplex vertex pools: section vertices, facet barycenters,
    pairwise midpoints and the centre.  Soundness comes from the two-sided
    certificate, so the pool only affects completeness of the search."""
    verts = sec.vertices
    pool = [v for v in verts]
    k = sec.facet_rows.shape[0]
    scale = 1.0 + float(np.max(np.abs(verts)))
    for j in range(k):
        vals = 1.0 + verts @ sec.facet_rows[j]
        tight = verts[np.abs(vals) <= 1e-8 * scale]
        if len(tight):
            pool.append(tight.mean(axis=0))
    for i, j in itertools.combinations(range(len(verts)), 2):
        pool.append((verts[i] + verts[j]) / 2.0)
    pool.append(verts.mean(axis=0))
    return [np.asarray(p) for p in _dedupe_rows(pool, tol=1e-9)]


def find_sandwich_simplex(
    cone: PolyhedralCone, nu: float, h_normal
) -> Optional[SimplexCone]:
    """Search for a simplex cone S with nu*C ⊆ S ⊆ C (sections about u).

    Candidates are simplices on a pool of section points (vertices, facet
    barycenters, midpoints, centre), tried in order of decreasing volume;
    each returned simplex passes the two-sided facet-evaluation certificate.
    Returns None when the search fails at this nu.
    """
    if not (0.0 < nu <= 1.0):
        raise ValueError(f"scaling factor must be in (0, 1], got {nu}")
    sec = section_of(cone, h_normal)
    d = cone.dim
    inner = nu * sec.vertices
    scale = 1.0 + float(np.max(np.abs(sec.vertices)))
    tol = 1e-9 * scale

    pool = _sandwich_candidates(sec)
    cands = []
    for subset in itertools.combinations(range(len(pool)), d):
        pts = np.array([pool[i] for i in subset])
        vol = _simplex_volume(pts)
        if vol > GEOM_TOL:
            cands.append((vol, pts))
    cands.sort(key=lambda t: -t[0])

    for _, pts in cands:
        # S ⊆ C: simplex vertices satisfy the section facets
        if not all(sec.contains(pt, tol=tol) for pt in pts):
            continue
        rows = _simplex_facets(pts)
        if rows is None:
            continue
        # nu*C ⊆ S: scaled vertices satisfy the simplex facets
        if all(
            float(w @ z) <= c + tol for z in inner for (w, c) in rows
        ):
            rays = np.array([sec.to_ambient(y) for y in pts])
            return SimplexCone(rays, cone.unit)
    return None


# --------------------------------------------------------------------------
# JSON cone format: {"d": int, "unit": [...], "generators": [[...]],
#                    "facets": [[...]] (optional)}
# --------------------------------------------------------------------------


def cone_to_json(cone: PolyhedralCone) -> dict:
    return {
        "d": cone.dim,
        "unit": cone.unit.tolist(),
        "generators": cone.generators.tolist(),
        "facets": cone.facets.tolist(),
    }


def cone_from_json(obj: dict) -> PolyhedralCone:
    if not isinstance(obj, dict):
        raise ValueError("cone document must be a JSON object")
    for key in ("d", "unit", "generators"):
        if key not in obj:
            raise ValueError(f"cone document missing field {key!r}")
    d = int(obj["d"])
    unit = np.asarray(obj["unit"], dtype=float)
    gens = np.asarray(obj["generators"], dtype=float)
    if unit.shape != (d,):
        raise ValueError(f"unit has length {unit.shape}, expected {d}")
    if gens.ndim != 2 or gens.shape[1] != d:
        raise ValueError("generators must be an array of length-d vectors")
    facets = obj.get("facets")
    if facets is not None:
        facets = np.asarray(facets, dtype=float)
        if facets.ndim != 2 or facets.shape[1] != d:
            raise ValueError("facets must be an array of length-d vectors")
    return PolyhedralCone(gens, unit, facets=facets)


def load_cone(path) -> PolyhedralCone:
    with open(path) as fh:
        return cone_from_json(json.load(fh))


def save_cone(cone: PolyhedralCone, path) -> None:
    with open(path, "w") as fh:
        json.dump(cone_to_json(cone), fh, indent=1, sort_keys=True)
