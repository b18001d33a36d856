"""Exact rational cones and tail-cone polyhedra.

Both objects carry dual descriptions computed by an incremental double
description (Fourier-Motzkin) pass with exact integer arithmetic and
combinatorial adjacency, so ray/facet conversion, face enumeration,
Minkowski sums and feasibility checks are all certified.

Generators are stored primitive and lexicographically sorted; cone equality is
a plain field comparison for strictly convex cones, and containment-based for
cones carrying lineality (which only occur as intermediate images).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import NotStrictlyConvex, RankMismatch
from .linalg import (
    IVec,
    QVec,
    as_fraction_vector,
    dot,
    is_zero_vector,
    kernel_basis,
    mat_rank,
    primitive,
    vadd,
    vsub,
)


# ---------------------------------------------------------------------------
# double description engine
# ---------------------------------------------------------------------------

def _clean_rows(rows) -> list[IVec]:
    out = []
    for row in rows:
        if not is_zero_vector(row):
            out.append(primitive(row))
    return out


def _dedup(vectors) -> list:
    seen = set()
    out = []
    for v in vectors:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def _dd_pointed(rows: list[IVec], dim: int) -> list[IVec]:
    """Extreme rays of ``{x in Q^dim : row . x >= 0}``; needs rank(rows)=dim.

    Incremental double description: start from a simplicial cone cut out by
    ``dim`` independent rows, then add the remaining constraints one at a
    time, combining adjacent rays across each new hyperplane.
    """
    if dim == 0:
        return []
    init = linalg.independent_row_indices(rows, target=dim)
    if len(init) < dim:
        raise ValueError("constraint matrix does not have full column rank")
    base = [rows[i] for i in init]
    inv_cols = linalg.transpose(linalg.invert_matrix(base))
    rays = [primitive(col) for col in inv_cols]
    init_set = set(init)
    rest = [rows[i] for i in range(len(rows)) if i not in init_set]
    processed = list(base)

    for row in rest:
        values = [dot(row, r) for r in rays]
        plus = [r for r, v in zip(rays, values) if v > 0]
        zero = [r for r, v in zip(rays, values) if v == 0]
        minus = [r for r, v in zip(rays, values) if v < 0]
        if not minus:
            processed.append(row)
            continue
        actives = {r: frozenset(i for i, c in enumerate(processed) if dot(c, r) == 0)
                   for r in rays}
        new_rays = []
        for rp in plus:
            for rm in minus:
                common = actives[rp] & actives[rm]
                # combinatorial adjacency: no third extreme ray is active on
                # every constraint that both rp and rm are active on
                if any(common <= actives[r] for r in rays
                       if r is not rp and r is not rm):
                    continue
                vp, vm = dot(row, rp), dot(row, rm)
                combined = vsub(linalg.vscale(vp, rm), linalg.vscale(vm, rp))
                new_rays.append(primitive(combined))
        processed.append(row)
        rays = _dedup(plus + zero + new_rays)
    return sorted(_dedup(rays))


def _combine(basis, coeffs):
    n = len(basis[0])
    out = [0] * n
    for c, b in zip(coeffs, basis, strict=True):
        for i in range(n):
            out[i] += c * b[i]
    return tuple(out)


def dd_rays(ineqs, eqs, rank: int) -> tuple[list[IVec], list[IVec]]:
    """(lineality basis, extreme rays) of ``{x : ineqs.x >= 0, eqs.x = 0}``.

    Rays are primitive and extreme modulo the lineality space; the lineality
    basis is integral and saturated.
    """
    ineqs = _clean_rows(ineqs)
    eqs = _clean_rows(eqs)
    span = kernel_basis(eqs, ncols=rank) if eqs else tuple(linalg.identity_matrix(rank))
    if not span:
        return [], []
    # coordinates y with x = sum y_j * span[j]
    reduced = _clean_rows([tuple(dot(row, w) for w in span) for row in ineqs])
    v = len(span)
    lin_sub = kernel_basis(reduced, ncols=v) if reduced else tuple(linalg.identity_matrix(v))
    lineality = [primitive(_combine(span, y)) for y in lin_sub]
    p = v - len(lin_sub)
    if p == 0:
        return sorted(lineality), []
    comp = linalg.complete_to_basis(lin_sub, v) if lin_sub else tuple(linalg.identity_matrix(v))
    rows2 = _clean_rows([tuple(dot(row, c) for c in comp) for row in reduced])
    rays_z = _dd_pointed(rows2, p)
    rays = [primitive(_combine(span, _combine(comp, z))) for z in rays_z]
    return sorted(lineality), sorted(_dedup(rays))


def dd_facets(generators, lineality, rank: int) -> tuple[list[IVec], list[IVec]]:
    """(span equations, facet inequalities) of the cone generated by the input.

    Dual to :func:`dd_rays`: the valid inequalities of a cone form the dual
    cone, whose lineality is the orthogonal complement of the span (giving
    the equations) and whose extreme rays are the facet normals.
    """
    return dd_rays(list(generators), list(lineality), rank)


# ---------------------------------------------------------------------------
# Cone
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cone:
    """A rational polyhedral cone with both V- and H-descriptions.

    ``rays`` are the extreme rays (primitive, sorted); ``lineality`` is empty
    exactly when the cone is strictly convex.  ``facet_normals`` and
    ``span_equations`` give the dual description: the cone is the set of
    points satisfying every inequality and equation.
    """

    ambient_rank: int
    rays: tuple[IVec, ...]
    lineality: tuple[IVec, ...]
    facet_normals: tuple[IVec, ...]
    span_equations: tuple[IVec, ...]
    dim: int

    # -- constructors --------------------------------------------------------
    @staticmethod
    def from_rays(rank: int, generators) -> "Cone":
        for g in generators:
            if len(g) != rank:
                raise RankMismatch(f"generator {g} does not have length {rank}")
        gens = [primitive(g) for g in generators if not is_zero_vector(g)]
        eqs, ineqs = dd_facets(gens, [], rank)
        return Cone._from_hrep(rank, ineqs, eqs)

    @staticmethod
    def from_inequalities(rank: int, ineqs, eqs=()) -> "Cone":
        for row in list(ineqs) + list(eqs):
            if len(row) != rank:
                raise RankMismatch(f"constraint {row} does not have length {rank}")
        return Cone._from_hrep(rank, list(ineqs), list(eqs))

    @staticmethod
    def _from_hrep(rank, ineqs, eqs) -> "Cone":
        lin, rays = dd_rays(ineqs, eqs, rank)
        lin_canon = _hermite_rows(lin, rank)
        # re-derive an irredundant H-description from the V-side
        eqs2, ineqs2 = dd_facets(rays, lin, rank)
        return Cone(
            ambient_rank=rank,
            rays=tuple(rays),
            lineality=tuple(lin_canon),
            facet_normals=tuple(sorted(ineqs2)),
            span_equations=tuple(sorted(_hermite_rows(eqs2, rank))),
            dim=_dim_of(rays, lin),
        )

    @staticmethod
    def zero(rank: int) -> "Cone":
        eqs = tuple(linalg.identity_matrix(rank))
        return Cone(rank, (), (), (), eqs, 0)

    @staticmethod
    def orthant(rank: int) -> "Cone":
        rows = tuple(sorted(linalg.identity_matrix(rank)))
        return Cone(rank, rows, (), rows, (), rank)

    # -- predicates ----------------------------------------------------------
    @property
    def is_strictly_convex(self) -> bool:
        return not self.lineality

    def contains_point(self, v) -> bool:
        if len(v) != self.ambient_rank:
            raise RankMismatch("point has wrong length")
        return (all(dot(e, v) == 0 for e in self.span_equations)
                and all(dot(m, v) >= 0 for m in self.facet_normals))

    def contains_cone(self, other: "Cone") -> bool:
        if not all(self.contains_point(r) for r in other.rays):
            return False
        for l in other.lineality:
            if not (self.contains_point(l)
                    and self.contains_point(tuple(-x for x in l))):
                return False
        return True

    def relative_interior_point(self) -> QVec:
        """A deterministic rational point in the relative interior."""
        n = self.ambient_rank
        total = [Fraction(0)] * n
        for r in self.rays:
            total = [a + b for a, b in zip(total, r)]
        return tuple(total)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cone):
            return NotImplemented
        if self.ambient_rank != other.ambient_rank or self.dim != other.dim:
            return False
        if self.is_strictly_convex and other.is_strictly_convex:
            return self.rays == other.rays
        # lineality representatives are basis-dependent; compare semantically
        return self.contains_cone(other) and other.contains_cone(self)

    def __hash__(self):
        lin_key = self.lineality if self.lineality else ()
        ray_key = self.rays if self.is_strictly_convex else ()
        return hash((self.ambient_rank, self.dim, ray_key, lin_key))

    def __repr__(self):
        tag = "" if self.is_strictly_convex else ", with lineality"
        return f"Cone(rank={self.ambient_rank}, dim={self.dim}, rays={list(self.rays)}{tag})"


def _dim_of(rays, lin) -> int:
    vectors = list(rays) + list(lin)
    return mat_rank(vectors) if vectors else 0


def _hermite_rows(rows, n: int) -> list[IVec]:
    """Row-echelon Hermite basis of the lattice spanned by integer rows.

    Canonical: pivot columns increase, pivots positive, entries above each
    pivot reduced into [0, pivot).
    """
    work = [list(r) for r in rows if any(r)]
    basis: list[list[int]] = []
    for col in range(n):
        nz = [r for r in work if r[col] != 0]
        rest = [r for r in work if r[col] == 0]
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            a = nz[0]
            reduced = [a]
            for r in nz[1:]:
                q = r[col] // a[col]
                rr = [x - q * y for x, y in zip(r, a)]
                if rr[col] != 0:
                    reduced.append(rr)
                elif any(rr):
                    rest.append(rr)
            nz = reduced
        if nz:
            pivot = nz[0] if nz[0][col] > 0 else [-x for x in nz[0]]
            basis.append(pivot)
        work = rest
    for i in reversed(range(len(basis))):
        p = next(j for j, x in enumerate(basis[i]) if x != 0)
        for k in range(i):
            q = basis[k][p] // basis[i][p]
            if q:
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[i])]
    return [tuple(b) for b in basis]


# ---------------------------------------------------------------------------
# cone operations
# ---------------------------------------------------------------------------

def dual_cone(c: Cone) -> Cone:
    """``{m : <m, v> >= 0 for all v in c}``; involutive on canonical forms."""
    return Cone.from_inequalities(c.ambient_rank, list(c.rays), list(c.lineality))


def cone_intersection(a: Cone, b: Cone) -> Cone:
    if a.ambient_rank != b.ambient_rank:
        raise RankMismatch("cones live in different ranks")
    return Cone.from_inequalities(
        a.ambient_rank,
        list(a.facet_normals) + list(b.facet_normals),
        list(a.span_equations) + list(b.span_equations),
    )


def faces(c: Cone) -> tuple[tuple[Cone, ...], ...]:
    """All faces of a strictly convex cone, graded by dimension.

    ``faces(c)[d]`` lists the d-dimensional faces, from the zero cone up to
    ``c`` itself.
    """
    if not c.is_strictly_convex:
        raise NotStrictlyConvex("face lattice requires a strictly convex cone")
    by_dim: list[list[Cone]] = [[] for _ in range(c.dim + 1)]
    for s in _face_ray_sets(c):
        f = (Cone.from_rays(c.ambient_rank, [c.rays[i] for i in s])
             if s else Cone.zero(c.ambient_rank))
        by_dim[f.dim].append(f)
    return tuple(tuple(sorted(lvl, key=lambda f: f.rays)) for lvl in by_dim)


def _face_ray_sets(c: Cone) -> set[frozenset[int]]:
    """Faces of a pointed cone as sets of extreme-ray indices.

    Every proper face is an intersection of facets, so closing the facet
    incidence sets under intersection enumerates the whole lattice.
    """
    incidence = [frozenset(i for i, r in enumerate(c.rays) if dot(m, r) == 0)
                 for m in c.facet_normals]
    all_rays = frozenset(range(len(c.rays)))
    found = {all_rays, frozenset()}
    queue = [all_rays]
    while queue:
        s = queue.pop()
        for inc in incidence:
            t = s & inc
            if t not in found:
                found.add(t)
                queue.append(t)
    return found


def is_face_of(f: Cone, c: Cone) -> bool:
    """Whether ``f`` is a face of the strictly convex cone ``c``."""
    if f.ambient_rank != c.ambient_rank:
        return False
    rays = set(c.rays)
    if not all(r in rays for r in f.rays):
        return False
    active = [m for m in c.facet_normals if all(dot(m, r) == 0 for r in f.rays)]
    smallest = sorted(r for r in c.rays if all(dot(m, r) == 0 for m in active))
    return smallest == sorted(f.rays)


def linear_image(c: Cone, matrix) -> Cone:
    """Image cone under a linear map given by a rational matrix (rows x rank).

    The image may fail strict convexity; that is recorded on the result's
    ``lineality`` field rather than raised.
    """
    if len(matrix[0]) != c.ambient_rank:
        raise RankMismatch("matrix columns must match the cone's ambient rank")
    target = len(matrix)
    gens = [linalg.mat_vec(matrix, r) for r in c.rays]
    for l in c.lineality:
        image = linalg.mat_vec(matrix, l)
        gens.append(image)
        gens.append(tuple(-x for x in image))
    gens = [primitive(g) for g in gens if not is_zero_vector(g)]
    eqs, ineqs = dd_facets(gens, [], target)
    return Cone._from_hrep(target, ineqs, eqs)


# ---------------------------------------------------------------------------
# Polyhedron (tail cone + polytope)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polyhedron:
    """``conv(vertices) + Cone(rays)`` with a strictly convex tail cone.

    Vertices are exact rationals and non-redundant; rays are the primitive
    extreme rays of the tail cone.  Instances are canonicalized on
    construction via the homogenization cone, so equality is structural.
    """

    ambient_rank: int
    vertices: tuple[QVec, ...]
    rays: tuple[IVec, ...]

    @staticmethod
    def make(rank: int, vertices, rays=()) -> "Polyhedron":
        """Build from generating (possibly redundant) vertices and rays."""
        for v in list(vertices) + list(rays):
            if len(v) != rank:
                raise RankMismatch(f"generator {v} does not have length {rank}")
        verts = [as_fraction_vector(v) for v in vertices]
        if not verts:
            raise ValueError("a polyhedron needs at least one vertex generator")
        hom = [tuple(list(v) + [Fraction(1)]) for v in verts]
        hom += [tuple(list(r) + [0]) for r in rays if not is_zero_vector(r)]
        cone = Cone.from_rays(rank + 1, hom)
        if not cone.is_strictly_convex:
            raise NotStrictlyConvex("tail cone is not strictly convex")
        return _from_homogenization(rank, cone)

    @staticmethod
    def point(rank: int, v=None) -> "Polyhedron":
        v = v if v is not None else (0,) * rank
        return Polyhedron.make(rank, [v])

    # -- structure -----------------------------------------------------------
    def tail_cone(self) -> Cone:
        return (Cone.from_rays(self.ambient_rank, self.rays)
                if self.rays else Cone.zero(self.ambient_rank))

    def homogenization(self) -> Cone:
        hom = [tuple(list(v) + [Fraction(1)]) for v in self.vertices]
        hom += [tuple(list(r) + [0]) for r in self.rays]
        return Cone.from_rays(self.ambient_rank + 1, hom)

    def hrep(self) -> tuple[list[tuple[IVec, int]], list[tuple[IVec, int]]]:
        """(inequalities, equations) as pairs (a, b) meaning a.x >= b / a.x = b."""
        cone = self.homogenization()
        ineqs = [(row[:-1], -row[-1]) for row in cone.facet_normals
                 if not is_zero_vector(row[:-1])]
        eqs = [(row[:-1], -row[-1]) for row in cone.span_equations
               if not is_zero_vector(row[:-1])]
        return ineqs, eqs

    def contains_point(self, v) -> bool:
        ineqs, eqs = self.hrep()
        return (all(dot(a, v) >= b for a, b in ineqs)
                and all(dot(a, v) == b for a, b in eqs))

    @property
    def dim(self) -> int:
        base = self.vertices[0]
        vectors = [vsub(v, base) for v in self.vertices[1:]] + list(self.rays)
        return mat_rank(vectors) if vectors else 0

    def translate(self, offset) -> "Polyhedron":
        return Polyhedron.make(
            self.ambient_rank,
            [vadd(v, offset) for v in self.vertices],
            self.rays,
        )

    def __repr__(self):
        return (f"Polyhedron(rank={self.ambient_rank}, "
                f"vertices={[tuple(map(str, v)) for v in self.vertices]}, "
                f"rays={list(self.rays)})")


def _from_homogenization(rank: int, cone: Cone) -> Polyhedron:
    verts = []
    tail = []
    for r in cone.rays:
        if r[-1] == 0:
            tail.append(r[:-1])
        else:
            verts.append(tuple(Fraction(x, r[-1]) for x in r[:-1]))
    if not verts:
        raise ValueError("homogenization produced no vertices")
    return Polyhedron(rank, tuple(sorted(verts)), tuple(sorted(tail)))


def from_hrep(rank: int, ineqs, eqs=()) -> Polyhedron | None:
    """Polyhedron from ``a.x >= b`` rows ((a, b) pairs); None when empty."""
    hom_ineqs = [tuple(list(a) + [-b]) for a, b in ineqs]
    hom_ineqs.append(tuple([0] * rank + [1]))  # height >= 0
    hom_eqs = [tuple(list(a) + [-b]) for a, b in eqs]
    lin, rays = dd_rays(hom_ineqs, hom_eqs, rank + 1)
    if not any(r[-1] > 0 for r in rays):
        return None
    verts = [tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in rays if r[-1] > 0]
    tail = [r[:-1] for r in rays if r[-1] == 0]
    for l in lin:  # lineality always lies at height zero
        tail.append(l[:-1])
        tail.append(tuple(-x for x in l[:-1]))
    tail = [primitive(t) for t in tail if not is_zero_vector(t)]
    return Polyhedron.make(rank, verts, tail)


def minkowski_sum(a: Polyhedron, b: Polyhedron) -> Polyhedron:
    """Exact Minkowski sum; vertex candidates are pairwise vertex sums."""
    if a.ambient_rank != b.ambient_rank:
        raise RankMismatch("polyhedra live in different ranks")
    verts = [vadd(u, v) for u in a.vertices for v in b.vertices]
    return Polyhedron.make(a.ambient_rank, verts, list(a.rays) + list(b.rays))


def cayley_cone(lam: Polyhedron) -> Cone:
    """Cone in rank n+1 over the polyhedron at height one plus its tail at zero.

    The height-1 slice recovers the input exactly.
    """
    gens = [tuple(list(r) + [0]) for r in lam.rays]
    gens += [tuple(list(v) + [Fraction(1)]) for v in lam.vertices]
    return Cone.from_rays(lam.ambient_rank + 1, gens)


def _hrep_of(obj) -> tuple[int, list[tuple[IVec, int, bool]]]:
    """Uniform (rank, constraints) view; rows are (a, b, is_equation)."""
    if isinstance(obj, Cone):
        rows = [(m, 0, False) for m in obj.facet_normals]
        rows += [(e, 0, True) for e in obj.span_equations]
        return obj.ambient_rank, rows
    ineqs, eqs = obj.hrep()
    rows = [(a, b, False) for a, b in ineqs]
    rows += [(a, b, True) for a, b in eqs]
    return obj.ambient_rank, rows


def intersect_nonempty(a, b) -> tuple[bool, QVec | None]:
    """Exact feasibility of the intersection, with a rational witness point."""
    rank_a, rows_a = _hrep_of(a)
    rank_b, rows_b = _hrep_of(b)
    if rank_a != rank_b:
        raise RankMismatch("operands live in different ranks")
    rank = rank_a
    rows = rows_a + rows_b
    hom_ineqs = [tuple(list(r) + [-b_]) for r, b_, is_eq in rows if not is_eq]
    hom_ineqs.append(tuple([0] * rank + [1]))
    hom_eqs = [tuple(list(r) + [-b_]) for r, b_, is_eq in rows if is_eq]
    _, rays = dd_rays(hom_ineqs, hom_eqs, rank + 1)
    for r in rays:
        if r[-1] > 0:
            return True, tuple(Fraction(x, r[-1]) for x in r[:-1])
    return False, None
