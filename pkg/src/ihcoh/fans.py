"""Fans of strictly convex cones: validation, predicates, quotients.

A fan stores a global primitive ray list plus maximal cones as ray-index
sets; the full face closure is computed eagerly at construction so reads
are contention-free.  Star fans realize lattice quotients via Smith normal
form, and ``generated_fan`` builds the common refinement of a family of
cones by iterated pairwise splitting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg, polyhedra
from .errors import (
    EmptyInput,
    InternalInconsistency,
    LinealityInInput,
    NotAFan,
    NotComplete,
    NotStrictlyConvex,
    TauNotInFan,
)
from .linalg import IVec, dot, is_zero_vector, primitive
from .polyhedra import Cone, cone_intersection, faces, is_face_of


@dataclass(frozen=True)
class Fan:
    """A finite fan with eagerly computed face closure.

    ``maximal_cones`` index into ``rays``; ``all_cones`` lists every cone of
    the fan (including the zero cone) grouped by dimension.
    """

    ambient_rank: int
    rays: tuple[IVec, ...]
    maximal_cones: tuple[tuple[int, ...], ...]
    cones_by_dim: tuple[tuple[Cone, ...], ...]
    is_complete: bool
    is_simplicial: bool

    def all_cones(self):
        for level in self.cones_by_dim:
            yield from level

    def cones(self, dim: int) -> tuple[Cone, ...]:
        if dim < 0 or dim >= len(self.cones_by_dim):
            return ()
        return self.cones_by_dim[dim]

    @property
    def max_cone_objects(self) -> tuple[Cone, ...]:
        return tuple(Cone.from_rays(self.ambient_rank,
                                    [self.rays[i] for i in idx]) if idx
                     else Cone.zero(self.ambient_rank)
                     for idx in self.maximal_cones)

    def f_vector(self) -> tuple[int, ...]:
        """Number of cones in each dimension 0..rank (zero cone included)."""
        return tuple(len(level) for level in self.cones_by_dim)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Fan):
            return NotImplemented
        return (self.ambient_rank == other.ambient_rank
                and self.rays == other.rays
                and self.maximal_cones == other.maximal_cones)

    def __hash__(self):
        return hash((self.ambient_rank, self.rays, self.maximal_cones))

    def __repr__(self):
        return (f"Fan(rank={self.ambient_rank}, rays={len(self.rays)}, "
                f"maximal={len(self.maximal_cones)}, complete={self.is_complete})")


def build_fan(rank: int, cones) -> Fan:
    """Validate a collection of cones as (the maximal cones of) a fan.

    Checks strict convexity and the mutual-face condition on every pair,
    computes the face closure, and reports completeness and simpliciality.
    Cones contained in other cones are absorbed.
    """
    cone_list = list(cones)
    if not cone_list:
        raise EmptyInput("a fan needs at least one cone")
    for c in cone_list:
        if not isinstance(c, Cone):
            raise TypeError(f"expected Cone, got {type(c)!r}")
        if c.ambient_rank != rank:
            raise NotAFan(f"cone of rank {c.ambient_rank} in a rank-{rank} fan")
        if not c.is_strictly_convex:
            raise NotStrictlyConvex(f"cone with lineality cannot enter a fan: {c}")
    maximal = _absorb(cone_list)
    for i, a in enumerate(maximal):
        for b in maximal[i + 1:]:
            meet = cone_intersection(a, b)
            if not (is_face_of(meet, a) and is_face_of(meet, b)):
                raise NotAFan(
                    f"intersection of {a} and {b} is not a mutual face")
    return _assemble(rank, maximal)


def build_cone_complex(rank: int, cones) -> Fan:
    """Assemble cones that tile with disjoint relative interiors.

    Weaker than :func:`build_fan`: two maximal cones may share a boundary
    piece that is not a common face.  Used for chart-wise constructions whose
    per-chart pieces are genuine fans but whose minimal subdivisions can
    disagree along shared chart boundaries.  Raises NotAFan when two cones
    overlap in their relative interiors.
    """
    cone_list = list(cones)
    if not cone_list:
        raise EmptyInput("a complex needs at least one cone")
    for c in cone_list:
        if c.ambient_rank != rank:
            raise NotAFan(f"cone of rank {c.ambient_rank} in a rank-{rank} complex")
        if not c.is_strictly_convex:
            raise NotStrictlyConvex(f"cone with lineality cannot enter a complex: {c}")
    maximal = _absorb(cone_list)
    for i, a in enumerate(maximal):
        for b in maximal[i + 1:]:
            meet = cone_intersection(a, b)
            if meet.dim == a.dim and meet.dim == b.dim:
                raise NotAFan(f"{a} and {b} overlap in their interiors")
    return _assemble(rank, maximal)


def fan_from_indices(rank: int, rays, maximal_cones) -> Fan:
    """Build and validate a fan from the serialized presentation."""
    ray_list = [tuple(int(x) for x in r) for r in rays]
    cones = []
    for idx in maximal_cones:
        cones.append(Cone.from_rays(rank, [ray_list[i] for i in idx])
                     if idx else Cone.zero(rank))
    return build_fan(rank, cones)


def _absorb(cones: list[Cone]) -> list[Cone]:
    """Drop cones contained in another cone of the list (and duplicates)."""
    uniq = []
    for c in cones:
        if c not in uniq:
            uniq.append(c)
    keep = []
    for c in uniq:
        if not any(d is not c and d.contains_cone(c) and d.dim >= c.dim
                   and not c.contains_cone(d) for d in uniq):
            keep.append(c)
    # exact duplicates were removed above; containment among equals keeps one
    return keep


def _assemble(rank: int, maximal: list[Cone]) -> Fan:
    face_set: dict[tuple, Cone] = {}
    for c in maximal:
        for level in faces(c):
            for f in level:
                face_set.setdefault((f.dim, f.rays), f)
    max_dim = max((c.dim for c in maximal), default=0)
    by_dim: list[list[Cone]] = [[] for _ in range(max_dim + 1)]
    for (d, _), f in face_set.items():
        by_dim[d].append(f)
    cones_by_dim = tuple(tuple(sorted(lvl, key=lambda f: f.rays)) for lvl in by_dim)
    global_rays = tuple(sorted(f.rays[0] for f in cones_by_dim[1])) \
        if max_dim >= 1 else ()
    ray_index = {r: i for i, r in enumerate(global_rays)}
    max_idx = sorted(tuple(sorted(ray_index[r] for r in c.rays)) for c in maximal)
    complete = _is_complete(rank, maximal)
    simplicial = all(len(c.rays) == c.dim for c in maximal)
    return Fan(
        ambient_rank=rank,
        rays=global_rays,
        maximal_cones=tuple(max_idx),
        cones_by_dim=cones_by_dim,
        is_complete=complete,
        is_simplicial=simplicial,
    )


def _is_complete(rank: int, maximal: list[Cone]) -> bool:
    """Support covers the whole space iff every maximal cone is full
    dimensional and each of its facets is shared with exactly one other."""
    if rank == 0:
        return True
    if any(c.dim != rank for c in maximal):
        return False
    facet_count: dict[tuple, int] = {}
    for c in maximal:
        for m in c.facet_normals:
            facet_rays = tuple(sorted(r for r in c.rays if dot(m, r) == 0))
            facet_count[facet_rays] = facet_count.get(facet_rays, 0) + 1
    return all(v == 2 for v in facet_count.values())


def is_complete(f: Fan) -> bool:
    return f.is_complete


# ---------------------------------------------------------------------------
# star fans (lattice quotients)
# ---------------------------------------------------------------------------

def _span_lattice_basis(c: Cone) -> tuple[IVec, ...]:
    """Saturated integer basis of span(c) geq lattice points."""
    if c.dim == 0:
        return ()
    return linalg.kernel_basis(c.span_equations, ncols=c.ambient_rank) \
        if c.span_equations else tuple(linalg.identity_matrix(c.ambient_rank))


def quotient_map_for(tau: Cone):
    """Projection matrix onto the quotient lattice by span(tau)'s lattice."""
    basis = _span_lattice_basis(tau)
    return linalg.lattice_quotient_map(basis, tau.ambient_rank)


def star_fan(cone_family, tau: Cone) -> Fan:
    """Quotient fan of the cones containing ``tau`` as a face.

    ``cone_family`` can be a Fan (its maximal cones are used together with
    all their faces) or any iterable of cones; only members admitting ``tau``
    as a face contribute, each mapped through the lattice quotient by
    span(tau).  The images are validated as a fan of rank
    ``ambient - dim tau``.
    """
    if isinstance(cone_family, Fan):
        members = list(cone_family.all_cones())
    else:
        members = list(cone_family)
    carriers = [c for c in members if is_face_of(tau, c)]
    if not carriers:
        raise TauNotInFan(f"{tau} is not a face of any cone in the family")
    q = quotient_map_for(tau)
    target = tau.ambient_rank - tau.dim
    images = []
    for c in carriers:
        gens = [linalg.mat_vec(q, r) for r in c.rays]
        gens = [g for g in gens if not is_zero_vector(g)]
        images.append(Cone.from_rays(target, gens) if gens else Cone.zero(target))
    return build_fan(target, _absorb(images))


# ---------------------------------------------------------------------------
# cross-section polytopes and normal fans
# ---------------------------------------------------------------------------

class _TrivialLowDim:
    """Marker returned for cones of dimension at most two."""

    def __repr__(self):
        return "TrivialLowDim"


TrivialLowDim = _TrivialLowDim()


def _restrict_to_span(c: Cone) -> tuple[tuple[IVec, ...], Cone]:
    """Coordinates of ``c`` inside its span: (basis vectors, full-dim cone)."""
    basis = _span_lattice_basis(c)
    cols = linalg.transpose(basis)
    new_rays = []
    for r in c.rays:
        y = linalg.solve_rational(cols, r)
        new_rays.append(tuple(int(x) for x in y))
    return basis, Cone.from_rays(len(basis), new_rays)


def interior_point(c: Cone, rule: str = "sum") -> IVec:
    """Deterministic relative-interior point: a positive combination of all
    primitive extreme rays ('sum' weights 1, 'weighted' weights 1,2,3,...)."""
    if rule == "sum":
        weights = [1] * len(c.rays)
    elif rule == "weighted":
        weights = list(range(1, len(c.rays) + 1))
    else:
        raise ValueError(f"unknown interior rule {rule!r}")
    total = [0] * c.ambient_rank
    for w, r in zip(weights, c.rays):
        for i in range(c.ambient_rank):
            total[i] += w * r[i]
    return tuple(total)


def cross_section_polytope(c: Cone, rule: str = "sum"):
    """Vertices of the dual cross-section polytope in span coordinates.

    The dual cone of ``c`` inside its span is sliced by the hyperplane where
    the chosen interior functional equals one; the rays of the dual map
    bijectively onto the vertices.
    """
    _, restricted = _restrict_to_span(c)
    omega = polyhedra.dual_cone(restricted)
    v = interior_point(restricted, rule)
    verts = []
    for m in omega.rays:
        s = dot(m, v)
        if s <= 0:
            raise InternalInconsistency("functional is not interior to the cone")
        verts.append(tuple(Fraction(x, s) for x in m))
    return restricted, verts


def normal_fan_of_cone(sigma: Cone, rule: str = "sum"):
    """Complete normal fan of the cross-section polytope, or TrivialLowDim.

    For ``dim sigma >= 3`` the dual cross-section polytope has dimension
    ``dim sigma - 1`` inside its affine hull, and its normal fan is returned
    as a complete fan of that rank; maximal cones biject with the polytope's
    vertices.  For ``dim sigma <= 2`` the recursion bottoms out and the
    marker is returned.
    """
    if not sigma.is_strictly_convex:
        raise NotStrictlyConvex("normal fan needs a strictly convex cone")
    if sigma.dim <= 2:
        return TrivialLowDim
    restricted, verts = cross_section_polytope(sigma, rule)
    d = restricted.ambient_rank
    v = interior_point(restricted, rule)
    # affine chart of the slice hyperplane {<., v> = 1}
    hyper_basis = linalg.kernel_basis((v,), ncols=d)
    cols = linalg.transpose(hyper_basis)
    base = verts[0]
    coords = []
    for p in verts:
        diff = tuple(a - b for a, b in zip(p, base))
        y = linalg.solve_rational(cols, diff)
        coords.append(tuple(y))
    maximal = []
    for i, p in enumerate(coords):
        rows = [tuple(a - b for a, b in zip(q, p))
                for j, q in enumerate(coords) if j != i]
        maximal.append(Cone.from_inequalities(d - 1, rows))
    fan = build_fan(d - 1, maximal)
    if not fan.is_complete or len(fan.maximal_cones) != len(verts):
        raise InternalInconsistency("normal fan construction failed")
    return fan


# ---------------------------------------------------------------------------
# common refinement
# ---------------------------------------------------------------------------

def generated_fan(rank: int, cones) -> Fan:
    """Common refinement fan of a family of strictly convex cones.

    Cells are obtained by iterated pairwise splitting along facet and span
    hyperplanes until every two cells meet in a mutual face; if the inputs
    already form a fan they are returned unchanged.  The support of the
    result equals the union of the inputs.
    """
    cone_list = [c for c in cones]
    if not cone_list:
        raise EmptyInput("no cones supplied")
    for c in cone_list:
        if not c.is_strictly_convex:
            raise LinealityInInput(f"input cone carries lineality: {c}")
        if c.ambient_rank != rank:
            raise LinealityInInput(
                f"cone of rank {c.ambient_rank} in rank-{rank} family")
    # keep strictly contained cones: they are exactly what forces splits
    cells = _dedup_cones(cone_list)
    guard = 0
    while True:
        guard += 1
        if guard > 10000:
            raise InternalInconsistency("refinement did not stabilize")
        pair = _find_violation(cells)
        if pair is None:
            break
        a, b = pair
        pieces = _split_by(a, b) + _split_by(b, a)
        rest = [c for c in cells if c is not a and c is not b]
        cells = _dedup_cones(rest + pieces)
    return build_fan(rank, cells)


def _find_violation(cells):
    for i, a in enumerate(cells):
        for b in cells[i + 1:]:
            meet = cone_intersection(a, b)
            if not (is_face_of(meet, a) and is_face_of(meet, b)):
                return a, b
    return None


def _split_by(a: Cone, b: Cone) -> list[Cone]:
    """Cut ``a`` along the supporting hyperplanes of ``b``.

    Span equations of ``b`` always cut; facet normals cut only when ``a``
    lies inside span(b), where their hyperplane traces are canonical.  For a
    lower-dimensional ``b`` an ambient facet hyperplane is an arbitrary
    representative and using it would refine beyond the coarsest fan.
    """
    hyperplanes = list(b.span_equations)
    if all(all(dot(e, r) == 0 for r in a.rays) for e in b.span_equations):
        hyperplanes += list(b.facet_normals)
    pieces = [a]
    for h in hyperplanes:
        new_pieces = []
        for p in pieces:
            plus = Cone.from_inequalities(
                p.ambient_rank, list(p.facet_normals) + [h], p.span_equations)
            minus = Cone.from_inequalities(
                p.ambient_rank,
                list(p.facet_normals) + [tuple(-x for x in h)],
                p.span_equations)
            halves = [q for q in (plus, minus) if q.dim == p.dim]
            new_pieces.extend(halves if halves else [p])
        pieces = _dedup_cones(new_pieces)
    return pieces


def _dedup_cones(cones):
    out = []
    for c in cones:
        if c not in out:
            out.append(c)
    return out
