"""Weight packages: factorization, quotient fan, coefficients, enhancement.

A weight package bundles an injective saturated integer matrix F with a
section S, a cokernel projection P, the quotient fan generated by the images
of the orthant faces under P, and the invariant cone obtained by pushing the
orthant slice of the column span through S.  Enhancement produces the
packages of the remaining projective charts by padding F, S, P with a
zero-sum row/column and deleting one index.  Lifting fans pull the quotient
fan back to the orthant (or to each chart cone) so the projection becomes a
fan morphism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from . import linalg
from .errors import SuppliedSectionInvalid
from .fans import Fan, build_fan, generated_fan
from .linalg import IMat, IVec, dot, is_zero_vector, matrix_factorization, primitive
from .polyhedra import Cone, Polyhedron, dd_rays


@dataclass(frozen=True)
class WeightPackage:
    """Factorization data plus the derived quotient fan and invariant cone."""

    ell: int
    n: int
    F: IMat
    S: IMat
    P: IMat
    quotient_fan: Fan
    sigma_theta: Cone

    @property
    def cokernel_rank(self) -> int:
        return self.ell - self.n

    def __repr__(self):
        return (f"WeightPackage(ell={self.ell}, n={self.n}, "
                f"quotient_fan={self.quotient_fan})")


def orthant_face_images(p_matrix, ell: int) -> list[Cone]:
    """Strictly convex images of the orthant faces under the projection."""
    s = len(p_matrix)
    columns = [tuple(p_matrix[r][i] for r in range(s)) for i in range(ell)]
    images = []
    seen = set()
    for k in range(1, ell + 1):
        for sub in itertools.combinations(range(ell), k):
            gens = [columns[i] for i in sub if not is_zero_vector(columns[i])]
            key = frozenset(primitive(g) for g in gens) if gens else frozenset()
            if key in seen:
                continue
            seen.add(key)
            cone = Cone.from_rays(s, gens) if gens else Cone.zero(s)
            if cone.is_strictly_convex and cone.dim > 0:
                images.append(cone)
    return images


def quotient_fan_from(p_matrix, ell: int) -> Fan:
    s = len(p_matrix)
    images = orthant_face_images(p_matrix, ell)
    if not images:
        return build_fan(s, [Cone.zero(s)])
    return generated_fan(s, images)


def sigma_theta_cone(p_matrix, s_matrix, ell: int, n: int) -> Cone:
    """Image under S of the orthant sliced by the kernel of P.

    The slice is taken with the H-description {x >= 0, P x = 0}, avoiding a
    parameterization of the column span.
    """
    ineqs = list(linalg.identity_matrix(ell))
    _, rays = dd_rays(ineqs, list(p_matrix), ell)
    gens = [linalg.mat_vec(s_matrix, r) for r in rays]
    gens = [g for g in gens if not is_zero_vector(g)]
    return Cone.from_rays(n, gens) if gens else Cone.zero(n)


def build_weight_package(f, s=None, p=None) -> WeightPackage:
    """Validate (or compute) the factorization and derive fan and cone.

    ``f`` must be injective and saturated.  A supplied S/P pair is used
    verbatim after checking the section and cokernel identities; otherwise
    deterministic choices come from the Smith normal form.
    """
    mf = matrix_factorization(f, s, p)
    if s is not None and linalg.mat_rank(mf.P) != mf.ell - mf.n:
        raise SuppliedSectionInvalid("P does not span the cokernel")
    fan = quotient_fan_from(mf.P, mf.ell)
    sigma = sigma_theta_cone(mf.P, mf.S, mf.ell, mf.n)
    return WeightPackage(
        ell=mf.ell, n=mf.n, F=mf.F, S=mf.S, P=mf.P,
        quotient_fan=fan, sigma_theta=sigma,
    )


# ---------------------------------------------------------------------------
# coefficients of the associated polyhedral divisor
# ---------------------------------------------------------------------------

def primitive_in_image(p_matrix, direction: IVec) -> IVec:
    """Smallest positive multiple of ``direction`` in the image lattice of P.

    A supplied projection may identify the cokernel with a proper sublattice
    of Z^s; ray generators must be primitive in that sublattice.
    """
    u, d, _ = linalg.smith_normal_form(p_matrix)
    s = len(p_matrix)
    rank = len(linalg.elementary_divisors(p_matrix))
    image_dir = linalg.mat_vec(u, direction)
    if any(image_dir[i] != 0 for i in range(rank, s)):
        raise ValueError("direction does not lie in the image span")
    k = 1
    for i in range(rank):
        di = d[i][i]
        if image_dir[i] != 0:
            k = lcm(k, di // gcd(di, image_dir[i]))
    return tuple(k * x for x in direction)


def dtheta_coefficients(w: WeightPackage) -> tuple[tuple[IVec, Polyhedron], ...]:
    """For each ray of the quotient fan, the S-image of the orthant slice
    over its primitive generator; a polyhedron with tail ``sigma_theta``."""
    out = []
    for ray_cone in w.quotient_fan.cones(1):
        direction = ray_cone.rays[0]
        v_rho = primitive_in_image(w.P, direction)
        coeff = _slice_image(w, v_rho)
        out.append((v_rho, coeff))
    return tuple(out)


def _slice_image(w: WeightPackage, target: IVec) -> Polyhedron:
    ineqs = [(row, 0) for row in linalg.identity_matrix(w.ell)]
    eqs = [(row, t) for row, t in zip(w.P, target, strict=True)]
    from .polyhedra import from_hrep
    slice_poly = from_hrep(w.ell, ineqs, eqs)
    if slice_poly is None:
        raise ValueError(f"empty orthant slice over {target}")
    verts = [linalg.mat_vec(w.S, v) for v in slice_poly.vertices]
    rays = [linalg.mat_vec(w.S, r) for r in slice_poly.rays]
    rays = [r for r in rays if not is_zero_vector(r)]
    return Polyhedron.make(w.n, verts, [primitive(r) for r in rays])


def trivial_coefficient(w: WeightPackage) -> Polyhedron:
    """The tail cone itself, as the coefficient of an unlisted point."""
    return Polyhedron.make(w.n, [(0,) * w.n], w.sigma_theta.rays)


# ---------------------------------------------------------------------------
# enhancement: packages of the other projective charts
# ---------------------------------------------------------------------------

def _pad_rows_zero_sum(mat, rows: int):
    """Prepend a column making every row sum to zero."""
    return tuple((-sum(row),) + tuple(row) for row in mat[:rows])


def enhance(w: WeightPackage) -> tuple[WeightPackage, ...]:
    """Packages of all ell + 1 charts; slot 0 is the input package.

    The padded matrices get a leading zero row (for F) or a zero-sum leading
    column (for S and P); chart v arises by subtracting row v from the padded
    F and deleting index v throughout.
    """
    f_hat = ((0,) * w.n,) + w.F
    s_hat = _pad_rows_zero_sum(w.S, w.n)
    p_hat = _pad_rows_zero_sum(w.P, len(w.P))
    charts = [w]
    for v in range(1, w.ell + 1):
        row_v = f_hat[v]
        shifted = tuple(tuple(x - y for x, y in zip(row, row_v)) for row in f_hat)
        f_v = tuple(row for i, row in enumerate(shifted) if i != v)
        s_v = tuple(tuple(x for i, x in enumerate(row) if i != v) for row in s_hat)
        p_v = tuple(tuple(x for i, x in enumerate(row) if i != v) for row in p_hat)
        charts.append(build_weight_package(f_v, s_v, p_v))
    return tuple(charts)


# ---------------------------------------------------------------------------
# lifting fans
# ---------------------------------------------------------------------------

def projective_chart_cones(ell: int) -> tuple[Cone, ...]:
    """Maximal cones of the standard complete simplicial fan on ell + 1 rays.

    Slot 0 is the orthant; slot j swaps the j-th basis vector for minus the
    sum of all of them.
    """
    basis = linalg.identity_matrix(ell)
    minus = tuple(-1 for _ in range(ell))
    cones = [Cone.orthant(ell)]
    for j in range(ell):
        gens = [minus] + [basis[i] for i in range(ell) if i != j]
        cones.append(Cone.from_rays(ell, gens))
    return tuple(cones)


def _preimage_cone(p_matrix, tau: Cone, domain: Cone) -> Cone:
    """``P^{-1}(tau)`` intersected with the domain cone."""
    ell = domain.ambient_rank
    ineqs = list(domain.facet_normals)
    eqs = list(domain.span_equations)
    for m in tau.facet_normals:
        ineqs.append(tuple(dot(m, col) for col in _columns_t(p_matrix, ell)))
    for e in tau.span_equations:
        eqs.append(tuple(dot(e, col) for col in _columns_t(p_matrix, ell)))
    return Cone.from_inequalities(ell, ineqs, eqs)


def _columns_t(p_matrix, ell: int):
    # column i of P, viewed as the image of the i-th basis vector
    s = len(p_matrix)
    return [tuple(p_matrix[r][i] for r in range(s)) for i in range(ell)]


def _lifting_fan_over(w: WeightPackage, domain: Cone, target_fan: Fan) -> Fan:
    cones = []
    if w.cokernel_rank == 0:
        return build_fan(w.ell, [domain])
    for tau in target_fan.all_cones():
        pre = _preimage_cone(w.P, tau, domain)
        if pre.dim > 0:
            cones.append(pre)
    if not cones:
        cones = [Cone.zero(w.ell)]
    return generated_fan(w.ell, cones)


def lifting_fan(w: WeightPackage) -> tuple[Fan, IMat]:
    """Coarsest fan on the orthant making the projection a fan morphism.

    Returns the fan together with the matrix whose columns are the primitive
    generators of its rays (sorted lexicographically).
    """
    fan = _lifting_fan_over(w, Cone.orthant(w.ell), w.quotient_fan)
    q_matrix = linalg.transpose(fan.rays) if fan.rays else ()
    return fan, q_matrix


def chart_quotient_fan(w: WeightPackage, domain: Cone) -> Fan:
    """Fan generated by the images of the domain cone's faces under P."""
    s = w.cokernel_rank
    if s == 0:
        return build_fan(0, [Cone.zero(0)])
    from .polyhedra import faces as cone_faces
    images = []
    for level in cone_faces(domain):
        for f in level:
            gens = [linalg.mat_vec(_p_as_map(w), r) for r in f.rays]
            gens = [g for g in gens if not is_zero_vector(g)]
            if not gens:
                continue
            cone = Cone.from_rays(s, gens)
            if cone.is_strictly_convex and cone.dim > 0:
                images.append(cone)
    if not images:
        return build_fan(s, [Cone.zero(s)])
    return generated_fan(s, images)


def _p_as_map(w: WeightPackage):
    return w.P


def enhanced_lifting_fan(w: WeightPackage) -> Fan:
    """Union of the per-chart lifting fans, assembled as one object.

    Each chart fan is computed with the package's own projection over the
    corresponding maximal cone of the standard complete fan and is a genuine
    fan; the minimal per-chart subdivisions may however disagree along shared
    chart boundaries, so the union is validated as a complex with pairwise
    disjoint interiors.  True interior overlaps raise NotAFan and signal an
    invalid package.
    """
    pieces: list[Cone] = []
    for domain in projective_chart_cones(w.ell):
        target = chart_quotient_fan(w, domain)
        chart_fan = _lifting_fan_over(w, domain, target)
        pieces.extend(chart_fan.max_cone_objects)
    from .fans import build_cone_complex
    return build_cone_complex(w.ell, pieces)
