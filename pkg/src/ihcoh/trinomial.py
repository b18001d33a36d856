"""Intersection cohomology of trinomial hypersurfaces from exponent data.

A trinomial is three blocks of positive exponents; the affine pipeline
builds the weight matrix from the two-row relation matrix of the equation,
derives the invariant cone, the three lifted coefficient cones and the
exceptional face set, and evaluates the contraction-space and variety
Poincare polynomials.  The projective pipeline runs the same construction on
every coordinate chart through package enhancement and assembles the chart
data into complete fans before applying the global formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import linalg
from .errors import (
    InternalInconsistency,
    NonIntegralGenus,
    NotHomogeneous,
    NotRelevant,
)
from .fans import Fan, generated_fan
from .ihpoly import ONE, T, T2, GPolyCache, IntPolynomial, g_number, g_poly, h_poly
from .linalg import IMat, IVec, dot, is_zero_vector, primitive
from .polyhedra import Cone, faces
from .weightpkg import WeightPackage, build_weight_package


@dataclass(frozen=True)
class TrinomialData:
    """Exponent blocks of a trinomial, with the ambient space flag."""

    exponents: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    ambient: str  # "affine" | "projective"

    @staticmethod
    def make(exponents, ambient: str) -> "TrinomialData":
        blocks = tuple(tuple(int(n) for n in block) for block in exponents)
        if len(blocks) != 3 or any(not b for b in blocks):
            raise ValueError("need three non-empty exponent blocks")
        if any(n <= 0 for b in blocks for n in b):
            raise ValueError("exponents must be positive")
        if ambient not in ("affine", "projective"):
            raise ValueError("ambient must be 'affine' or 'projective'")
        data = TrinomialData(blocks, ambient)
        if ambient == "projective":
            sums = {sum(b) for b in blocks}
            if len(sums) != 1:
                raise NotHomogeneous(f"block degree sums differ: {sorted(sums)}")
            if any(len(b) < 2 for b in blocks):
                raise NotRelevant("every monomial needs at least two variables")
        return data

    @property
    def nvars(self) -> int:
        return sum(len(b) for b in self.exponents)


@dataclass(frozen=True)
class TrinomialInvariants:
    u: tuple[int, int, int]
    d: int
    d_i: tuple[int, int, int]
    u_total: int
    gamma: int
    genus: int


def trinomial_invariants(t: TrinomialData) -> TrinomialInvariants:
    """Block gcd data and the genus of the quotient curve."""
    u = tuple(gcd(*b) if len(b) > 1 else b[0] for b in t.exponents)
    d = gcd(*u)
    d_i = (
        gcd(u[1] // d, u[2] // d),
        gcd(u[0] // d, u[2] // d),
        gcd(u[0] // d, u[1] // d),
    )
    u_total = d * d_i[0] * d_i[1] * d_i[2]
    gamma = d * sum(d_i)
    twice = d * (u_total - sum(d_i))
    if twice % 2 != 0:
        raise NonIntegralGenus(f"genus numerator {twice} is odd")
    genus = twice // 2 + 1
    if genus < 0:
        raise NonIntegralGenus(f"negative genus {genus}")
    return TrinomialInvariants(u=u, d=d, d_i=d_i, u_total=u_total,
                               gamma=gamma, genus=genus)


def relation_matrix(exponents) -> IMat:
    """Two-row integer matrix whose kernel is the torus of the trinomial.

    Row one balances block 1 against block 2, row two block 1 against
    block 3.
    """
    b1, b2, b3 = exponents
    row1 = tuple(-n for n in b1) + tuple(b2) + (0,) * len(b3)
    row2 = tuple(-n for n in b1) + (0,) * len(b2) + tuple(b3)
    return (row1, row2)


def _variable_index(exponents, i: int, j: int) -> int:
    """Flat index of variable j of block i (both zero-based)."""
    offset = sum(len(b) for b in exponents[:i])
    return offset + j


def _validate_supplied(f, p_matrix, ell: int):
    f = tuple(tuple(int(x) for x in row) for row in f)
    if len(f) != ell or len(f[0]) != ell - 2:
        raise ValueError(f"weight matrix must be {ell} x {ell - 2}")
    prod = linalg.mat_mul(p_matrix, f)
    if any(any(x != 0 for x in row) for row in prod):
        raise ValueError("supplied weight matrix is not in the relation kernel")
    return f


def _kernel_weight_matrix(p_matrix, ell: int) -> IMat:
    basis = linalg.kernel_basis(p_matrix, ncols=ell)
    return linalg.transpose(basis)


def _canonical_section(f) -> IMat:
    return linalg.matrix_factorization(f).S


def weight_package_for(p_matrix, ell: int, f=None, s=None) -> WeightPackage:
    """Weight package over a given projection, with optional F and S.

    The projection is used verbatim (its image may be a proper sublattice);
    F defaults to a kernel basis of the projection and S to the canonical
    section.
    """
    if f is None:
        f = _kernel_weight_matrix(p_matrix, ell)
    else:
        f = _validate_supplied(f, p_matrix, ell)
    if s is None:
        s = _canonical_section(f)
    return build_weight_package(f, s, tuple(tuple(int(x) for x in row)
                                            for row in p_matrix))


# ---------------------------------------------------------------------------
# affine pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineTrinomialResult:
    invariants: TrinomialInvariants
    package: WeightPackage
    sigma_theta: Cone
    pi_cones: tuple[Cone, Cone, Cone]
    h_faces: tuple[Cone, ...]
    p_tilde: IntPolynomial
    p_x: IntPolynomial


def _lifted_cone(sigma: Cone, apex_points, rank: int) -> Cone:
    """Cone over the tail at height zero and the marked points at height one."""
    gens = [tuple(list(r) + [0]) for r in sigma.rays]
    for p in apex_points:
        gens.append(tuple(list(p) + [Fraction(1)]))
    return Cone.from_rays(rank + 1, gens)


def _block_markers(t: TrinomialData, inv: TrinomialInvariants, s_matrix,
                   skip: tuple[int, int] | None = None):
    """S-images of the scaled basis vectors, one list per block.

    Marker (i, j) is S applied to d / (d_i * n_ij) times the basis vector of
    that variable; ``skip`` omits one variable (the localized chart).
    """
    exps = t.exponents
    indices = [(i, j) for i in range(3) for j in range(len(exps[i]))]
    if skip is not None:
        indices = [ij for ij in indices if ij != skip]
    pos = {ij: k for k, ij in enumerate(indices)}
    nvar = len(indices)
    n_rows = len(s_matrix)
    markers: list[list[tuple[Fraction, ...]]] = [[], [], []]
    for (i, j) in indices:
        scale = Fraction(inv.d, inv.d_i[i] * exps[i][j])
        col = pos[(i, j)]
        vec = tuple(scale * s_matrix[r][col] for r in range(n_rows))
        markers[i].append(vec)
    return markers


def _face_set(sigma: Cone, markers) -> tuple[Cone, ...]:
    """Faces of the invariant cone meeting the set of triple marker sums."""
    sums = []
    for m1 in markers[0]:
        for m2 in markers[1]:
            for m3 in markers[2]:
                sums.append(tuple(a + b + c for a, b, c in zip(m1, m2, m3)))
    out = []
    for level in faces(sigma):
        for tau in level:
            if any(tau.contains_point(p) for p in sums):
                out.append(tau)
    return tuple(out)


def affine_trinomial_poincare(t: TrinomialData, f=None, s=None,
                              rule: str = "sum",
                              cache: GPolyCache | None = None) -> AffineTrinomialResult:
    """Contraction-space and variety Poincare polynomials, affine case."""
    if t.ambient != "affine":
        raise ValueError("expected affine exponent data")
    inv = trinomial_invariants(t)
    ell = t.nvars
    p_matrix = relation_matrix(t.exponents)
    w = weight_package_for(p_matrix, ell, f, s)
    sigma = w.sigma_theta
    markers = _block_markers(t, inv, w.S)
    pi_cones = tuple(_lifted_cone(sigma, markers[i], w.n) for i in range(3))
    du = inv.d * inv.u_total
    factor = T2 + (du - inv.gamma + 2) * T + (1 - inv.gamma) * ONE
    p_tilde = factor * g_poly(sigma, rule, cache)
    for i in range(3):
        p_tilde = p_tilde + (inv.d * inv.d_i[i]) * g_poly(pi_cones[i], rule, cache)
    h_faces = _face_set(sigma, markers)
    correction = IntPolynomial(())
    for tau in h_faces:
        coeff = g_number(tau, tau.dim - 1, rule, cache)
        if coeff:
            correction = correction + coeff * IntPolynomial.monomial(1, tau.dim + 1)
    if not correction.is_even() or any(c < 0 for c in correction.coeffs):
        raise InternalInconsistency(
            f"correction {correction} must be even and non-negative")
    return AffineTrinomialResult(
        invariants=inv,
        package=w,
        sigma_theta=sigma,
        pi_cones=pi_cones,
        h_faces=h_faces,
        p_tilde=p_tilde,
        p_x=p_tilde - correction,
    )


# ---------------------------------------------------------------------------
# projective pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectiveTrinomialResult:
    invariants: TrinomialInvariants
    chart_labels: tuple[tuple[int, int], ...]
    sigma_fan: Fan
    sigma_i_fans: tuple[Fan, Fan, Fan]
    h_sigma: IntPolynomial
    h_sigma_i: tuple[IntPolynomial, IntPolynomial, IntPolynomial]
    h_faces: tuple[Cone, ...]
    p_tilde: IntPolynomial
    p_x: IntPolynomial


def projective_space_poincare(k: int) -> IntPolynomial:
    """1 + t^2 + ... + t^(2k); zero polynomial for negative k."""
    if k < 0:
        return IntPolynomial(())
    coeffs = []
    for i in range(2 * k + 1):
        coeffs.append(1 if i % 2 == 0 else 0)
    return IntPolynomial.make(coeffs)


def _chart_projection(full_rows, skip_index: int) -> IMat:
    return tuple(tuple(x for i, x in enumerate(row) if i != skip_index)
                 for row in full_rows)


def projective_trinomial_poincare(t: TrinomialData, f=None, s=None,
                                  rule: str = "sum",
                                  cache: GPolyCache | None = None) -> ProjectiveTrinomialResult:
    """Contraction-space and variety Poincare polynomials, projective case.

    Builds every chart package from the full relation matrix by deleting one
    column, lifts the chart data into the complete fans entering the global
    formula, and subtracts one projective-space correction per exceptional
    face.  The supplied F and S (if any) belong to the chart of the first
    variable.
    """
    if t.ambient != "projective":
        raise ValueError("expected projective exponent data")
    inv = trinomial_invariants(t)
    nvars = t.nvars
    ell = nvars - 1
    n = ell - 2
    full_rows = relation_matrix(t.exponents)
    chart_labels = tuple((i, j) for i in range(3)
                         for j in range(len(t.exponents[i])))
    # base chart: first variable of the first block; the other charts come
    # from package enhancement, whose zero-sum padding regenerates the full
    # relation matrix (its rows already sum to zero by homogeneity)
    base_p = _chart_projection(full_rows, 0)
    base = weight_package_for(base_p, ell, f, s)
    from .weightpkg import enhance
    enhanced = enhance(base)
    charts: dict[tuple[int, int], WeightPackage] = {
        label: enhanced[k] for k, label in enumerate(chart_labels)
    }
    sigma_cones = {label: charts[label].sigma_theta for label in chart_labels}
    sigma_fan = generated_fan(n, list(sigma_cones.values()))
    down_cones = [_lifted_down_cone(sigma_cones[label]) for label in chart_labels]
    sigma_i_fans = []
    for i in range(3):
        lifted = []
        for k, label in enumerate(chart_labels):
            w = charts[label]
            markers = _block_markers(t, inv, w.S, skip=label)
            lifted.append(_lifted_cone(sigma_cones[label], markers[i], n))
        sigma_i_fans.append(generated_fan(n + 1, lifted + down_cones))
    sigma_i_fans = tuple(sigma_i_fans)
    h_sigma = h_poly(sigma_fan, rule, cache)
    h_sigma_i = tuple(h_poly(fz, rule, cache) for fz in sigma_i_fans)
    du = inv.d * inv.u_total
    factor = (1 - inv.gamma) * T2 + (du - inv.gamma + 2) * T \
        + (1 - inv.gamma) * ONE
    p_tilde = factor * h_sigma
    for i in range(3):
        p_tilde = p_tilde + (inv.d * inv.d_i[i]) * h_sigma_i[i]
    # exceptional faces, over all charts, deduplicated as cones
    h_faces: list[Cone] = []
    for label in chart_labels:
        w = charts[label]
        markers = _block_markers(t, inv, w.S, skip=label)
        for tau in _face_set(sigma_cones[label], markers):
            if tau not in h_faces:
                h_faces.append(tau)
    dim_x = ell - 1
    correction = IntPolynomial(())
    for tau in h_faces:
        coeff = g_number(tau, tau.dim - 1, rule, cache)
        if coeff:
            orbit = projective_space_poincare(dim_x - (tau.dim + 1))
            correction = correction \
                + coeff * IntPolynomial.monomial(1, tau.dim + 1) * orbit
    if not correction.is_even() or any(c < 0 for c in correction.coeffs):
        raise InternalInconsistency(
            f"correction {correction} must be even and non-negative")
    return ProjectiveTrinomialResult(
        invariants=inv,
        chart_labels=chart_labels,
        sigma_fan=sigma_fan,
        sigma_i_fans=sigma_i_fans,
        h_sigma=h_sigma,
        h_sigma_i=h_sigma_i,
        h_faces=tuple(h_faces),
        p_tilde=p_tilde,
        p_x=p_tilde - correction,
    )


def _lifted_down_cone(sigma: Cone) -> Cone:
    n = sigma.ambient_rank
    gens = [tuple(list(r) + [0]) for r in sigma.rays]
    gens.append(tuple([0] * n + [-1]))
    return Cone.from_rays(n + 1, gens)
