"""Polyhedral divisors and divisorial fans over curves.

Curves are abstract records (genus, completeness, labeled marked points).
A polyhedral divisor attaches a tail-cone polyhedron to finitely many marked
points; a divisorial fan is a compatible family of such divisors over open
subsets of one complete curve.  This module evaluates the degree, the
validity and completeness conditions, the g/h polynomials for divisors and
divisorial fans, the exceptional-face set with its star fans, and the
resulting intersection cohomology Poincare polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ihpoly, linalg, polyhedra
from .errors import (
    IhcohError,
    InternalInconsistency,
    InvalidDivisorialFan,
    NotComplete,
    SigmaZNotComplete,
    TailNotFullDim,
)
from .fans import Fan, build_fan, generated_fan, star_fan
from .ihpoly import ONE, T, T2, GPolyCache, IntPolynomial, g_number, g_poly, h_poly
from .polyhedra import (
    Cone,
    Polyhedron,
    cayley_cone,
    cone_intersection,
    faces,
    intersect_nonempty,
    is_face_of,
    minkowski_sum,
)


@dataclass(frozen=True)
class CurveData:
    """Abstract smooth curve: genus, completeness, punctures, marked points."""

    genus: int
    complete: bool
    punctures: int = 0
    point_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        if self.complete and self.punctures != 0:
            raise ValueError("a complete curve has no punctures")
        if len(set(self.point_labels)) != len(self.point_labels):
            raise ValueError("point labels must be distinct")


@dataclass(frozen=True)
class PolyhedralDivisor:
    """Tail cone plus point-indexed polyhedral coefficients over a curve.

    Unlisted marked points implicitly carry the tail cone itself.
    """

    curve: CurveData
    tail: Cone
    coefficients: tuple[tuple[str, Polyhedron], ...]

    @staticmethod
    def make(curve: CurveData, tail: Cone, coefficients=()) -> "PolyhedralDivisor":
        items = sorted(dict(coefficients).items())
        labels = set(curve.point_labels)
        for label, poly in items:
            if label not in labels:
                raise InvalidDivisorialFan(f"coefficient at undeclared point {label!r}")
            if poly.ambient_rank != tail.ambient_rank:
                raise InvalidDivisorialFan(f"coefficient at {label!r} has wrong rank")
            if poly.tail_cone() != tail:
                raise InvalidDivisorialFan(
                    f"coefficient at {label!r} does not have the divisor's tail cone")
        return PolyhedralDivisor(curve, tail, tuple(items))

    def coefficient(self, label: str) -> Polyhedron:
        for key, poly in self.coefficients:
            if key == label:
                return poly
        return trivial_coefficient(self.tail)

    def support(self) -> tuple[str, ...]:
        """Marked points whose coefficient differs from the tail cone."""
        triv = trivial_coefficient(self.tail)
        return tuple(label for label, poly in self.coefficients if poly != triv)


def trivial_coefficient(tail: Cone) -> Polyhedron:
    return Polyhedron.make(tail.ambient_rank, [(0,) * tail.ambient_rank], tail.rays)


def degree(d: PolyhedralDivisor) -> Polyhedron | None:
    """Minkowski sum of all coefficients over a complete curve; None otherwise.

    The infinitely many implicit coefficients contribute the tail cone, which
    is absorbed by the tails of the listed coefficients.
    """
    if not d.curve.complete:
        return None
    total = trivial_coefficient(d.tail)
    for _, poly in d.coefficients:
        total = minkowski_sum(total, poly)
    return total


# ---------------------------------------------------------------------------
# divisorial fans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DivisorRecord:
    """One member of a divisorial fan: a divisor with its open domain.

    ``domain_excludes`` lists the marked points of the complete curve removed
    from this divisor's domain; coefficients may only sit at domain points.
    """

    tail: Cone
    coefficients: tuple[tuple[str, Polyhedron], ...]
    domain_excludes: frozenset[str]


@dataclass(frozen=True)
class DivisorialFan:
    curve: CurveData
    records: tuple[DivisorRecord, ...]

    @staticmethod
    def make(curve: CurveData, records) -> "DivisorialFan":
        if not curve.complete:
            raise InvalidDivisorialFan("divisorial fans live over a complete curve")
        recs = []
        labels = set(curve.point_labels)
        for rec in records:
            tail, coeffs, excludes = rec
            excludes = frozenset(excludes)
            if not excludes <= labels:
                raise InvalidDivisorialFan("domain excludes undeclared points")
            items = sorted(dict(coeffs).items())
            for label, poly in items:
                if label not in labels:
                    raise InvalidDivisorialFan(
                        f"coefficient at undeclared point {label!r}")
                if label in excludes:
                    raise InvalidDivisorialFan(
                        f"coefficient at excluded point {label!r}")
                if poly.tail_cone() != tail:
                    raise InvalidDivisorialFan(
                        f"coefficient at {label!r} does not match the tail cone")
            recs.append(DivisorRecord(tail, tuple(items), excludes))
        return DivisorialFan(curve, tuple(recs))

    def divisor(self, index: int) -> PolyhedralDivisor:
        """The member divisor over its own (possibly open) curve."""
        rec = self.records[index]
        excludes = rec.domain_excludes
        open_curve = CurveData(
            genus=self.curve.genus,
            complete=not excludes,
            punctures=len(excludes),
            point_labels=tuple(l for l in self.curve.point_labels
                               if l not in excludes),
        )
        return PolyhedralDivisor(open_curve, rec.tail, rec.coefficients)

    def slice_at(self, index: int, label: str) -> Polyhedron | None:
        """Coefficient of member ``index`` at a point, None outside its domain."""
        rec = self.records[index]
        if label in rec.domain_excludes:
            return None
        for key, poly in rec.coefficients:
            if key == label:
                return poly
        return trivial_coefficient(rec.tail)


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    complete_variety: bool
    violations: tuple[str, ...] = ()


def tail_fan(e: DivisorialFan) -> Fan:
    """Fan generated by the tail cones of the members."""
    return generated_fan(e.records[0].tail.ambient_rank,
                         [rec.tail for rec in e.records])


def _is_common_face(meet, a: Polyhedron, b: Polyhedron) -> bool:
    """Whether the polyhedron ``meet`` is a face of both operands.

    Faces of tail-cone polyhedra correspond to faces of their homogenization
    cones, so the test reduces to cone face tests.
    """
    return (is_face_of(meet.homogenization(), a.homogenization())
            and is_face_of(meet.homogenization(), b.homogenization()))


def _polyhedron_intersection(a: Polyhedron, b: Polyhedron) -> Polyhedron | None:
    ineqs_a, eqs_a = a.hrep()
    ineqs_b, eqs_b = b.hrep()
    return polyhedra.from_hrep(a.ambient_rank, ineqs_a + ineqs_b, eqs_a + eqs_b)


def _degree_of_intersection(e: DivisorialFan, i: int, j: int) -> Polyhedron | None:
    """Degree of the component-wise intersection divisor, None when empty.

    The intersection divisor lives over the intersection of the two domains:
    its degree is empty unless both domains are the whole curve, and a single
    empty coefficient slice empties the whole Minkowski sum.
    """
    ri, rj = e.records[i], e.records[j]
    if ri.domain_excludes or rj.domain_excludes:
        return None
    meet_tail = cone_intersection(ri.tail, rj.tail)
    total = trivial_coefficient(meet_tail)
    labels = {label for label, _ in ri.coefficients}
    labels |= {label for label, _ in rj.coefficients}
    for label in sorted(labels):
        a = e.slice_at(i, label)
        b = e.slice_at(j, label)
        meet = _polyhedron_intersection(a, b)
        if meet is None:
            return None
        total = minkowski_sum(total, meet)
    return total


def validate_divfan(e: DivisorialFan) -> ValidationReport:
    """Check the pairwise slice-face and degree conditions, plus completeness.

    Returns structured violations instead of raising.  ``complete_variety``
    reports whether the slices cover the whole space over every point, which
    is checked through completeness of the per-point tail-and-slice fans.
    """
    violations: list[str] = []
    n = len(e.records)
    rank = e.records[0].tail.ambient_rank if e.records else 0
    for i in range(n):
        for j in range(i + 1, n):
            for label in e.curve.point_labels:
                a = e.slice_at(i, label)
                b = e.slice_at(j, label)
                if a is None or b is None:
                    continue
                meet = _polyhedron_intersection(a, b)
                if meet is None:
                    continue
                if not _is_common_face(meet, a, b):
                    violations.append(
                        f"slices of members {i} and {j} at {label!r} overlap "
                        f"without being a common face")
            deg_meet = _degree_of_intersection(e, i, j)
            tail_meet = cone_intersection(e.records[i].tail, e.records[j].tail)
            for k in (i, j):
                deg_k = degree(e.divisor(k))
                rhs = None
                if deg_k is not None:
                    rhs = _polyhedron_intersection(
                        deg_k, trivial_coefficient(tail_meet))
                if (deg_meet is None) != (rhs is None):
                    violations.append(
                        f"degree condition fails for members {i}, {j} "
                        f"against member {k} (emptiness)")
                elif deg_meet is not None and deg_meet != rhs:
                    violations.append(
                        f"degree condition fails for members {i}, {j} "
                        f"against member {k}")
    complete = True
    try:
        if not tail_fan(e).is_complete:
            complete = False
        else:
            for label in e.curve.point_labels:
                if not _sigma_z_fan(e, label).is_complete:
                    complete = False
                    break
    except IhcohError:
        complete = False
    return ValidationReport(valid=not violations,
                            complete_variety=complete,
                            violations=tuple(violations))


# ---------------------------------------------------------------------------
# g and h polynomials
# ---------------------------------------------------------------------------

def g_divisor(d: PolyhedralDivisor, rule: str = "sum",
              cache: GPolyCache | None = None) -> IntPolynomial:
    """Poincare polynomial of the contraction space of an affine member.

    Complete curve: (t^2 + 2g t + 1 - a) g(tail) plus the sum of the Cayley
    cone g-polynomials over the supporting points (a of them).  Open curve
    with b punctures: the quadratic factor degrades to (2g + b - 1) t + 1 - a.
    """
    support = d.support()
    a = len(support)
    genus = d.curve.genus
    g_tail = g_poly(d.tail, rule, cache)
    if d.curve.complete:
        factor = T2 + (2 * genus) * T + (1 - a) * ONE
    else:
        factor = (2 * genus + d.curve.punctures - 1) * T + (1 - a) * ONE
    total = factor * g_tail
    for label in support:
        cay = cayley_cone(d.coefficient(label))
        total = total + g_poly(cay, rule, cache)
    return total


def _downward_cone(tail: Cone) -> Cone:
    """Cone over the tail at heights zero and minus one."""
    n = tail.ambient_rank
    gens = [tuple(list(r) + [0]) for r in tail.rays]
    gens.append(tuple([0] * n + [-1]))
    return Cone.from_rays(n + 1, gens)


def _sigma_z_fan(e: DivisorialFan, label: str) -> Fan:
    """Complete fan of Cayley cones of the slices plus the downward cones."""
    rank = e.records[0].tail.ambient_rank
    cones = []
    for i, rec in enumerate(e.records):
        slice_poly = e.slice_at(i, label)
        if slice_poly is not None:
            cones.append(cayley_cone(slice_poly))
        cones.append(_downward_cone(rec.tail))
    return generated_fan(rank + 1, cones)


def fan_support_points(e: DivisorialFan) -> tuple[str, ...]:
    """Points where some member has a nontrivial coefficient."""
    out = []
    for label in e.curve.point_labels:
        for i, rec in enumerate(e.records):
            s = e.slice_at(i, label)
            if s is not None and s != trivial_coefficient(rec.tail):
                out.append(label)
                break
    return tuple(out)


def h_divfan(e: DivisorialFan, contraction: bool = True, rule: str = "sum",
             cache: GPolyCache | None = None) -> IntPolynomial:
    """Poincare polynomial of the contraction space of the divisorial fan.

    ``contraction=True`` treats the input as the divisorial fan of the
    variety and evaluates the formula for its contraction space directly;
    with ``contraction=False`` the input is taken to already be a contraction
    divisorial fan.  Restricting domains to affine pieces changes neither the
    per-point fans nor the tail fan, so both paths evaluate identically.
    """
    report = validate_divfan(e)
    if not report.valid:
        raise InvalidDivisorialFan("; ".join(report.violations))
    if not report.complete_variety:
        raise NotComplete("divisorial fan does not describe a complete variety")
    support = fan_support_points(e)
    c = len(support)
    genus = e.curve.genus
    sigma_fan = tail_fan(e)
    total = ((1 - c) * T2 + (2 * genus) * T + (1 - c) * ONE) \
        * h_poly(sigma_fan, rule, cache)
    for label in support:
        fz = _sigma_z_fan(e, label)
        if not fz.is_complete:
            raise SigmaZNotComplete(f"per-point fan at {label!r} is not complete")
        total = total + h_poly(fz, rule, cache)
    return total


# ---------------------------------------------------------------------------
# exceptional faces, stars, Poincare polynomials
# ---------------------------------------------------------------------------

def hf_set(e: DivisorialFan, rule: str = "sum") -> tuple[tuple[Cone, Fan], ...]:
    """Cones of the tail fan meeting the degree, with their star fans.

    Each returned cone indexes an orbit in the image of the exceptional locus;
    the star fan (quotient by the cone's span, over the member cones of the
    set itself) describes the normalization of the orbit closure.
    """
    report = validate_divfan(e)
    if not report.valid:
        raise InvalidDivisorialFan("; ".join(report.violations))
    degrees = [deg for deg in (degree(e.divisor(i)) for i in range(len(e.records)))
               if deg is not None]
    members = []
    for tau in tail_fan(e).all_cones():
        if tau.dim == 0:
            hit = any(deg.contains_point((0,) * deg.ambient_rank) for deg in degrees)
        else:
            hit = any(intersect_nonempty(tau, deg)[0] for deg in degrees)
        if hit:
            members.append(tau)
    out = []
    for tau in members:
        out.append((tau, star_fan(members, tau)))
    return tuple(out)


def _correction_terms(pairs, rule: str, cache, use_g_of_max_cone: bool,
                      orbit_poly=None) -> IntPolynomial:
    """Sum of g-number-weighted orbit-closure polynomials over the face set."""
    total = ihpoly.ZERO
    for tau, star in pairs:
        coeff = g_number(tau, tau.dim - 1, rule, cache)
        if coeff == 0:
            continue
        if orbit_poly is not None:
            orbit = orbit_poly(tau, star)
        elif use_g_of_max_cone:
            top = max(star.all_cones(), key=lambda c: c.dim)
            orbit = g_poly(top, rule, cache)
        else:
            orbit = h_poly(star, rule, cache)
        total = total + coeff * IntPolynomial.monomial(1, tau.dim + 1) * orbit
    return total


def _check_even_nonneg(p: IntPolynomial, what: str) -> None:
    if not p.is_even() or any(c < 0 for c in p.coeffs):
        raise InternalInconsistency(
            f"{what} must be even with non-negative coefficients, got {p}")


def poincare_complete(e: DivisorialFan, rule: str = "sum",
                      cache: GPolyCache | None = None) -> IntPolynomial:
    """Intersection cohomology Poincare polynomial of the complete variety.

    Subtracts from the contraction-space polynomial one correction per
    exceptional face: its g-number times t^(dim + 1) times the h-polynomial
    of its star fan.  The total correction is asserted even with non-negative
    coefficients.
    """
    h_tilde = h_divfan(e, True, rule, cache)
    pairs = hf_set(e, rule)
    correction = _correction_terms(pairs, rule, cache, use_g_of_max_cone=False)
    _check_even_nonneg(correction, "exceptional-locus correction")
    return h_tilde - correction


def poincare_affine(d: PolyhedralDivisor, rule: str = "sum",
                    cache: GPolyCache | None = None) -> IntPolynomial:
    """Poincare polynomial of the affine variety with attractive fixed point.

    Requires a full-dimensional tail; over a non-complete curve the variety
    agrees with its contraction space and the g-polynomial is returned
    directly.  Star contributions use the g-polynomial of the image of the
    tail cone, the unique maximal cone of the star fan.
    """
    if d.tail.dim != d.tail.ambient_rank:
        raise TailNotFullDim("the tail cone must be full-dimensional")
    g_d = g_divisor(d, rule, cache)
    if not d.curve.complete:
        return g_d
    deg = degree(d)
    members = []
    for level in faces(d.tail):
        for tau in level:
            if tau.dim == 0:
                hit = deg.contains_point((0,) * deg.ambient_rank)
            else:
                hit = intersect_nonempty(tau, deg)[0]
            if hit:
                members.append(tau)
    pairs = []
    for tau in members:
        pairs.append((tau, star_fan([d.tail], tau)))
    correction = _correction_terms(pairs, rule, cache, use_g_of_max_cone=True)
    _check_even_nonneg(correction, "exceptional-locus correction")
    return g_d - correction


def is_rational(obj) -> bool:
    """Rationality of the variety: the quotient curve has genus zero."""
    return obj.curve.genus == 0
