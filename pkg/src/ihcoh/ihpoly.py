"""Integer polynomials and the g/h double recursion for cones and fans.

Polynomials are stored in the plain variable t (ascending coefficients); the
local and global invariants produced here are even in t, which is asserted,
but downstream formulas over curves introduce genuinely odd terms.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .errors import DepthExceeded, InternalInconsistency, NotComplete, NotStrictlyConvex
from .fans import Fan, TrivialLowDim, normal_fan_of_cone
from .polyhedra import Cone

MAX_RECURSION_RANK = 16


@dataclass(frozen=True)
class IntPolynomial:
    """Univariate integer polynomial, coefficient of t^k at index k."""

    coeffs: tuple[int, ...]

    @staticmethod
    def make(coeffs) -> "IntPolynomial":
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return IntPolynomial(tuple(cs))

    @staticmethod
    def monomial(coeff: int, power: int) -> "IntPolynomial":
        if coeff == 0:
            return ZERO
        return IntPolynomial((0,) * power + (coeff,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial.make(
            [self.coefficient(i) + other.coefficient(i) for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial.make(
            [self.coefficient(i) - other.coefficient(i) for i in range(n)])

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial.make([other * c for c in self.coeffs])
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial.make(out)

    __rmul__ = __mul__

    def __neg__(self):
        return IntPolynomial.make([-c for c in self.coeffs])

    def evaluate(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def is_palindromic(self, degree: int) -> bool:
        """Coefficient symmetry c_k = c_(degree-k) up to the given degree."""
        return all(self.coefficient(k) == self.coefficient(degree - k)
                   for k in range(degree + 1))

    def even_part_coefficients(self) -> tuple[int, ...]:
        return self.coeffs[0::2]

    def odd_part_coefficients(self) -> tuple[int, ...]:
        return self.coeffs[1::2]

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                head = "" if c == 1 else ("-" if c == -1 else str(c))
                var = "t" if k == 1 else f"t^{k}"
                terms.append(f"{head}{var}")
        out = " + ".join(terms)
        return out.replace("+ -", "- ")


ZERO = IntPolynomial(())
ONE = IntPolynomial((1,))
T = IntPolynomial((0, 1))
T2 = IntPolynomial((0, 0, 1))
ONE_MINUS_T2 = IntPolynomial((1, 0, -1))
T2_MINUS_ONE = IntPolynomial((-1, 0, 1))


def truncate(p: IntPolynomial, d: int) -> IntPolynomial:
    """Drop coefficients above degree d; d = -1 yields the zero polynomial."""
    if d < -1:
        raise ValueError("truncation degree must be >= -1")
    return IntPolynomial.make(p.coeffs[:d + 1])


class GPolyCache:
    """Optional thread-safe memo for g-polynomials.

    Keys are the canonicalized generator data of the cone plus the
    cross-section rule; insertion is atomic (insert-if-absent).
    """

    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            return self._data.get(key)

    def put(self, key, value):
        with self._lock:
            self._data.setdefault(key, value)


def g_poly(sigma: Cone, rule: str = "sum",
           cache: GPolyCache | None = None) -> IntPolynomial:
    """Local intersection cohomology polynomial of a strictly convex cone.

    Even in t, constant term 1, degree at most dim - 2 (just 1 when the
    dimension is at most two); computed by the truncated recursion through
    the normal fan of the dual cross-section polytope.
    """
    if not sigma.is_strictly_convex:
        raise NotStrictlyConvex("g-polynomial needs a strictly convex cone")
    if sigma.dim > MAX_RECURSION_RANK:
        raise DepthExceeded(f"cone dimension {sigma.dim} exceeds the recursion guard")
    if sigma.dim <= 2:
        return ONE
    key = (sigma.ambient_rank, sigma.rays, rule)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    star = normal_fan_of_cone(sigma, rule)
    h = h_poly(star, rule, cache)
    g = truncate(ONE_MINUS_T2 * h, sigma.dim - 1)
    if not g.is_even():
        raise InternalInconsistency(f"odd g-polynomial computed for {sigma}")
    if cache is not None:
        cache.put(key, g)
    return g


def h_poly(fan: Fan, rule: str = "sum",
           cache: GPolyCache | None = None) -> IntPolynomial:
    """Global intersection cohomology polynomial of a complete fan.

    Sums (t^2 - 1)^(n - dim) g over every cone of the fan; even, palindromic
    of degree 2n, constant term 1.
    """
    if fan is TrivialLowDim:
        raise TypeError("expected a Fan, got the TrivialLowDim marker")
    if not fan.is_complete:
        raise NotComplete("h-polynomial is defined for complete fans only")
    n = fan.ambient_rank
    total = ZERO
    power_cache: dict[int, IntPolynomial] = {}

    def power(k: int) -> IntPolynomial:
        if k not in power_cache:
            power_cache[k] = power(k - 1) * T2_MINUS_ONE if k else ONE
        return power_cache[k]

    for cone in fan.all_cones():
        total = total + power(n - cone.dim) * g_poly(cone, rule, cache)
    if not total.is_even():
        raise InternalInconsistency("odd h-polynomial computed")
    return total


def g_number(sigma: Cone, j: int, rule: str = "sum",
             cache: GPolyCache | None = None) -> int:
    """Coefficient of t^j in the g-polynomial; zero for odd or negative j."""
    if j < 0 or j % 2 == 1:
        return 0
    return g_poly(sigma, rule, cache).coefficient(j)
