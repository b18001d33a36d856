"""Exact integer/rational linear algebra.

Vectors are tuples of ``int`` or ``Fraction``; matrices are tuples of row
tuples.  Everything is exact: no floating point enters any computation in this
package.  The lattice routines (Smith normal form, saturated kernels, basis
completion) are the backbone of the cone/fan quotients and of weight-package
factorizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .errors import NotInjective, NotSaturated, SuppliedSectionInvalid, ZeroVector

IVec = tuple[int, ...]
QVec = tuple[Fraction, ...]
IMat = tuple[IVec, ...]


# ---------------------------------------------------------------------------
# vector helpers
# ---------------------------------------------------------------------------

def dot(u, v):
    return sum(a * b for a, b in zip(u, v, strict=True))


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vscale(c, v):
    return tuple(c * x for x in v)


def is_zero_vector(v) -> bool:
    return all(x == 0 for x in v)


def primitive(v) -> IVec:
    """Clear denominators and divide by the gcd, preserving direction.

    Accepts integer or rational entries; the result is an integer vector that
    spans the same ray as ``v``.
    """
    if is_zero_vector(v):
        raise ZeroVector(f"cannot primitivize the zero vector of length {len(v)}")
    fracs = [Fraction(x) for x in v]
    denom = lcm(*(f.denominator for f in fracs)) if fracs else 1
    ints = [int(f * denom) for f in fracs]
    g = gcd(*ints)
    return tuple(x // g for x in ints)


def as_fraction_vector(v) -> QVec:
    return tuple(Fraction(x) for x in v)


# ---------------------------------------------------------------------------
# matrix helpers
# ---------------------------------------------------------------------------

def identity_matrix(n: int) -> IMat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zero_matrix(rows: int, cols: int) -> IMat:
    return tuple((0,) * cols for _ in range(rows))


def transpose(m):
    return tuple(zip(*m)) if m else ()


def mat_vec(m, v):
    return tuple(dot(row, v) for row in m)


def mat_mul(a, b):
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def mat_rank(m) -> int:
    """Rank over the rationals via fraction-free Gaussian elimination."""
    rows = [list(map(Fraction, row)) for row in m if not is_zero_vector(row)]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / pr[c]
                rows[r] = [x - f * y for x, y in zip(rows[r], pr)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def independent_row_indices(m, target: int | None = None) -> list[int]:
    """Indices of a maximal (or first ``target``) set of independent rows."""
    chosen: list[int] = []
    basis: list[list[Fraction]] = []
    for i, row in enumerate(m):
        cand = list(map(Fraction, row))
        for b in basis:
            pc = next(j for j, x in enumerate(b) if x != 0)
            if cand[pc] != 0:
                f = cand[pc] / b[pc]
                cand = [x - f * y for x, y in zip(cand, b)]
        if any(x != 0 for x in cand):
            basis.append(cand)
            chosen.append(i)
            if target is not None and len(chosen) == target:
                break
    return chosen


def solve_rational(m, b):
    """One rational solution x of ``m @ x = b``, or None if inconsistent."""
    rows = [list(map(Fraction, row)) + [Fraction(x)] for row, x in zip(m, b, strict=True)]
    ncols = len(m[0]) if m else 0
    pivots: list[tuple[int, int]] = []
    rank = 0
    for c in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / pr[c]
                rows[r] = [x - f * y for x, y in zip(rows[r], pr)]
        pivots.append((rank, c))
        rank += 1
    for r in range(rank, len(rows)):
        if rows[r][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for r, c in pivots:
        x[c] = rows[r][ncols] / rows[r][c]
    return tuple(x)


def determinant(m) -> Fraction:
    """Exact determinant (Gaussian elimination over Q); square input."""
    n = len(m)
    rows = [list(map(Fraction, row)) for row in m]
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        det *= rows[c][c]
        for r in range(c + 1, n):
            if rows[r][c] != 0:
                f = rows[r][c] / rows[c][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return det


def invert_matrix(m) -> tuple[QVec, ...]:
    """Exact inverse of a square rational matrix (Gauss-Jordan)."""
    n = len(m)
    rows = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(m)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        rows[c], rows[pivot] = rows[pivot], rows[c]
        pr = rows[c]
        inv = Fraction(1) / pr[c]
        rows[c] = [x * inv for x in pr]
        for r in range(n):
            if r != c and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return tuple(tuple(row[n:]) for row in rows)


# ---------------------------------------------------------------------------
# Smith normal form and lattice routines
# ---------------------------------------------------------------------------

def smith_normal_form(m) -> tuple[IMat, IMat, IMat]:
    """Smith normal form ``U @ M @ V = D`` with unimodular U, V.

    D is diagonal with non-negative entries satisfying the divisibility chain
    d1 | d2 | ... ; total on integer matrices.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    d = [list(row) for row in m]
    u = [list(r) for r in identity_matrix(rows)]
    v = [list(r) for r in identity_matrix(cols)]

    def row_op(i, j, a, b, c, e):
        # rows i,j <- (a*ri + b*rj, c*ri + e*rj); same on U
        for mat in (d, u):
            ri, rj = mat[i], mat[j]
            mat[i] = [a * x + b * y for x, y in zip(ri, rj)]
            mat[j] = [c * x + e * y for x, y in zip(ri, rj)]

    def col_op(i, j, a, b, c, e):
        for mat in (d, v):
            for row in mat:
                x, y = row[i], row[j]
                row[i] = a * x + b * y
                row[j] = c * x + e * y

    def bezout(p, q):
        # returns (g, a, b) with a*p + b*q = g
        old_r, r = p, q
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r != 0:
            quot = old_r // r
            old_r, r = r, old_r - quot * r
            old_s, s = s, old_s - quot * s
            old_t, t = t, old_t - quot * t
        return old_r, old_s, old_t

    k = 0
    while k < min(rows, cols):
        # find a nonzero pivot in the remaining block
        pivot = next(((i, j) for i in range(k, rows) for j in range(k, cols)
                      if d[i][j] != 0), None)
        if pivot is None:
            break
        pi, pj = pivot
        if pi != k:
            row_op(k, pi, 0, 1, 1, 0)
        if pj != k:
            col_op(k, pj, 0, 1, 1, 0)
        while True:
            # clear column k with unimodular row ops; divisible entries get a
            # plain subtraction so the pivot row is left untouched
            for i in range(k + 1, rows):
                x = d[i][k]
                if x != 0:
                    pv = d[k][k]
                    if x % pv == 0:
                        row_op(k, i, 1, 0, -(x // pv), 1)
                    else:
                        g, a, b = bezout(pv, x)
                        row_op(k, i, a, b, -(x // g), pv // g)
            # clear row k with unimodular column ops
            for j in range(k + 1, cols):
                x = d[k][j]
                if x != 0:
                    pv = d[k][k]
                    if x % pv == 0:
                        col_op(k, j, 1, 0, -(x // pv), 1)
                    else:
                        g, a, b = bezout(pv, x)
                        col_op(k, j, a, b, -(x // g), pv // g)
            if all(d[i][k] == 0 for i in range(k + 1, rows)):
                break
        # enforce divisibility d[k][k] | d[i][j] for the remaining block
        fixed = True
        for i in range(k + 1, rows):
            for j in range(k + 1, cols):
                if d[i][j] % d[k][k] != 0:
                    # fold the offending row into row k and restart the pivot
                    row_op(k, i, 1, 1, 0, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            if d[k][k] < 0:
                d[k] = [-x for x in d[k]]
                u[k] = [-x for x in u[k]]
            k += 1
    return (tuple(map(tuple, u)), tuple(map(tuple, d)), tuple(map(tuple, v)))


def elementary_divisors(m) -> tuple[int, ...]:
    """Nonzero diagonal entries of the Smith normal form, in chain order."""
    _, d, _ = smith_normal_form(m)
    diag = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]
    return tuple(x for x in diag if x != 0)


def kernel_basis(m, ncols: int | None = None) -> tuple[IVec, ...]:
    """Saturated integer basis of ``{x : M @ x = 0}``.

    ``ncols`` must be given when ``m`` has no rows.
    """
    if not m:
        if ncols is None:
            raise ValueError("ncols required for empty matrix")
        return tuple(identity_matrix(ncols))
    cols = len(m[0])
    _, d, v = smith_normal_form(m)
    rank = len(elementary_divisors(m))
    # columns rank..cols-1 of V span the kernel lattice
    vt = transpose(v)
    return tuple(vt[j] for j in range(rank, cols))


def complete_to_basis(vectors: tuple[IVec, ...], n: int) -> tuple[IVec, ...]:
    """Complement vectors extending a saturated family to a basis of Z^n.

    ``vectors`` must be linearly independent and span a saturated sublattice.
    """
    if not vectors:
        return tuple(identity_matrix(n))
    # SNF of the matrix with the given vectors as columns: B = U^-1 D V^-1,
    # so the last n - k columns of U^-1 complement the family.
    b = transpose(vectors)
    u, d, _ = smith_normal_form(b)
    k = len(vectors)
    divisors = [d[i][i] for i in range(k)]
    if any(abs(x) != 1 for x in divisors):
        raise ValueError("family does not span a saturated sublattice")
    uinv = invert_matrix(u)
    cols = transpose(uinv)
    return tuple(tuple(int(x) for x in cols[j]) for j in range(k, n))


def lattice_quotient_map(sublattice_basis: tuple[IVec, ...], n: int) -> IMat:
    """Matrix of the projection Z^n -> Z^n / (saturated sublattice).

    The quotient is identified with Z^(n-k) via a Smith-normal-form change of
    basis; the returned matrix has n - k rows.
    """
    k = len(sublattice_basis)
    if k == 0:
        return identity_matrix(n)
    b = transpose(sublattice_basis)
    u, d, _ = smith_normal_form(b)
    if any(abs(d[i][i]) != 1 for i in range(k)):
        raise ValueError("sublattice is not saturated")
    # U maps the sublattice onto the first k coordinates; drop them.
    return tuple(u[i] for i in range(k, n))


# ---------------------------------------------------------------------------
# matrix factorization of weight matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatrixFactorization:
    """Splitting data of an injective saturated integer matrix F (ell x n).

    S (n x ell) satisfies S @ F = identity; P (s x ell, s = ell - n) has
    P @ F = 0 and its rows project onto the cokernel lattice.
    """

    F: IMat
    S: IMat
    P: IMat
    saturated: bool

    @property
    def ell(self) -> int:
        return len(self.F)

    @property
    def n(self) -> int:
        return len(self.F[0]) if self.F and self.F[0] else 0


def matrix_factorization(f, s=None, p=None) -> MatrixFactorization:
    """Factor an injective saturated integer matrix, or verify a supplied pair.

    Without ``s``/``p`` a deterministic section and cokernel projection are
    computed from the Smith normal form.  With them, the identities
    ``S @ F = id`` and ``P @ F = 0`` (plus surjectivity of P onto its target)
    are checked and the supplied matrices are used verbatim.
    """
    f = tuple(tuple(int(x) for x in row) for row in f)
    ell = len(f)
    n = len(f[0]) if f else 0
    if mat_rank(f) < n:
        raise NotInjective(f"matrix has rank < {n}")
    divisors = elementary_divisors(f)
    saturated = all(x == 1 for x in divisors)
    if not saturated:
        raise NotSaturated(f"elementary divisors {divisors} are not all 1")
    if s is not None or p is not None:
        if s is None or p is None:
            raise SuppliedSectionInvalid("supply both S and P or neither")
        s = tuple(tuple(int(x) for x in row) for row in s)
        p = tuple(tuple(int(x) for x in row) for row in p)
        if mat_mul(s, f) != identity_matrix(n):
            raise SuppliedSectionInvalid("S @ F is not the identity")
        if any(any(x != 0 for x in row) for row in mat_mul(p, f)):
            raise SuppliedSectionInvalid("P @ F is not zero")
        if len(p) != ell - n or mat_rank(p) != ell - n:
            raise SuppliedSectionInvalid(
                f"P must have full rank {ell - n} rows spanning the cokernel")
        return MatrixFactorization(F=f, S=s, P=p, saturated=True)
    u, d, v = smith_normal_form(f)
    # F = U^-1 D V^-1 with D = (I_n | 0)^T, so S = V (I_n | 0) U works.
    signs = tuple(d[i][i] for i in range(n))  # all 1 after SNF normalization
    iu = tuple(tuple(int(u[i][j]) // signs[i] for j in range(ell)) for i in range(n))
    s_canon = mat_mul(v, iu)
    p_canon = tuple(u[n:]) if ell > n else ()
    return MatrixFactorization(F=f, S=s_canon, P=p_canon, saturated=True)
