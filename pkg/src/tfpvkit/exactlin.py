"""Exact rational linear algebra.

Rank and kernels use fraction-free (Bareiss) elimination on an integer
scaling of the input. The characteristic polynomial is computed with the
Faddeev-LeVerrier recurrence, which only divides by step indices and so also
works for matrices with polynomial entries. Extreme rays of
``ker(N) ∩ R^m_{>=0}`` come from the double description method.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import List, Optional, Sequence, Tuple

from .errors import DegenerateConstantTerm, SizeLimit
from .poly import Poly, det as laplace_det

MAX_RAY_COLUMNS = 24


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RationalMatrix:
    """Immutable dense matrix of :class:`fractions.Fraction` entries."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence], ncols: Optional[int] = None):
        self._rows = tuple(tuple(_frac(x) for x in r) for r in rows)
        self.nrows = len(self._rows)
        if self.nrows:
            self.ncols = len(self._rows[0])
            if any(len(r) != self.ncols for r in self._rows):
                raise ValueError("ragged matrix")
        else:
            self.ncols = ncols or 0

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "RationalMatrix":
        if not columns:
            return cls.zeros(nrows, 0)
        return cls([[col[i] for col in columns] for i in range(nrows)])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self):
        return self._rows

    def row(self, i: int):
        return self._rows[i]

    def col(self, j: int):
        return tuple(r[j] for r in self._rows)

    def columns(self):
        return [self.col(j) for j in range(self.ncols)]

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix([self.col(j) for j in range(self.ncols)], ncols=self.nrows)

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return RationalMatrix(
                [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self._rows],
                ncols=other.ncols,
            )
        vec = [_frac(v) for v in other]
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(sum((a * b for a, b in zip(r, vec)), Fraction(0)) for r in self._rows)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)], self.ncols)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)], self.ncols)

    def scale(self, c) -> "RationalMatrix":
        c = _frac(c)
        return RationalMatrix([[c * a for a in r] for r in self._rows], self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix([[self._rows[i][j] for j in cols] for i in rows], ncols=len(cols))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def trace(self) -> Fraction:
        return sum((self._rows[i][i] for i in range(min(self.shape))), Fraction(0))

    def tolist(self) -> List[List[Fraction]]:
        return [list(r) for r in self._rows]

    def __eq__(self, other):
        if isinstance(other, RationalMatrix):
            return self.shape == other.shape and self._rows == other._rows
        try:
            return self._rows == RationalMatrix(other)._rows
        except (TypeError, ValueError):
            return False

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self._rows)
        return f"RationalMatrix[{self.nrows}x{self.ncols}]({body})"


def as_matrix(M) -> RationalMatrix:
    return M if isinstance(M, RationalMatrix) else RationalMatrix(M)


# --------------------------------------------------------------------------
# elimination


def _integer_rows(M: RationalMatrix) -> List[List[int]]:
    """Scale each row by the lcm of its denominators (kernel is unchanged)."""
    out = []
    for r in M.rows:
        L = 1
        for x in r:
            L = lcm(L, x.denominator)
        out.append([int(x * L) for x in r])
    return out


def bareiss_echelon(rows: List[List[int]]) -> Tuple[List[List[int]], List[int], int]:
    """Fraction-free row echelon form of an integer matrix.

    Returns the echelon rows, the pivot columns and the number of row swaps.
    Every division performed is exact.
    """
    A = [list(r) for r in rows]
    nr = len(A)
    nc = len(A[0]) if A else 0
    prev = 1
    r = 0
    swaps = 0
    pivots: List[int] = []
    for c in range(nc):
        if r == nr:
            break
        p = next((i for i in range(r, nr) if A[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            A[r], A[p] = A[p], A[r]
            swaps += 1
        piv = A[r][c]
        for i in range(r + 1, nr):
            a_ic = A[i][c]
            row_i = A[i]
            row_r = A[r]
            for j in range(c + 1, nc):
                row_i[j] = (piv * row_i[j] - a_ic * row_r[j]) // prev
            row_i[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return A, pivots, swaps


def rank(M) -> int:
    M = as_matrix(M)
    if M.nrows == 0 or M.ncols == 0:
        return 0
    _, pivots, _ = bareiss_echelon(_integer_rows(M))
    return len(pivots)


def primitive(vec: Sequence) -> Tuple[int, ...]:
    """Scale a rational vector to coprime integers, preserving sign."""
    vec = [_frac(x) for x in vec]
    L = 1
    for x in vec:
        L = lcm(L, x.denominator)
    ints = [int(x * L) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def kernel_basis(M) -> List[Tuple[Fraction, ...]]:
    """Basis of the right kernel, one vector per free column.

    Each vector has entry 1 at its free column and 0 at the other free
    columns before being scaled to primitive integers, so the basis is
    deterministic.
    """
    M = as_matrix(M)
    n = M.ncols
    if M.nrows == 0:
        return [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    E, pivots, _ = bareiss_echelon(_integer_rows(M))
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for k in range(len(pivots) - 1, -1, -1):
            c = pivots[k]
            s = sum((E[k][j] * x[j] for j in range(c + 1, n)), Fraction(0))
            x[c] = -s / E[k][c]
        basis.append(tuple(Fraction(v) for v in primitive(x)))
    return basis


def left_kernel_basis(M) -> List[Tuple[Fraction, ...]]:
    return kernel_basis(as_matrix(M).T)


def independent_rows(M) -> List[int]:
    """Indices of the lexicographically first maximal independent row set."""
    M = as_matrix(M)
    chosen: List[int] = []
    current = 0
    for i in range(M.nrows):
        trial = chosen + [i]
        rk = rank(M.submatrix(trial, range(M.ncols)))
        if rk > current:
            chosen = trial
            current = rk
    return chosen


def det(M) -> Fraction:
    M = as_matrix(M)
    if M.nrows != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    n = M.nrows
    if n == 0:
        return Fraction(1)
    scales = []
    rows = []
    for r in M.rows:
        L = 1
        for x in r:
            L = lcm(L, x.denominator)
        scales.append(L)
        rows.append([int(x * L) for x in r])
    E, pivots, swaps = bareiss_echelon(rows)
    if len(pivots) < n:
        return Fraction(0)
    value = Fraction(E[n - 1][n - 1])
    for L in scales:
        value /= L
    return -value if swaps % 2 else value


def solve(M, b) -> Tuple[Fraction, ...]:
    """Unique solution of a square nonsingular system."""
    M = as_matrix(M)
    n = M.nrows
    aug = RationalMatrix([list(M.row(i)) + [b[i]] for i in range(n)])
    rows = [list(r) for r in aug.rows]
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular system")
        rows[c], rows[p] = rows[p], rows[c]
        piv = rows[c][c]
        rows[c] = [x / piv for x in rows[c]]
        for i in range(n):
            if i != c and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return tuple(rows[i][n] for i in range(n))


def inverse(M) -> RationalMatrix:
    M = as_matrix(M)
    n = M.nrows
    cols = [solve(M, [int(i == j) for i in range(n)]) for j in range(n)]
    return RationalMatrix.from_columns(cols, n)


# --------------------------------------------------------------------------
# characteristic polynomial and Hurwitz


@dataclass(frozen=True)
class CharPoly:
    """Monic polynomial ``t^k + c[0] t^(k-1) + ... + c[k-1]``.

    ``coefficients`` holds ``sigma_1 .. sigma_k``; entries may be Fractions or
    :class:`~tfpvkit.poly.Poly` objects.
    """

    coefficients: Tuple

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    def trailing_zeros(self) -> int:
        z = 0
        for c in reversed(self.coefficients):
            if c != 0:
                break
            z += 1
        return z

    def divide_tau(self, s: int) -> "CharPoly":
        """Divide by ``t^s``; the last ``s`` coefficients must vanish."""
        if s < 0 or s > self.degree:
            raise ValueError(f"cannot divide degree-{self.degree} polynomial by t^{s}")
        if any(c != 0 for c in self.coefficients[self.degree - s :]):
            raise ValueError(f"t^{s} does not divide {self}")
        return CharPoly(self.coefficients[: self.degree - s])

    def evaluate(self, t) -> Fraction:
        value = Fraction(1)
        for c in self.coefficients:
            value = value * t + c
        return value

    def __str__(self):
        k = self.degree
        parts = ["t" if k == 1 else f"t^{k}"] if k else ["1"]
        for i, c in enumerate(self.coefficients, start=1):
            p = k - i
            if c == 0:
                continue
            mono = "" if p == 0 else ("t" if p == 1 else f"t^{p}")
            if isinstance(c, Poly):
                text = f"({c})" if len(c.terms) > 1 else str(c)
                parts.append(f"+ {text}*{mono}" if mono else f"+ {text}")
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mono:
                parts.append(f"{sign} {mono}" if a == 1 else f"{sign} {a}*{mono}")
            else:
                parts.append(f"{sign} {a}")
        return " ".join(parts)


def char_poly(M) -> CharPoly:
    """Coefficients of ``det(tI - M)`` by the Faddeev-LeVerrier recurrence.

    ``M`` may be a :class:`RationalMatrix` or a square nested sequence whose
    entries are Fractions or polynomials.
    """
    rows = M.tolist() if isinstance(M, RationalMatrix) else [list(r) for r in M]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("characteristic polynomial of a non-square matrix")

    def matmul(A, B):
        return [[sum((A[i][k] * B[k][j] for k in range(n) if A[i][k] != 0), Fraction(0)) for j in range(n)] for i in range(n)]

    sigmas = []
    Mk = [[Fraction(0)] * n for _ in range(n)]
    prev = Fraction(1)
    for k in range(1, n + 1):
        Mk = matmul(rows, Mk)
        for i in range(n):
            Mk[i][i] = Mk[i][i] + prev
        AM = matmul(rows, Mk)
        tr = sum((AM[i][i] for i in range(n)), Fraction(0))
        prev = tr * Fraction(-1, k)
        sigmas.append(prev)
    return CharPoly(tuple(sigmas))


def principal_minor_sum(M, k: int):
    """Sum of all ``k x k`` principal minors (works for polynomial entries)."""
    rows = M.tolist() if isinstance(M, RationalMatrix) else [list(r) for r in M]
    n = len(rows)
    total = Fraction(0)
    for idx in itertools.combinations(range(n), k):
        sub = [[rows[i][j] for j in idx] for i in idx]
        total = total + laplace_det(sub)
    return total


def hurwitz_matrix(coeffs: Sequence) -> List[List[Fraction]]:
    """Hurwitz matrix of ``t^k + c1 t^(k-1) + ... + ck``."""
    a = [Fraction(1)] + [_frac(c) for c in coeffs]
    k = len(coeffs)

    def at(idx):
        return a[idx] if 0 <= idx <= k else Fraction(0)

    return [[at(2 * (j + 1) - (i + 1)) for j in range(k)] for i in range(k)]


def hurwitz_determinants(coeffs: Sequence) -> Tuple[Fraction, ...]:
    H = hurwitz_matrix(coeffs)
    k = len(H)
    return tuple(det(RationalMatrix([row[:i] for row in H[:i]])) for i in range(1, k + 1))


@dataclass(frozen=True)
class HurwitzResult:
    stable: bool
    determinants: Tuple[Fraction, ...]


def hurwitz_stable(p) -> HurwitzResult:
    """Routh-Hurwitz test for a monic polynomial with nonzero constant term.

    ``p`` is a :class:`CharPoly` (typically already divided by ``t^s``) or a
    sequence of coefficients ``sigma_1..sigma_k``.
    """
    coeffs = p.coefficients if isinstance(p, CharPoly) else tuple(p)
    if coeffs and coeffs[-1] == 0:
        raise DegenerateConstantTerm("constant coefficient is zero: eigenvalue on the imaginary axis")
    dets = hurwitz_determinants(coeffs)
    return HurwitzResult(all(d > 0 for d in dets), dets)


# --------------------------------------------------------------------------
# extreme rays of ker(N) ∩ nonnegative orthant


def extreme_rays(N) -> List[Tuple[int, ...]]:
    """Extreme rays of the flux cone ``{v >= 0 : N v = 0}``.

    Double description: start from the orthant (unit vectors) and cut with
    one equality at a time, combining adjacent pairs of rays on opposite
    sides. Adjacency uses the combinatorial test on zero sets, which is exact
    because the ray list is kept complete and irredundant.
    """
    N = as_matrix(N)
    m = N.ncols
    if m > MAX_RAY_COLUMNS:
        raise SizeLimit(f"extreme ray enumeration limited to {MAX_RAY_COLUMNS} columns, got {m}")
    if m == 0:
        return []
    rows = _integer_rows(N) if N.nrows else []
    eqs = [rows[i] for i in independent_rows(RationalMatrix(rows, ncols=m))] if rows else []
    rays: List[Tuple[int, ...]] = [tuple(int(i == j) for j in range(m)) for i in range(m)]
    for a in eqs:
        vals = [sum(ai * ri for ai, ri in zip(a, r)) for r in rays]
        zero = [r for r, v in zip(rays, vals) if v == 0]
        pos = [(r, v) for r, v in zip(rays, vals) if v > 0]
        neg = [(r, v) for r, v in zip(rays, vals) if v < 0]
        zsets = [frozenset(i for i in range(m) if r[i] == 0) for r in rays]
        zmap = dict(zip(rays, zsets))
        new = list(zero)
        for (p, vp), (q, vq) in itertools.product(pos, neg):
            common = zmap[p] & zmap[q]
            adjacent = True
            for r, z in zip(rays, zsets):
                if r == p or r == q:
                    continue
                if common <= z:
                    adjacent = False
                    break
            if not adjacent:
                continue
            combo = tuple(vp * qi - vq * pi for pi, qi in zip(p, q))
            new.append(primitive(combo))
        rays = sorted(set(new))
    return sorted(rays, key=lambda r: (tuple(i for i in range(m) if r[i]), r))


# --------------------------------------------------------------------------
# maximal minors of N' diag(E lambda) B^T


def _sign_definite(p: Poly) -> bool:
    coeffs = p.coefficients()
    return bool(coeffs) and (all(c > 0 for c in coeffs) or all(c < 0 for c in coeffs))


@dataclass(frozen=True)
class Minor:
    """A maximal minor in ray coordinates ``lam`` and in flux coordinates ``v = E lam``."""

    columns: Tuple[int, ...]
    polynomial: Poly
    flux_polynomial: Optional[Poly] = None

    @property
    def sign_definite(self) -> bool:
        return _sign_definite(self.polynomial)

    @property
    def is_monomial(self) -> bool:
        return len(self.polynomial.terms) == 1

    @property
    def flux_sign_definite(self) -> bool:
        return self.flux_polynomial is not None and _sign_definite(self.flux_polynomial)

    @property
    def is_flux_monomial(self) -> bool:
        return self.flux_polynomial is not None and len(self.flux_polynomial.terms) == 1


def lambda_names(q: int) -> List[str]:
    return [f"lam{i + 1}" for i in range(q)]


def flux_matrix(N_prime, E: Sequence[Sequence[int]], B) -> List[List[Poly]]:
    """The matrix ``N' diag(E lambda) B^T`` with symbolic ``lambda``.

    ``E`` is given as a list of rays (the columns of the matrix ``E``).
    """
    Np = as_matrix(N_prime)
    B = as_matrix(B)
    lam = [Poly.var(v) for v in lambda_names(len(E))]
    m = Np.ncols
    flux = []
    for j in range(m):
        f = Poly()
        for ray, l in zip(E, lam):
            if ray[j]:
                f = f + l * ray[j]
        flux.append(f)
    n = B.nrows
    out = []
    for i in range(Np.nrows):
        row = []
        for ell in range(n):
            entry = Poly()
            for j in range(m):
                c = Np[i, j] * B[ell, j]
                if c:
                    entry = entry + flux[j] * c
            row.append(entry)
        out.append(row)
    return out


def flux_names(m: int) -> List[str]:
    return [f"v{j + 1}" for j in range(m)]


def _maximal_minors(M) -> List[Tuple[Tuple[int, ...], Poly]]:
    k = len(M)
    n = len(M[0]) if M else 0
    out = []
    for cols in itertools.combinations(range(n), k):
        sub = [[row[c] for c in cols] for row in M]
        out.append((cols, Poly.lift(laplace_det(sub))))
    return out


def minor_polynomials(N_prime, E, B) -> List[Minor]:
    """All maximal minors, ordered by column tuple.

    Each minor is expanded in the ray weights ``lam1..lamq`` and, by taking
    ``E`` as the identity, in the flux coordinates ``v1..vm``. In flux
    coordinates a minor is a sum over reaction subsets (Cauchy-Binet), so a
    minor with coefficients of one sign cannot vanish at a positive flux.
    """
    Np = as_matrix(N_prime)
    m = Np.ncols
    lam = _maximal_minors(flux_matrix(Np, E, B))
    unit = [tuple(int(i == j) for i in range(m)) for j in range(m)]
    rename = dict(zip(lambda_names(m), flux_names(m)))
    flux = _maximal_minors(flux_matrix(Np, unit, B))
    return [Minor(cols, p, q.rename(rename)) for (cols, p), (_, q) in zip(lam, flux)]
