"""Gram form on pairings and its inverse, the orthogonal Weingarten function.

``<phi(p), q> = d^#(p v q)`` on the pairings of ``[n]``; inverting this
matrix gives ``<Wg(p), q>``.  Two inversion routes are provided:

* :func:`weingarten_numeric` inverts the full Gram matrix at a fixed rational
  ``d`` by exact Gauss-Jordan elimination;
* :func:`weingarten_symbolic` inverts over ``Z[d]`` with fraction-free
  (Bareiss) elimination.  Since ``<Wg(p), q>`` only depends on the coset type
  of ``(p, q)`` (the half-sizes of the blocks of ``p v q``), the symbolic
  route solves the Gram system restricted to class functions, one unknown
  per coset type.  :func:`invert_symbolic` also inverts the full Gram matrix
  and serves as the cross-check for small ``n``.
"""

import warnings
from fractions import Fraction
from functools import lru_cache
from math import comb

from .combinatorics import Pairing, SetPartition, enumerate_pairings, join
from .polynomial import LaurentTerm, RationalFunctionD, pdiv_exact, pmul, psub

__all__ = [
    "SingularWeingartenError",
    "WeingartenCapError",
    "WeingartenTable",
    "catalan",
    "coset_type",
    "gram",
    "invert_symbolic",
    "leading_term",
    "pairing_index",
    "weingarten_numeric",
    "weingarten_symbolic",
    "wg_class_function",
    "weingarten_multiplicative",
    "SYMBOLIC_CAP",
    "LARGE_CAP",
]

SYMBOLIC_CAP = 6
LARGE_CAP = 8
NUMERIC_CAP = 10


class SingularWeingartenError(ZeroDivisionError):
    """The Gram matrix is singular at the requested dimension."""

    def __init__(self, n, d):
        super().__init__(f"Gram matrix of pairings of [{n}] is singular at d = {d}")
        self.n = n
        self.d = d


class WeingartenCapError(ValueError):
    """Requested size is above the configured cap."""


def catalan(k):
    return comb(2 * k, k) // (k + 1)


@lru_cache(maxsize=None)
def _pairings(n):
    return tuple(enumerate_pairings(n))


def pairing_index(n):
    return {p: i for i, p in enumerate(_pairings(n))}


def coset_type(p, q):
    """Half-sizes of the blocks of ``p v q``, in decreasing order."""
    return tuple(sorted((len(b) // 2 for b in join(p, q).blocks), reverse=True))


def _check_even(n):
    if n < 0 or n % 2:
        raise ValueError(f"n must be even and non-negative, got {n}")


def gram(n, d=None):
    """Gram matrix ``d^#(p v q)`` indexed by :func:`enumerate_pairings` order.

    With ``d`` given the entries are Fractions, otherwise
    :class:`RationalFunctionD` monomials.
    """
    _check_even(n)
    if n < 2:
        raise ValueError("gram needs n >= 2")
    P = _pairings(n)
    out = []
    for p in P:
        row = []
        for q in P:
            k = len(join(p, q))
            row.append(Fraction(d) ** k if d is not None else RationalFunctionD.d_power(k))
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# Exact inversion
# ---------------------------------------------------------------------------


def _solve_fraction(matrix, rhs_cols):
    """Gauss-Jordan over Q; returns the solution columns or ``None`` if singular."""
    k = len(matrix)
    A = [list(map(Fraction, row)) + [Fraction(c[i]) for c in rhs_cols] for i, row in enumerate(matrix)]
    width = len(A[0])
    for c in range(k):
        piv = next((r for r in range(c, k) if A[r][c] != 0), None)
        if piv is None:
            return None
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        rowc = [x * inv for x in A[c]]
        A[c] = rowc
        for i in range(k):
            if i != c and A[i][c] != 0:
                f = A[i][c]
                rowi = A[i]
                for j in range(c, width):
                    if rowc[j]:
                        rowi[j] -= f * rowc[j]
    return [[A[i][k + j] for i in range(k)] for j in range(len(rhs_cols))]


def invert_symbolic(matrix):
    """Inverse of a square matrix over ``Z[d]`` by fraction-free Gauss-Jordan.

    ``matrix`` holds integer coefficient tuples (lowest degree first).  Every
    intermediate entry stays in ``Z[d]``; the divisions by the previous
    pivot are exact.  Returns :class:`RationalFunctionD` entries.
    """
    k = len(matrix)
    A = [list(row) + [(1,) if i == j else () for j in range(k)] for i, row in enumerate(matrix)]
    width = 2 * k
    prev = (1,)
    for c in range(k):
        piv = next((r for r in range(c, k) if A[r][c]), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular over Q(d)")
        A[c], A[piv] = A[piv], A[c]
        pc = A[c][c]
        for i in range(k):
            if i == c:
                continue
            f = A[i][c]
            A[i] = [pdiv_exact(psub(pmul(pc, A[i][j]), pmul(f, A[c][j])), prev) for j in range(width)]
        prev = pc
    return [[RationalFunctionD(A[i][k + j], A[i][i]) for j in range(k)] for i in range(k)]


def _type_system(n):
    """Gram system restricted to class functions of the coset type.

    Returns ``(types, matrix)`` where ``matrix[a][b]`` is the integer
    polynomial ``sum_{q: type(p0, q) = types[b]} d^#(r_a v q)`` and ``r_a`` is
    any pairing of type ``types[a]`` relative to the base pairing ``p0``.
    """
    P = _pairings(n)
    p0 = P[0]
    by_type = {}
    for q in P:
        by_type.setdefault(coset_type(p0, q), []).append(q)
    types = sorted(by_type, reverse=True)
    matrix = []
    for a in types:
        r = by_type[a][0]
        row = []
        for b in types:
            counts = {}
            for q in by_type[b]:
                k = len(join(r, q))
                counts[k] = counts.get(k, 0) + 1
            poly = [0] * (max(counts) + 1)
            for k, c in counts.items():
                poly[k] = c
            row.append(tuple(poly))
        matrix.append(row)
    return types, matrix


@lru_cache(maxsize=None)
def _class_function_symbolic(n):
    types, matrix = _type_system(n)
    inv = invert_symbolic(matrix)
    base = types.index((1,) * (n // 2))
    return {t: inv[i][base] for i, t in enumerate(types)}


@lru_cache(maxsize=None)
def _class_function_numeric(n, d):
    types, matrix = _type_system(n)
    evaluated = [[sum(c * d ** k for k, c in enumerate(poly)) for poly in row] for row in matrix]
    rhs = [1 if t == (1,) * (n // 2) else 0 for t in types]
    sol = _solve_fraction(evaluated, [rhs])
    if sol is None:
        raise SingularWeingartenError(n, d)
    return dict(zip(types, sol[0]))


def wg_class_function(n, d=None, allow_large=False):
    """``coset type -> <Wg(p), q>`` for pairings of ``[n]``.

    Symbolic (``d=None``) up to ``n = 6``, or ``n = 8`` with ``allow_large``;
    numeric up to ``n = 10`` (``n = 10`` warns about cost).
    """
    _check_even(n)
    if n == 0:
        one = RationalFunctionD.const(1) if d is None else Fraction(1)
        return {(): one}
    if d is None:
        cap = LARGE_CAP if allow_large else SYMBOLIC_CAP
        if n > cap:
            raise WeingartenCapError(f"symbolic Weingarten for n = {n} exceeds cap {cap}")
        return _class_function_symbolic(n)
    if n > NUMERIC_CAP:
        raise WeingartenCapError(f"numeric Weingarten for n = {n} exceeds cap {NUMERIC_CAP}")
    if n == NUMERIC_CAP:
        warnings.warn("n = 10 Weingarten sums are expensive", RuntimeWarning, stacklevel=2)
    d = Fraction(d)
    if _gram_singular(n, d):
        raise SingularWeingartenError(n, d)
    return _class_function_numeric(n, d)


def _gram_singular(n, d):
    # poles of Wg are at small integers; the class system can stay regular
    # while the full Gram matrix is singular, so check the full determinant
    # only for the few integer points where that can happen
    if d.denominator != 1 or d > n or d < -2 * n:
        return False
    return _full_gram_singular(n, d)


@lru_cache(maxsize=None)
def _full_gram_singular(n, d):
    G = gram(n, d)
    return _solve_fraction(G, [[1 if i == 0 else 0 for i in range(len(G))]]) is None


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


class WeingartenTable:
    """Map ``(p, q) -> <Wg(p), q>`` for pairings of ``[n]``.

    ``mode`` is ``"symbolic"`` (entries are :class:`RationalFunctionD`) or
    ``"numeric"`` (entries are Fractions at ``d``).
    """

    def __init__(self, n, mode, entries, d=None):
        self.n = n
        self.mode = mode
        self.d = d
        self.pairings = _pairings(n)
        self.entries = entries

    def __getitem__(self, key):
        return self.entries[key]

    def __len__(self):
        return len(self.entries)

    def matrix(self):
        P = self.pairings
        return [[self.entries[p, q] for q in P] for p in P]

    def to_json(self):
        out = {"n": self.n, "mode": self.mode, "pairings": [str(p) for p in self.pairings], "entries": {}}
        if self.d is not None:
            out["d"] = str(self.d)
        for (p, q), v in self.entries.items():
            out["entries"][f"{p}|{q}"] = str(v)
        return out


def weingarten_numeric(n, d):
    """Exact inverse of ``gram(n, d)`` by full Gauss-Jordan elimination."""
    _check_even(n)
    if n > NUMERIC_CAP:
        raise WeingartenCapError(f"numeric table for n = {n} exceeds cap {NUMERIC_CAP}")
    d = Fraction(d)
    G = gram(n, d)
    N = len(G)
    cols = [[1 if i == j else 0 for i in range(N)] for j in range(N)]
    sol = _solve_fraction(G, cols)
    if sol is None:
        raise SingularWeingartenError(n, d)
    P = _pairings(n)
    entries = {(P[i], P[j]): sol[j][i] for i in range(N) for j in range(N)}
    return WeingartenTable(n, "numeric", entries, d=d)


def weingarten_symbolic(n, allow_large=False):
    """Table of ``<Wg(p), q>`` as rational functions of ``d``."""
    f = wg_class_function(n, allow_large=allow_large)
    P = _pairings(n)
    entries = {(p, q): f[coset_type(p, q)] for p in P for q in P}
    return WeingartenTable(n, "symbolic", entries)


def leading_term(p, q):
    """Leading term of ``<Wg(p), q>`` in ``1/d``.

    Exponent ``-n + #(p v q)``; coefficient the product over blocks of
    ``p v q`` of ``(-1)^(r-1) C_(r-1)`` for a block of ``2r`` points.
    """
    if p.n != q.n:
        raise ValueError("size mismatch")
    blocks = join(p, q).blocks
    coeff = 1
    for b in blocks:
        r = len(b) // 2
        coeff *= (-1) ** (r - 1) * catalan(r - 1)
    return LaurentTerm(coeff, -p.n + len(blocks))


def _restrict(p, block):
    """Pairing of ``block`` relabelled to ``[len(block)]``."""
    pos = {x: i for i, x in enumerate(block, start=1)}
    pairs = set()
    for x in block:
        y = p(x)
        if y not in pos:
            raise ValueError(f"pair ({x},{y}) is not inside block {block}")
        pairs.add(tuple(sorted((pos[x], pos[y]))))
    return Pairing.from_pairs(sorted(pairs), len(block))


def weingarten_multiplicative(U, p, q, d=None, allow_large=False):
    """``Wg(U, p, q)``: product over blocks of ``U`` of the block Weingarten values."""
    if not isinstance(U, SetPartition):
        raise TypeError("U must be a SetPartition")
    if U.n != p.n or p.n != q.n:
        raise ValueError("size mismatch")
    out = RationalFunctionD.const(1) if d is None else Fraction(1)
    for b in U.blocks:
        pb = _restrict(p, b)
        qb = _restrict(q, b)
        f = wg_class_function(len(b), d, allow_large=allow_large)
        out = out * f[coset_type(pb, qb)]
    return out
