"""Exact expectations of products of traces of words in Haar orthogonal matrices.

For ``E(Tr_gamma(O^e1 Y1, ..., O^en Yn))`` every pair of pairings ``(p, q)``
contributes ``<Wg(p), q>`` times the trace monomial read off the signed
pairing ``p .e q = (gamma delta)^-1 delta_e p delta q delta delta_e (gamma delta)``
of ``[+-n]``.  Expressions are exact: coefficients are
:class:`~orthowg.polynomial.RationalFunctionD` in symbolic mode and Fractions
once a dimension is fixed.
"""

from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .combinatorics import (
    Permutation,
    SetPartition,
    SignedPermutation,
    check_signs,
    joint_cumulant,
    pairings_of,
)
from .polynomial import RationalFunctionD
from .weingarten import wg_class_function

__all__ = [
    "Symbol",
    "IDENTITY",
    "TraceMonomial",
    "TraceExpression",
    "WordSpec",
    "MatrixSet",
    "canonical_word",
    "transpose_word",
    "tr_sigma",
    "dot_epsilon",
    "pairing_to_trace",
    "expected_trace",
    "expected_trace_symbolic",
    "expected_trace_numeric",
    "covariance_symbolic",
    "cumulant_expression",
    "exact_cumulant",
    "parity_check",
    "ENGINE_CAP",
]

ENGINE_CAP = 8


class Symbol(namedtuple("Symbol", ["id", "t"])):
    """A matrix label with a transpose flag; ``I`` is the identity."""

    __slots__ = ()

    def __new__(cls, id, t=False):
        if not id:
            raise ValueError("symbol id must be nonempty")
        return super().__new__(cls, str(id), bool(t))

    def transpose(self):
        return Symbol(self.id, not self.t)

    def __str__(self):
        return self.id + ("^t" if self.t else "")


IDENTITY = "I"


def _as_word(x):
    if isinstance(x, Symbol):
        x = (x,)
    elif isinstance(x, str):
        x = (Symbol(x),)
    x = (s if isinstance(s, Symbol) else Symbol(s) for s in x)
    return tuple(s for s in x if s.id != IDENTITY)


def transpose_word(word):
    """``(s1 ... sk)^t = sk^t ... s1^t``."""
    return tuple(s.transpose() for s in reversed(word))


def canonical_word(word):
    """Least representative over rotations of the word and of its transpose."""
    word = tuple(word)
    if not word:
        return word
    best = None
    for w in (word, transpose_word(word)):
        for i in range(len(w)):
            cand = w[i:] + w[:i]
            if best is None or cand < best:
                best = cand
    return best


class TraceMonomial:
    """Order-insensitive product of traces of canonical cyclic words.

    The empty word stands for ``Tr(I)``; expressions fold it into ``d``.
    """

    __slots__ = ("words", "_hash")

    def __init__(self, words=()):
        self.words = tuple(sorted(canonical_word(_as_word(w)) for w in words))
        self._hash = hash(self.words)

    @classmethod
    def _from_canonical(cls, words):
        obj = cls.__new__(cls)
        obj.words = tuple(sorted(words))
        obj._hash = hash(obj.words)
        return obj

    def __mul__(self, other):
        return TraceMonomial._from_canonical(self.words + other.words)

    def __eq__(self, other):
        if not isinstance(other, TraceMonomial):
            return NotImplemented
        return self.words == other.words

    def __lt__(self, other):
        return (len(self.words), self.words) < (len(other.words), other.words)

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.words)

    def symbols(self):
        return {s.id for w in self.words for s in w}

    def __str__(self):
        if not self.words:
            return "1"
        return " ".join("Tr(" + (" ".join(map(str, w)) or "I") + ")" for w in self.words)

    def __repr__(self):
        return f"TraceMonomial({self})"


ONE = TraceMonomial()


def _is_scalar(x):
    return isinstance(x, (int, Fraction, RationalFunctionD))


class TraceExpression:
    """Linear combination of :class:`TraceMonomial` with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        out = {}
        for mono, c in (terms or {}).items():
            if c:
                out[mono] = c
        self.terms = out

    @classmethod
    def scalar(cls, c):
        return cls({ONE: c})

    @classmethod
    def monomial(cls, words, c=1):
        return cls({TraceMonomial(words): c})

    def _coerce(self, other):
        if isinstance(other, TraceExpression):
            return other
        if _is_scalar(other):
            return TraceExpression.scalar(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return TraceExpression(out)

    __radd__ = __add__

    def __neg__(self):
        return TraceExpression({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            return TraceExpression({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, TraceExpression):
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                c = c1 * c2
                out[m] = out[m] + c if m in out else c
        return TraceExpression(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(self.terms[m] == other.terms[m] for m in self.terms)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def coefficient(self, words):
        return self.terms.get(TraceMonomial(words), 0)

    def map_coefficients(self, f):
        return TraceExpression({m: f(c) for m, c in self.terms.items()})

    def at(self, d):
        """Evaluate every symbolic coefficient at the dimension ``d``."""
        return self.map_coefficients(lambda c: c.evaluate(d) if isinstance(c, RationalFunctionD) else Fraction(c))

    def evaluate(self, mats):
        """Substitute concrete matrices; symbolic coefficients are taken at ``mats.d``."""
        total = Fraction(0)
        for m, c in self.terms.items():
            if isinstance(c, RationalFunctionD):
                c = c.evaluate(mats.d)
            total += c * mats.trace_monomial(m)
        return total

    def symbols(self):
        out = set()
        for m in self.terms:
            out |= m.symbols()
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.items():
            parts.append(f"[{c}] {m}" if m.words else f"[{c}]")
        return " + ".join(parts)

    def __repr__(self):
        return f"TraceExpression({self})"

    def to_json(self):
        return [{"monomial": str(m), "coefficient": str(c)} for m, c in self.items()]


# ---------------------------------------------------------------------------
# Word specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WordSpec:
    """``Tr_gamma(O_{k1}^{e1} Y1, ..., O_{kn}^{en} Yn)`` times plain traces.

    ``slots[k]`` is the word ``Y_{k+1}`` (empty for the identity),
    ``haar_labels`` selects independent Haar factors (``None``: one Haar
    matrix), ``tail`` lists extra traces with no Haar factor.
    """

    gamma: Permutation
    eps: tuple
    slots: tuple
    haar_labels: tuple = None
    tail: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "eps", check_signs(self.eps))
        object.__setattr__(self, "slots", tuple(_as_word(s) for s in self.slots))
        object.__setattr__(self, "tail", tuple(_as_word(s) for s in self.tail))
        if self.haar_labels is not None:
            labels = tuple(int(x) for x in self.haar_labels)
            if any(x < 1 for x in labels):
                raise ValueError("Haar labels must be positive")
            object.__setattr__(self, "haar_labels", labels)
        n = self.gamma.n
        if len(self.eps) != n or len(self.slots) != n:
            raise ValueError("gamma, eps and slots must have the same length")
        if self.haar_labels is not None and len(self.haar_labels) != n:
            raise ValueError("haar_labels length mismatch")

    @property
    def n(self):
        return self.gamma.n

    @classmethod
    def single(cls, eps, slots, haar_labels=None):
        """One trace: ``gamma = (1, ..., n)``."""
        n = len(eps)
        gamma = Permutation.cycle_type([n]) if n else Permutation(())
        return cls(gamma, tuple(eps), tuple(slots), haar_labels)

    @classmethod
    def plain(cls, *words):
        """Traces with no Haar factor."""
        return cls(Permutation(()), (), (), None, tuple(words))

    def labels(self):
        return self.haar_labels if self.haar_labels is not None else (1,) * self.n

    def symbols(self):
        return {s.id for w in self.slots + self.tail for s in w}

    def transposed(self):
        """The same random variable written through ``Tr(X) = Tr(X^t)``.

        Every cycle is read backwards: ``gamma`` is inverted, signs flip and
        position ``k`` now carries the transposed word of ``gamma^-1(k)``.
        """
        back = self.gamma.inverse()
        return WordSpec(
            back,
            tuple(-e for e in self.eps),
            tuple(transpose_word(self.slots[back(k) - 1]) for k in range(1, self.n + 1)),
            self.haar_labels,
            tuple(transpose_word(w) for w in self.tail),
        )


def merge(*specs):
    """Product of the random variables described by ``specs`` as one WordSpec."""
    images = []
    eps = []
    slots = []
    labels = []
    tail = []
    offset = 0
    for s in specs:
        images.extend(x + offset for x in s.gamma.images)
        eps.extend(s.eps)
        slots.extend(s.slots)
        labels.extend(s.labels())
        tail.extend(s.tail)
        offset += s.n
    return WordSpec(Permutation(images), tuple(eps), tuple(slots), tuple(labels), tuple(tail))


WordSpec.merge = staticmethod(merge)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


def _parse_rational(x):
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("matrix entries must be exact (int or 'p/q'), not float")
    return Fraction(x)


class MatrixSet:
    """Deterministic ``d x d`` matrices with exact rational entries."""

    def __init__(self, d, matrices):
        self.d = int(d)
        self.matrices = {}
        for key, m in matrices.items():
            arr = np.array([[_parse_rational(x) for x in row] for row in m], dtype=object)
            if arr.shape != (self.d, self.d):
                raise ValueError(f"matrix {key!r} has shape {arr.shape}, expected ({self.d}, {self.d})")
            self.matrices[str(key)] = _simplify(arr)
        self._trace_cache = {}

    @classmethod
    def from_json(cls, data):
        return cls(data["d"], data.get("matrices", {}))

    def to_json(self):
        return {
            "d": self.d,
            "matrices": {k: [[str(x) for x in row] for row in m] for k, m in self.matrices.items()},
        }

    def matrix(self, sym):
        if sym.id == IDENTITY:
            return np.identity(self.d, dtype=object)
        try:
            m = self.matrices[sym.id]
        except KeyError:
            raise KeyError(f"unknown symbol {sym.id!r}") from None
        return m.T if sym.t else m

    def word_matrix(self, word):
        out = None
        for s in word:
            if s.id == IDENTITY:
                continue
            m = self.matrix(s)
            out = m if out is None else out.dot(m)
        if out is None:
            return np.identity(self.d, dtype=object)
        return out

    def trace_word(self, word):
        word = canonical_word(_as_word(word))
        if word not in self._trace_cache:
            if not word:
                val = Fraction(self.d)
            else:
                val = Fraction(np.trace(self.word_matrix(word)))
            self._trace_cache[word] = val
        return self._trace_cache[word]

    def trace_monomial(self, mono):
        out = Fraction(1)
        for w in mono.words:
            out *= self.trace_word(w)
        return out

    def as_float(self):
        return {k: np.array(m, dtype=float) for k, m in self.matrices.items()}


def _simplify(arr):
    # keep plain ints where possible, they multiply faster than Fractions
    if all(x.denominator == 1 for x in arr.flat):
        return np.array([[int(x) for x in row] for row in arr], dtype=object)
    return arr


def tr_sigma(sigma, matrices):
    """``prod over cycles (i1..ir) of Tr(A_i1 ... A_ir)`` for concrete matrices."""
    matrices = [np.asarray(m, dtype=object) for m in matrices]
    if len(matrices) != sigma.n:
        raise ValueError("need one matrix per point of sigma")
    d = matrices[0].shape[0] if matrices else 0
    for m in matrices:
        if m.shape != (d, d):
            raise ValueError("dimension mismatch")
    out = Fraction(1)
    for c in sigma.cycles():
        prod = matrices[c[0] - 1]
        for i in c[1:]:
            prod = prod.dot(matrices[i - 1])
        out *= Fraction(np.trace(prod))
    return out


# ---------------------------------------------------------------------------
# The signed pairing p .e q and its trace
# ---------------------------------------------------------------------------


def _dot_epsilon_images(p, q, g, ginv, eps):
    """Images of ``p .e q`` as a dict on ``[+-n]``; all inputs are 1-based image tuples."""
    n = len(eps)
    out = {}
    for k in range(1, n + 1):
        for x in (k, -k):
            # gamma delta
            y = -x if x > 0 else g[-x - 1]
            # delta_e
            y = eps[abs(y) - 1] * y
            # p delta q delta
            y = p[y - 1] if y > 0 else -q[-y - 1]
            y = eps[abs(y) - 1] * y
            # (gamma delta)^-1 = delta gamma^-1
            y = -ginv[y - 1] if y > 0 else -y
            out[x] = y
    return out


def dot_epsilon(p, q, gamma, eps):
    """The pairing ``(gamma delta)^-1 delta_e p delta q delta delta_e (gamma delta)`` of ``[+-n]``."""
    eps = check_signs(eps)
    if not (p.n == q.n == gamma.n == len(eps)):
        raise ValueError("size mismatch")
    m = _dot_epsilon_images(p.images, q.images, gamma.images, gamma.inverse().images, eps)
    return SignedPermutation.from_map(m, p.n)


def _trace_cycles(r):
    """Representative cycles of ``r delta``: one of each pair ``{c, delta c^-1 delta}``."""
    n = len(r) // 2
    covered = set()
    out = []
    for a in range(1, n + 1):
        if a in covered:
            continue
        cyc = []
        x = a
        while True:
            cyc.append(x)
            covered.add(abs(x))
            x = r[-x]
            if x == a:
                break
        out.append(cyc)
    return out


def _monomial_words(cycles, slots):
    words = []
    for cyc in cycles:
        w = ()
        for x in cyc:
            w += slots[x - 1] if x > 0 else transpose_word(slots[-x - 1])
        words.append(canonical_word(w))
    return words


def pairing_to_trace(r, slots):
    """``(pi, eta, monomial)`` read off a pairing ``r`` of ``[+-n]``.

    The cycles of ``r delta`` come in pairs; from each pair the cycle through
    the smallest positive point is kept.  ``pi`` takes absolute values, ``eta``
    records signs, and the monomial is the product of the traces of the
    concatenated slot words (transposed where the sign is negative).
    """
    if isinstance(r, SignedPermutation):
        rmap = {k: r(k) for k in range(-r.n, r.n + 1) if k}
    else:
        rmap = dict(r)
    n = len(rmap) // 2
    slots = [_as_word(s) for s in slots]
    if len(slots) != n:
        raise ValueError("need one slot word per point")
    cycles = _trace_cycles(rmap)
    pi = Permutation.from_cycles([tuple(abs(x) for x in c) for c in cycles], n)
    eta = [0] * n
    for c in cycles:
        for x in c:
            eta[abs(x) - 1] = 1 if x > 0 else -1
    mono = TraceMonomial._from_canonical(_monomial_words(cycles, slots))
    return pi, tuple(eta), mono


# ---------------------------------------------------------------------------
# Expectations
# ---------------------------------------------------------------------------


def _coset_type_pairs(pairs_p, pairs_q):
    pm = {}
    for a, b in pairs_p:
        pm[a] = b
        pm[b] = a
    qm = {}
    for a, b in pairs_q:
        qm[a] = b
        qm[b] = a
    seen = set()
    sizes = []
    for start in pm:
        if start in seen:
            continue
        size = 0
        x = start
        while True:
            seen.add(x)
            y = pm[x]
            seen.add(y)
            size += 1
            x = qm[y]
            if x == start:
                break
        sizes.append(size)
    return tuple(sorted(sizes, reverse=True))


def _images_from(pairs_list, n):
    images = [0] * n
    for pairs in pairs_list:
        for a, b in pairs:
            images[a - 1] = b
            images[b - 1] = a
    return tuple(images)


def _d_factor(k, d):
    if d is None:
        return RationalFunctionD.d_power(k)
    return Fraction(d) ** k


def expected_trace(spec, d=None, allow_large=False):
    """``E`` of the WordSpec as a TraceExpression (symbolic when ``d`` is None)."""
    n = spec.n
    cap = ENGINE_CAP
    if n > cap and not (d is not None and n <= 10 and allow_large):
        raise ValueError(f"word with {n} Haar factors exceeds the engine cap {cap}")
    tail_words = [canonical_word(w) for w in spec.tail]
    one = RationalFunctionD.const(1) if d is None else Fraction(1)
    if n == 0:
        return _fold_identity({TraceMonomial._from_canonical(tail_words): one}, d)

    blocks = SetPartition.kernel(spec.labels()).blocks
    if any(len(b) % 2 for b in blocks):
        return TraceExpression()
    per_block = [list(pairings_of(b)) for b in blocks]
    sizes = tuple(len(b) for b in blocks)
    tables = {s: wg_class_function(s, d, allow_large=True) for s in set(sizes)}

    g = spec.gamma.images
    ginv = spec.gamma.inverse().images
    eps = spec.eps
    slots = spec.slots
    counts = {}
    combos = list(product(*per_block))
    images = {c: _images_from(c, n) for c in combos}
    for cp in combos:
        p = images[cp]
        for cq in combos:
            q = images[cq]
            r = _dot_epsilon_images(p, q, g, ginv, eps)
            words = _monomial_words(_trace_cycles(r), slots)
            key = (tuple(sorted(words + tail_words)),
                   tuple(_coset_type_pairs(a, b) for a, b in zip(cp, cq)))
            counts[key] = counts.get(key, 0) + 1

    weights = {}
    acc = {}
    for (words, types), c in counts.items():
        if types not in weights:
            w = one
            for s, t in zip(sizes, types):
                w = w * tables[s][t]
            weights[types] = w
        mono = TraceMonomial._from_canonical(words)
        val = weights[types] * c
        acc[mono] = acc[mono] + val if mono in acc else val
    return _fold_identity(acc, d)


def _fold_identity(terms, d):
    """Replace ``Tr(I)`` factors by powers of ``d``."""
    out = {}
    for mono, c in terms.items():
        k = sum(1 for w in mono.words if not w)
        if k:
            mono = TraceMonomial._from_canonical([w for w in mono.words if w])
            c = c * _d_factor(k, d)
        out[mono] = out[mono] + c if mono in out else c
    return TraceExpression(out)


def expected_trace_symbolic(spec, allow_large=False):
    return expected_trace(spec, None, allow_large=allow_large)


def expected_trace_numeric(spec, mats):
    """Exact Haar expectation with the concrete matrices substituted."""
    if mats.d < spec.n:
        raise ValueError(f"dimension d = {mats.d} is below the number of Haar factors n = {spec.n}")
    unknown = {s for s in spec.symbols() if s != IDENTITY} - set(mats.matrices)
    if unknown:
        raise KeyError(f"unknown symbol(s): {', '.join(sorted(unknown))}")
    return expected_trace(spec, mats.d, allow_large=True).evaluate(mats)


def covariance_symbolic(w1, w2, d=None):
    """``E(XY) - E(X) E(Y)`` with the joint moment taken over a two-cycle word."""
    return expected_trace(merge(w1, w2), d) - expected_trace(w1, d) * expected_trace(w2, d)


def cumulant_expression(words, d=None):
    """Classical joint cumulant of the trace variables as a TraceExpression."""
    words = list(words)
    r = len(words)
    if r == 0:
        raise ValueError("need at least one word")
    total = sum(w.n for w in words)
    if total > ENGINE_CAP:
        raise ValueError(f"combined word has {total} Haar factors, above the cap {ENGINE_CAP}")

    def moment(block):
        return expected_trace(merge(*(words[i - 1] for i in block)), d)

    return joint_cumulant(moment, SetPartition.one_block(r))


def exact_cumulant(words, mats, r=None):
    """Exact ``k_r`` of the trace random variables at the dimension of ``mats``."""
    words = list(words)
    if r is not None and r != len(words):
        raise ValueError("r must equal the number of words")
    if mats.d < sum(w.n for w in words):
        raise ValueError("dimension below the combined number of Haar factors")
    return cumulant_expression(words, mats.d).evaluate(mats)


def parity_check(p, q, gamma, eps):
    """Whether ``pi_{p .e q}`` preserves parity, for parity-reversing ``gamma`` and alternating ``eps``."""
    n = gamma.n
    if any((gamma(k) - k) % 2 == 0 for k in range(1, n + 1)):
        raise ValueError("gamma must send every point to one of the opposite parity")
    eps = check_signs(eps)
    if eps != tuple((-1) ** (k + 1) for k in range(1, n + 1)):
        raise ValueError("eps must alternate starting with +1")
    pi, _, _ = pairing_to_trace(dot_epsilon(p, q, gamma, eps), [()] * n)
    return all((pi(k) - k) % 2 == 0 for k in range(1, n + 1))
