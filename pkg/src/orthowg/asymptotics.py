"""Large-``d`` bookkeeping: degrees of trace expressions, spoke diagrams and limit formulas."""

from collections import namedtuple
from dataclasses import dataclass, field

from .combinatorics import Permutation, check_signs, enumerate_pairings, join
from .polynomial import RationalFunctionD
from .trace_calculus import (
    Symbol,
    TraceExpression,
    _as_word,
    canonical_word,
    dot_epsilon,
    pairing_to_trace,
    transpose_word,
)

__all__ = [
    "LimitDistribution",
    "DegreeAssignment",
    "SpokeResult",
    "STANDARD",
    "REVERSED",
    "NOT_SPOKE",
    "asymptotic_degree",
    "limit_part",
    "spoke_classify",
    "maximal_connectivity_holds",
    "limit_covariance_spoke",
    "second_order_free_cov",
    "limit_cov_powers",
    "phi_o",
]

STANDARD = "standard"
REVERSED = "reversed"
NOT_SPOKE = "not_spoke"

NEG_INF = float("-inf")


def phi_o(j):
    """Limit moments of a Haar orthogonal matrix: ``phi(o^j) = [j = 0]``."""
    return 1 if j == 0 else 0


_word = _as_word


class LimitDistribution:
    """First and second order limit values keyed by canonical cyclic words.

    ``phi`` is a mapping from words to values or a callable on canonical
    words.  Because keys are canonicalized up to reverse-transpose, the
    transpose closure ``phi(w^t) = phi(w)`` holds by construction.
    """

    def __init__(self, phi, phi2=None):
        if callable(phi):
            self._phi = phi
            self._table = None
        else:
            self._table = {}
            for w, v in phi.items():
                key = canonical_word(_word(w))
                if key in self._table and self._table[key] != v:
                    raise ValueError(f"inconsistent values for {w!r} and its transpose")
                self._table[key] = v
            if self._table.get((), 1) != 1:
                raise ValueError("phi(1) must be 1")
            self._phi = None
        self._phi2 = {}
        for (w1, w2), v in (phi2 or {}).items():
            key = tuple(sorted((canonical_word(_word(w1)), canonical_word(_word(w2)))))
            self._phi2[key] = v

    @classmethod
    def symbolic(cls):
        """``phi(w) = Tr(w)`` as a monomial, so limit formulas return TraceExpressions."""
        return cls(lambda w: TraceExpression.monomial([w]) if w else 1)

    def __call__(self, word):
        w = canonical_word(_word(word))
        if not w:
            return 1
        if self._phi is not None:
            return self._phi(w)
        try:
            return self._table[w]
        except KeyError:
            raise KeyError("missing phi value for " + " ".join(map(str, w))) from None

    def phi2(self, w1, w2):
        key = tuple(sorted((canonical_word(_word(w1)), canonical_word(_word(w2)))))
        try:
            return self._phi2[key]
        except KeyError:
            raise KeyError("missing phi2 value") from None


@dataclass(frozen=True)
class DegreeAssignment:
    """Symbols whose normalized trace vanishes; their singleton traces count as zero."""

    centred: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "centred", frozenset(self.centred))

    def validate(self, symbols):
        extra = self.centred - set(symbols)
        if extra:
            raise ValueError(f"centred symbols not present: {sorted(extra)}")
        return self

    def kills(self, monomial):
        return any(len(w) == 1 and w[0].id in self.centred for w in monomial.words)


def _surviving(expr, asg):
    asg = asg or DegreeAssignment()
    for mono, c in expr.terms.items():
        if not isinstance(c, RationalFunctionD):
            raise TypeError("degree bookkeeping needs symbolic coefficients")
        if not asg.kills(mono):
            yield mono, c


def asymptotic_degree(expr, asg=None):
    """Max of ``deg(coefficient) + #traces`` over surviving monomials, or ``-inf``."""
    best = NEG_INF
    for mono, c in _surviving(expr, asg):
        best = max(best, c.degree + len(mono))
    return best


def limit_part(expr, asg=None, degree=0):
    """Monomials of exactly ``degree`` with their leading coefficients."""
    out = {}
    for mono, c in _surviving(expr, asg):
        if c.degree + len(mono) == degree:
            out[mono] = c.leading_term().coefficient
    return TraceExpression(out)


# ---------------------------------------------------------------------------
# Spoke diagrams
# ---------------------------------------------------------------------------


SpokeResult = namedtuple("SpokeResult", ["kind", "l", "checks"])


def _two_cycles(m, n):
    return Permutation.cycle_type([m, n])


def _power(gamma, k, x):
    if k >= 0:
        for _ in range(k):
            x = gamma(x)
    else:
        inv = gamma.inverse()
        for _ in range(-k):
            x = inv(x)
    return x


def _rdelta_two_cycles(r, n):
    """Cycles of ``r delta`` as lists of signed points."""
    seen = set()
    out = []
    for start in [k for k in range(1, n + 1)] + [-k for k in range(1, n + 1)]:
        if start in seen:
            continue
        cyc = []
        x = start
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = r(-x)
        out.append(cyc)
    return out


def spoke_classify(p, eps, shape=None):
    """Classify ``p`` against ``gamma = (1..m)(m+1..m+n)`` and check the spoke lemmas.

    ``shape`` is ``(m, n)`` and defaults to two equal cycles.  Returns a
    :class:`SpokeResult`; ``checks`` holds the conclusions (a) cycle form of
    ``p``, (b) cycle form of ``pi``, (c) sign pattern of ``eps`` across pairs
    and (d) sign pattern of ``eta``.
    """
    eps = check_signs(eps)
    total = p.n
    if shape is None:
        if total % 2:
            return SpokeResult(NOT_SPOKE, None, {})
        shape = (total // 2, total // 2)
    m, n = shape
    if m + n != total or len(eps) != total:
        raise ValueError("shape does not match the pairing")
    gamma = _two_cycles(m, n)
    r = dot_epsilon(p, p, gamma, eps)
    pi, eta, _ = pairing_to_trace(r, [()] * total)
    if not pi.is_pairing() or len(join(p, gamma)) != 1:
        return SpokeResult(NOT_SPOKE, None, {})
    if m != n:
        return SpokeResult(NOT_SPOKE, None, {"m_equals_n": False})

    first = range(1, m + 1)
    pi_pairs = {frozenset(c) for c in pi.cycles()}
    rd = _rdelta_two_cycles(r, total)

    l_std = gamma(p(1))
    std_a = all(p(k) == _power(gamma, -k, l_std) for k in first)
    l_rev = gamma.inverse()(p(1))
    rev_a = all(p(k) == _power(gamma, k, l_rev) for k in first)
    same_sign = all(eps[a - 1] == eps[b - 1] for a, b in p.pairs())
    opposite_sign = all(eps[a - 1] == -eps[b - 1] for a, b in p.pairs())

    if std_a and (not rev_a or opposite_sign):
        kind, l = STANDARD, l_std
        checks = {
            "a": True,
            "b": pi_pairs == {frozenset((k, _power(gamma, -k - 1, l))) for k in first},
            "c": opposite_sign,
            "d": all(len({x > 0 for x in c}) == 1 for c in rd),
        }
    elif rev_a:
        kind, l = REVERSED, l_rev
        checks = {
            "a": True,
            "b": pi_pairs == {frozenset((k, _power(gamma, k, l))) for k in first},
            "c": same_sign,
            "d": all(len(c) == 2 and (c[0] > 0) != (c[1] > 0) for c in rd),
        }
    else:
        kind, l = NOT_SPOKE, None
        checks = {"a": False}
    return SpokeResult(kind, l, checks)


def maximal_connectivity_holds(p, gamma, eps):
    """If ``pi_{p .e p}`` is a pairing, no block of ``p v gamma`` meets more than two cycles of ``gamma``."""
    r = dot_epsilon(p, p, gamma, eps)
    pi, _, _ = pairing_to_trace(r, [()] * p.n)
    if not pi.is_pairing():
        return True
    owner = {}
    for idx, c in enumerate(gamma.cycles()):
        for x in c:
            owner[x] = idx
    return all(len({owner[x] for x in block}) <= 2 for block in join(p, gamma).blocks)


# ---------------------------------------------------------------------------
# Limit formulas
# ---------------------------------------------------------------------------


def _names(prefix, k, given):
    if given is None:
        return [(Symbol(f"{prefix}{i}"),) for i in range(1, k + 1)]
    words = [_word(x) for x in given]
    if len(words) != k:
        raise ValueError("one word per exponent is required")
    return words


def limit_covariance_spoke(phi, k, l, a=None, b=None):
    """Limit covariance of ``Tr(O^k1 A1 ... O^km Am)`` and ``Tr(O^l1 B1 ... O^ln Bn)``.

    Sum over standard and reversed spoke diagrams, indices taken mod ``m``::

        sum_r  prod_i phi(a_i b_{r-i}) [k_i + l_{r-i+1} = 0]
             + prod_i phi(a_i b_{r+i}^t) [k_i - l_{r+i} = 0]

    ``a`` and ``b`` name the words (defaults ``a1..am``, ``b1..bn``).
    Values may be numbers or, with :meth:`LimitDistribution.symbolic`,
    trace expressions.
    """
    m, n = len(k), len(l)
    if any(x == 0 for x in tuple(k) + tuple(l)):
        raise ValueError("exponents must be nonzero")
    if m != n:
        return 0
    a = _names("a", m, a)
    b = _names("b", n, b)

    def idx(j):
        return (j - 1) % m

    total = 0
    for r in range(1, m + 1):
        std = 1
        for i in range(1, m + 1):
            if phi_o(k[i - 1] + l[idx(r - i + 1)]) == 0:
                std = 0
                break
            std = std * phi(a[i - 1] + b[idx(r - i)])
        rev = 1
        for i in range(1, m + 1):
            if phi_o(k[i - 1] - l[idx(r + i)]) == 0:
                rev = 0
                break
            rev = rev * phi(a[i - 1] + transpose_word(b[idx(r + i)]))
        total = total + std + rev
    return total


def second_order_free_cov(ab, abt, n, literal=False, same_subalgebra=False):
    """Second-order covariance of alternating centred words from pair values.

    ``ab[(i, j)] = phi(a_i b_j)`` and ``abt[(i, j)] = phi(a_i b_j^t)``
    (1-based, mappings or callables).  The default sums over spoke
    diagrams, ``sum_k prod_i phi(a_i b_{k-i}) + sum_k prod_i phi(a_i b_{i-k}^t)``;
    ``literal=True`` evaluates ``sum_k prod_i (phi(a_i b_{k-i}) + phi(a_i b_{i-k}^t))``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1 and not same_subalgebra:
        return 0
    if n == 1:
        raise ValueError("n = 1 within one subalgebra is not covered by the rule")

    def get(table, i, j):
        key = (i, (j - 1) % n + 1)
        try:
            return table(*key) if callable(table) else table[key]
        except KeyError:
            raise KeyError(f"missing input phi for pair {key}") from None

    total = 0
    for k in range(1, n + 1):
        if literal:
            prod = 1
            for i in range(1, n + 1):
                prod = prod * (get(ab, i, k - i) + get(abt, i, i - k))
            total = total + prod
        else:
            std = 1
            rev = 1
            for i in range(1, n + 1):
                std = std * get(ab, i, k - i)
                rev = rev * get(abt, i, i - k)
            total = total + std + rev
    return total


def limit_cov_powers(m, n):
    """``lim cov(Tr O^m, Tr O^n)`` from spoke enumeration, with the constant ``2|m|`` for comparison.

    Returns ``{"engine_value", "published_value", "standard", "reversed"}``.
    """
    if m == 0 or n == 0:
        raise ValueError("powers must be nonzero")
    am, an = abs(m), abs(n)
    published = 2 * am if am == an else 0
    if am != an:
        return {"engine_value": 0, "published_value": published, "standard": 0, "reversed": 0}
    sm = 1 if m > 0 else -1
    sn = 1 if n > 0 else -1
    eps = (sm,) * am + (sn,) * an
    counts = {STANDARD: 0, REVERSED: 0}
    for p in enumerate_pairings(am + an):
        res = spoke_classify(p, eps, (am, an))
        if res.kind != NOT_SPOKE:
            counts[res.kind] += 1
    return {
        "engine_value": counts[STANDARD] + counts[REVERSED],
        "published_value": published,
        "standard": counts[STANDARD],
        "reversed": counts[REVERSED],
    }
