"""Exact univariate polynomials and rational functions in the dimension symbol ``d``.

Polynomials are tuples of coefficients, lowest degree first, with no
trailing zeros (the zero polynomial is the empty tuple).  Arithmetic on the
tuples is done by the module-level helpers; :class:`RationalFunctionD` wraps a
reduced numerator/denominator pair with integer coefficients.
"""

from fractions import Fraction
from math import gcd

__all__ = ["RationalFunctionD", "LaurentTerm", "poly_str"]


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def pneg(a):
    return tuple(-x for x in a)


def psub(a, b):
    return padd(a, pneg(b))


def pmul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def pscale(a, s):
    if s == 0:
        return ()
    return tuple(x * s for x in a)


def pdivmod(a, b):
    """Division with remainder over the rationals."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = [Fraction(x) for x in a]
    lead = Fraction(b[-1])
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for j, y in enumerate(b):
            a[shift + j] -= f * y
        a = list(_trim(a))
    return _trim(q), _trim(a)


def pdiv_exact(a, b):
    """Exact division in Z[d]; raises if ``b`` does not divide ``a``."""
    q, r = pdivmod(a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    out = []
    for x in q:
        if x.denominator != 1:
            raise ArithmeticError("quotient leaves Z[d]")
        out.append(x.numerator)
    return tuple(out)


def pgcd(a, b):
    """Monic gcd over Q[d]."""
    while b:
        _, r = pdivmod(a, b)
        a, b = b, r
    if not a:
        return ()
    lead = Fraction(a[-1])
    return tuple(Fraction(x) / lead for x in a)


def peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _content(coeffs):
    g = 0
    for c in coeffs:
        g = gcd(g, c)
    return g


def _to_integer(*polys):
    """Scale rational polynomials by a common factor so every coefficient is an integer."""
    lcm = 1
    for p in polys:
        for c in p:
            den = Fraction(c).denominator
            lcm = lcm * den // gcd(lcm, den)
    out = []
    for p in polys:
        out.append(tuple(int(Fraction(c) * lcm) for c in p))
    return out


def poly_str(c, var="d"):
    if not c:
        return "0"
    terms = []
    for k in range(len(c) - 1, -1, -1):
        a = c[k]
        if a == 0:
            continue
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        if k == 0:
            body = str(mag)
        else:
            pw = var if k == 1 else f"{var}^{k}"
            body = pw if mag == 1 else f"{mag}*{pw}"
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


class LaurentTerm:
    """A single term ``coefficient * d**exponent``."""

    __slots__ = ("coefficient", "exponent")

    def __init__(self, coefficient, exponent):
        self.coefficient = coefficient
        self.exponent = exponent

    def __eq__(self, other):
        if not isinstance(other, LaurentTerm):
            return NotImplemented
        return (self.coefficient, self.exponent) == (other.coefficient, other.exponent)

    def __hash__(self):
        return hash((self.coefficient, self.exponent))

    def __repr__(self):
        return f"LaurentTerm({self.coefficient}, {self.exponent})"


class RationalFunctionD:
    """Reduced ratio of integer polynomials in ``d``.

    The canonical form has ``gcd(num, den) = 1`` over Q[d], integer
    coefficients with no common integer factor, and a positive leading
    coefficient in the denominator, so equality is structural.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=(), den=(1,), _reduced=False):
        num = _trim(num)
        den = _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            num, den = self._normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def _normalize(num, den):
        if not num:
            return (), (1,)
        if len(den) > 1:
            g = pgcd(num, den)
            if len(g) > 1:
                num, _ = pdivmod(num, g)
                den, _ = pdivmod(den, g)
        num, den = _to_integer(num, den)
        c = gcd(_content(num), _content(den))
        if c > 1:
            num = tuple(x // c for x in num)
            den = tuple(x // c for x in den)
        if den[-1] < 0:
            num, den = pneg(num), pneg(den)
        return num, den

    # construction helpers
    @classmethod
    def const(cls, value):
        value = Fraction(value)
        return cls((value.numerator,), (value.denominator,), _reduced=True) if value else cls()

    @classmethod
    def d_power(cls, k):
        """``d**k`` for any integer ``k``."""
        mono = (0,) * abs(k) + (1,)
        if k >= 0:
            return cls(mono, (1,), _reduced=True)
        return cls((1,), mono, _reduced=True)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, RationalFunctionD):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        raise TypeError(f"cannot convert {type(x).__name__} to RationalFunctionD")

    # arithmetic
    def __add__(self, other):
        try:
            other = self.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == other.den:
            return RationalFunctionD(padd(self.num, other.num), self.den)
        return RationalFunctionD(
            padd(pmul(self.num, other.den), pmul(other.num, self.den)),
            pmul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunctionD(pneg(self.num), self.den, _reduced=True)

    def __sub__(self, other):
        try:
            other = self.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.num or not other.num:
            return RationalFunctionD()
        return RationalFunctionD(pmul(self.num, other.num), pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunctionD(self.den, self.num)

    def __truediv__(self, other):
        try:
            other = self.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.coerce(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = RationalFunctionD.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalFunctionD.const(other)
        if not isinstance(other, RationalFunctionD):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # inspection
    def is_zero(self):
        return not self.num

    @property
    def degree(self):
        """``deg num - deg den``; ``None`` for the zero function."""
        if not self.num:
            return None
        return len(self.num) - len(self.den)

    def leading_term(self):
        if not self.num:
            return LaurentTerm(Fraction(0), None)
        return LaurentTerm(Fraction(self.num[-1], self.den[-1]), self.degree)

    def expand(self, terms):
        """First ``terms`` coefficients of the expansion in powers of ``1/d``.

        Returns a list of ``(coefficient, exponent)`` starting at the leading
        exponent, zero coefficients included.
        """
        if not self.num:
            return []
        top = self.degree
        # series of num/den in x = 1/d: both reversed polynomials in x
        n = list(reversed(self.num))
        m = list(reversed(self.den))
        out = []
        rem = [Fraction(c) for c in n] + [Fraction(0)] * terms
        for k in range(terms):
            c = rem[k] / m[0]
            out.append((c, top - k))
            if c:
                for j, y in enumerate(m):
                    if k + j < len(rem):
                        rem[k + j] -= c * y
        return out

    def evaluate(self, d):
        d = Fraction(d)
        den = peval(self.den, d)
        if den == 0:
            raise ZeroDivisionError(f"pole at d = {d}")
        return Fraction(peval(self.num, d)) / den

    __call__ = evaluate

    def __repr__(self):
        return f"RationalFunctionD({self})"

    def __str__(self):
        if self.den == (1,):
            return poly_str(self.num)
        return f"({poly_str(self.num)})/({poly_str(self.den)})"
