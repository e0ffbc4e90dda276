"""Permutations, pairings and set partitions on 1-based ground sets.

Conventions:

* permutations act on ``[n] = {1, ..., n}`` and compose right to left,
  ``(s * t)(k) == s(t(k))``;
* a pairing is a fixed-point-free involution;
* partitions are kept in canonical form (elements ascending within a
  block, blocks ordered by their minimum);
* signed permutations act on ``[+-n]`` and are stored in the interleaved
  order ``1, -1, 2, -2, ...``.
"""

from collections import namedtuple
from itertools import product
from math import factorial

__all__ = [
    "Permutation",
    "Pairing",
    "SetPartition",
    "SignedPermutation",
    "AnnulusShape",
    "DisconnectedError",
    "cycle_count",
    "join",
    "pairing_product",
    "is_annular_noncrossing",
    "genus_defect",
    "enumerate_pairings",
    "pairings_of",
    "enumerate_spokes",
    "set_partitions",
    "mobius",
    "mobius_recursive",
    "joint_cumulant",
    "check_signs",
    "orbits",
]


class DisconnectedError(ValueError):
    """Raised when a permutation does not connect the cycles of the annulus."""


def check_signs(signs):
    signs = tuple(signs)
    for s in signs:
        if s not in (1, -1):
            raise ValueError(f"sign entries must be +1 or -1, got {s!r}")
    return signs


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------


def _cycles_of(images):
    n = len(images)
    seen = [False] * (n + 1)
    out = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cyc = []
        k = start
        while not seen[k]:
            seen[k] = True
            cyc.append(k)
            k = images[k - 1]
        out.append(tuple(cyc))
    return out


class Permutation:
    """A permutation of ``[n]``; ``images[k - 1]`` is the image of ``k``."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(x) for x in images)
        n = len(images)
        if sorted(images) != list(range(1, n + 1)):
            raise ValueError(f"{images} is not a permutation of [1..{n}]")
        self.images = images

    @classmethod
    def identity(cls, n):
        return cls(range(1, n + 1))

    @classmethod
    def from_cycles(cls, cycles, n=None):
        cycles = [tuple(c) for c in cycles]
        if n is None:
            n = max((max(c) for c in cycles if c), default=0)
        images = list(range(1, n + 1))
        seen = set()
        for c in cycles:
            for i, x in enumerate(c):
                if x in seen or not 1 <= x <= n:
                    raise ValueError(f"bad cycle {c} for n = {n}")
                seen.add(x)
                images[x - 1] = c[(i + 1) % len(c)]
        return cls(images)

    @classmethod
    def cycle_type(cls, sizes):
        """The permutation ``(1..s1)(s1+1..s1+s2)...`` for consecutive cycle sizes."""
        cycles = []
        start = 1
        for s in sizes:
            cycles.append(tuple(range(start, start + s)))
            start += s
        return cls.from_cycles(cycles, start - 1)

    @property
    def n(self):
        return len(self.images)

    def __len__(self):
        return len(self.images)

    def __call__(self, k):
        return self.images[k - 1]

    def __mul__(self, other):
        if self.n != other.n:
            raise ValueError("size mismatch in composition")
        return Permutation(self.images[x - 1] for x in other.images)

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = Permutation.identity(self.n)
        for _ in range(k):
            out = self * out
        return out

    def inverse(self):
        inv = [0] * self.n
        for i, x in enumerate(self.images, start=1):
            inv[x - 1] = i
        return Permutation(inv)

    def cycles(self):
        """Canonical cycle form: each cycle starts at its minimum, sorted by minimum."""
        return _cycles_of(self.images)

    def cycle_count(self):
        return len(self.cycles())

    def to_partition(self):
        return SetPartition(self.cycles(), self.n)

    def is_pairing(self):
        return all(len(c) == 2 for c in self.cycles())

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __str__(self):
        return "".join("(" + ",".join(map(str, c)) + ")" for c in self.cycles()) or "()"

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class Pairing(Permutation):
    """A fixed-point-free involution of ``[n]``."""

    __slots__ = ()

    def __init__(self, images):
        super().__init__(images)
        for k, x in enumerate(self.images, start=1):
            if x == k or self.images[x - 1] != k:
                raise ValueError(f"{self.images} is not a fixed-point-free involution")

    @classmethod
    def from_pairs(cls, pairs, n=None):
        pairs = [tuple(p) for p in pairs]
        if n is None:
            n = 2 * len(pairs)
        images = [0] * n
        for a, b in pairs:
            if images[a - 1] or images[b - 1]:
                raise ValueError(f"element repeated in {pairs}")
            images[a - 1] = b
            images[b - 1] = a
        return cls(images)

    def pairs(self):
        return [c for c in self.cycles()]

    def partner(self, k):
        return self.images[k - 1]


def cycle_count(sigma):
    """Number of cycles of ``sigma``, fixed points included."""
    return sigma.cycle_count()


def orbits(n, *perms):
    """Orbits of the group generated by ``perms`` on ``[n]`` as a :class:`SetPartition`."""
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        images = p.images if isinstance(p, Permutation) else p
        for k, x in enumerate(images, start=1):
            a, b = find(k), find(x)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for k in range(1, n + 1):
        groups.setdefault(find(k), []).append(k)
    return SetPartition(groups.values(), n)


# ---------------------------------------------------------------------------
# Set partitions
# ---------------------------------------------------------------------------


class SetPartition:
    """A partition of ``[n]`` into nonempty blocks, stored canonically."""

    __slots__ = ("blocks", "n", "_index")

    def __init__(self, blocks, n=None):
        blocks = [tuple(sorted(b)) for b in blocks]
        if any(not b for b in blocks):
            raise ValueError("empty block")
        elems = sorted(x for b in blocks for x in b)
        if n is None:
            n = len(elems)
        if elems != list(range(1, n + 1)):
            raise ValueError(f"blocks {blocks} do not partition [1..{n}]")
        self.blocks = tuple(sorted(blocks))
        self.n = n
        self._index = None

    @classmethod
    def singletons(cls, n):
        return cls([(k,) for k in range(1, n + 1)], n)

    @classmethod
    def one_block(cls, n):
        return cls([tuple(range(1, n + 1))], n) if n else cls([], 0)

    @classmethod
    def kernel(cls, labels):
        """``ker(labels)``: positions with equal labels share a block."""
        groups = {}
        for k, lab in enumerate(labels, start=1):
            groups.setdefault(lab, []).append(k)
        return cls(groups.values(), len(labels))

    def block_of(self):
        """Map element -> index of its block."""
        if self._index is None:
            idx = {}
            for i, b in enumerate(self.blocks):
                for x in b:
                    idx[x] = i
            self._index = idx
        return self._index

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def size(self):
        """``|pi| = n - #(pi)``."""
        return self.n - len(self.blocks)

    def __le__(self, other):
        """Refinement order: every block of ``self`` lies in a block of ``other``."""
        if self.n != other.n:
            raise ValueError("ground-set mismatch")
        idx = other.block_of()
        return all(len({idx[x] for x in b}) == 1 for b in self.blocks)

    def __ge__(self, other):
        return other <= self

    def __eq__(self, other):
        if not isinstance(other, SetPartition):
            return NotImplemented
        return self.n == other.n and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.n, self.blocks))

    def __str__(self):
        return "{" + ",".join("(" + ",".join(map(str, b)) + ")" for b in self.blocks) + "}"

    def __repr__(self):
        return f"SetPartition({self})"

    def to_json(self):
        return [list(b) for b in self.blocks]


def _as_partition(x):
    if isinstance(x, SetPartition):
        return x
    if isinstance(x, Permutation):
        return x.to_partition()
    raise TypeError(f"expected SetPartition or Permutation, got {type(x).__name__}")


def join(a, b):
    """Least upper bound in the partition lattice.

    Permutations (and pairings) are read as the partition into their cycles.
    """
    a, b = _as_partition(a), _as_partition(b)
    if a.n != b.n:
        raise ValueError("ground-set mismatch in join")
    cyc_a = [x for blk in a.blocks for x in _cyclic(blk)]
    cyc_b = [x for blk in b.blocks for x in _cyclic(blk)]
    return orbits(a.n, _images_from_pairs(a.n, cyc_a), _images_from_pairs(a.n, cyc_b))


def _cyclic(block):
    return [(block[i], block[(i + 1) % len(block)]) for i in range(len(block))]


def _images_from_pairs(n, arrows):
    images = list(range(1, n + 1))
    for src, dst in arrows:
        images[src - 1] = dst
    return images


def pairing_product(p, q):
    """The permutation ``pq`` (apply ``q`` first)."""
    if p.n != q.n:
        raise ValueError("size mismatch")
    return p * q


def set_partitions(elements):
    """All set partitions of ``elements`` as lists of tuples (restricted growth order)."""
    elements = list(elements)
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for sub in set_partitions(rest):
        yield [(first,)] + sub
        for i in range(len(sub)):
            yield sub[:i] + [(first,) + sub[i]] + sub[i + 1:]


def partitions_below(U):
    """All ``V <= U`` as :class:`SetPartition` objects."""
    per_block = [list(set_partitions(b)) for b in U.blocks]
    for combo in product(*per_block):
        yield SetPartition([blk for part in combo for blk in part], U.n)


# ---------------------------------------------------------------------------
# Annular non-crossing tests
# ---------------------------------------------------------------------------


AnnulusShape = namedtuple("AnnulusShape", ["m", "n"])


def _annulus_gamma(shape, reversed_=False):
    m, n = shape
    if m < 1 or n < 1:
        raise ValueError("annulus circles need at least one point")
    second = tuple(range(m + 1, m + n + 1))
    if reversed_:
        second = (second[0],) + tuple(reversed(second[1:]))
        # cycle (m+n, m+n-1, ..., m+1) written from its minimum
    return Permutation.from_cycles([tuple(range(1, m + 1)), second], m + n)


def is_annular_noncrossing(pi, shape, reversed=False):
    """True iff ``#(pi) + #(pi^-1 gamma) = m + n`` for the annulus ``gamma``.

    Raises :class:`DisconnectedError` unless ``pi`` connects the two circles.
    """
    shape = AnnulusShape(*shape)
    gamma = _annulus_gamma(shape, reversed)
    if pi.n != gamma.n:
        raise ValueError("size mismatch")
    if len(orbits(pi.n, pi, gamma)) != 1:
        raise DisconnectedError("disconnected: pi does not connect the two circles")
    return pi.cycle_count() + (pi.inverse() * gamma).cycle_count() == shape.m + shape.n


def genus_defect(pi, gamma):
    """``n + 2k - (#(pi) + #(pi^-1 gamma) + #(gamma))``, where ``k`` counts orbits of ``<pi, gamma>``."""
    if pi.n != gamma.n:
        raise ValueError("size mismatch")
    n = pi.n
    k = len(orbits(n, pi, gamma))
    return n + 2 * k - (pi.cycle_count() + (pi.inverse() * gamma).cycle_count() + gamma.cycle_count())


# ---------------------------------------------------------------------------
# Pairing enumeration
# ---------------------------------------------------------------------------


def _pair_up(elems):
    if not elems:
        yield ()
        return
    first = elems[0]
    for i in range(1, len(elems)):
        rest = elems[1:i] + elems[i + 1:]
        for tail in _pair_up(rest):
            yield ((first, elems[i]),) + tail


def pairings_of(elements):
    """Pairings of an arbitrary sorted ground list as tuples of pairs.

    The smallest free element is matched with each larger free element in
    turn, recursively.
    """
    elements = tuple(elements)
    if len(elements) % 2:
        return
    yield from _pair_up(elements)


def enumerate_pairings(n):
    """Every pairing of ``[n]`` exactly once; ``(n-1)!!`` of them."""
    if n < 0 or n % 2:
        raise ValueError(f"pairings need an even non-negative n, got {n}")
    for pairs in _pair_up(tuple(range(1, n + 1))):
        yield Pairing.from_pairs(pairs, n)


def enumerate_spokes(m, reversed=False):
    """Spoke diagrams of the ``(m, m)``-annulus ``gamma = (1..m)(m+1..2m)``.

    Standard spokes pair ``k`` with ``gamma^-k(l)``, reversed spokes pair ``k``
    with ``gamma^k(l)``, one diagram for each ``l`` in ``[m+1, 2m]``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    out = []
    for l in range(m + 1, 2 * m + 1):
        pairs = []
        for k in range(1, m + 1):
            off = (l - m - 1 + (k if reversed else -k)) % m
            pairs.append((k, m + 1 + off))
        out.append(Pairing.from_pairs(pairs, 2 * m))
    return out


# ---------------------------------------------------------------------------
# Moebius function and cumulants
# ---------------------------------------------------------------------------


def mobius(V, U):
    """Moebius function of the partition lattice on the interval ``[V, U]``.

    Uses the product over blocks of ``U`` of ``(-1)^(b-1) (b-1)!`` where ``b``
    is the number of blocks of ``V`` inside that block.
    """
    if not V <= U:
        raise ValueError(f"{V} is not below {U}")
    idx = U.block_of()
    counts = [0] * len(U.blocks)
    for b in V.blocks:
        counts[idx[b[0]]] += 1
    out = 1
    for b in counts:
        out *= (-1) ** (b - 1) * factorial(b - 1)
    return out


def mobius_recursive(V, U, _cache=None):
    """Reference Moebius value from ``mu(U, U) = 1`` and ``sum_{V<=W<=U} mu(W, U) = 0``."""
    if not V <= U:
        raise ValueError(f"{V} is not below {U}")
    if _cache is None:
        _cache = {}
    key = (V, U)
    if key in _cache:
        return _cache[key]
    if V == U:
        val = 1
    else:
        val = 0
        for W in partitions_below(U):
            if V <= W and W != V:
                val -= mobius_recursive(W, U, _cache)
    _cache[key] = val
    return val


def _block_moment(moments, block):
    if callable(moments):
        return moments(block)
    try:
        return moments[block]
    except KeyError:
        try:
            return moments[frozenset(block)]
        except KeyError:
            raise KeyError(f"missing moment value for block {block}") from None


def joint_cumulant(moments, U):
    """``k_U = sum_{V <= U} mobius(V, U) E_V`` with ``E_V`` the product of block moments.

    ``moments`` maps a block (ascending tuple, or frozenset) to the mixed
    moment of the variables it indexes; a callable taking the tuple works too.
    """
    total = 0
    cache = {}
    for V in partitions_below(U):
        ev = 1
        for b in V.blocks:
            if b not in cache:
                cache[b] = _block_moment(moments, b)
            ev = ev * cache[b]
        total = total + mobius(V, U) * ev
    return total


# ---------------------------------------------------------------------------
# Signed permutations of [+-n]
# ---------------------------------------------------------------------------


def _sidx(k):
    return 2 * (k - 1) if k > 0 else 2 * (-k) - 1


class SignedPermutation:
    """A permutation of ``[+-n]`` stored in the order ``1, -1, 2, -2, ...``."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(x) for x in images)
        if len(images) % 2:
            raise ValueError("signed permutation needs an even number of images")
        n = len(images) // 2
        expect = sorted(list(range(-n, 0)) + list(range(1, n + 1)))
        if sorted(images) != expect:
            raise ValueError(f"{images} is not a bijection of [+-{n}]")
        self.images = images

    @classmethod
    def from_map(cls, mapping, n):
        images = [0] * (2 * n)
        for k in _signed_domain(n):
            images[_sidx(k)] = mapping(k) if callable(mapping) else mapping.get(k, k)
        return cls(images)

    @classmethod
    def identity(cls, n):
        return cls.from_map(lambda k: k, n)

    @classmethod
    def delta(cls, n):
        """``k -> -k``."""
        return cls.from_map(lambda k: -k, n)

    @classmethod
    def delta_epsilon(cls, eps):
        """``k -> eps_|k| * k``."""
        eps = check_signs(eps)
        return cls.from_map(lambda k: eps[abs(k) - 1] * k, len(eps))

    @classmethod
    def embed(cls, perm):
        """Extend a permutation of ``[n]`` by fixing every negative point."""
        return cls.from_map(lambda k: perm(k) if k > 0 else k, perm.n)

    @classmethod
    def embed_negative(cls, perm):
        """``delta perm delta``: act on ``[-n]`` as ``perm`` acts on ``[n]``."""
        return cls.from_map(lambda k: -perm(-k) if k < 0 else k, perm.n)

    @property
    def n(self):
        return len(self.images) // 2

    def __call__(self, k):
        return self.images[_sidx(k)]

    def __mul__(self, other):
        if self.n != other.n:
            raise ValueError("size mismatch in composition")
        return SignedPermutation(self(x) for x in other.images)

    def inverse(self):
        inv = [0] * len(self.images)
        for k in _signed_domain(self.n):
            inv[_sidx(self(k))] = k
        return SignedPermutation(inv)

    def cycles(self):
        seen = set()
        out = []
        for start in _signed_domain(self.n):
            if start in seen:
                continue
            cyc = []
            k = start
            while k not in seen:
                seen.add(k)
                cyc.append(k)
                k = self(k)
            out.append(tuple(cyc))
        return out

    def is_pairing(self):
        return all(len(c) == 2 for c in self.cycles())

    def __eq__(self, other):
        if not isinstance(other, SignedPermutation):
            return NotImplemented
        return self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __str__(self):
        return "".join("(" + ",".join(map(str, c)) + ")" for c in self.cycles())

    def __repr__(self):
        return f"SignedPermutation({self})"


def _signed_domain(n):
    for k in range(1, n + 1):
        yield k
        yield -k
