import random
from fractions import Fraction
from itertools import permutations, product

import numpy as np
import pytest

from orthowg.combinatorics import Pairing, Permutation, SignedPermutation, enumerate_pairings
from orthowg.polynomial import RationalFunctionD as R
from orthowg.trace_calculus import (
    MatrixSet,
    Symbol,
    TraceExpression,
    TraceMonomial,
    WordSpec,
    canonical_word,
    covariance_symbolic,
    cumulant_expression,
    dot_epsilon,
    exact_cumulant,
    expected_trace_numeric,
    expected_trace_symbolic,
    merge,
    pairing_to_trace,
    parity_check,
    tr_sigma,
)
from orthowg.weingarten import weingarten_numeric

P = Pairing.from_pairs
W = WordSpec.single
S = Symbol


def mono(*words):
    return TraceMonomial([tuple(S(x[:-2], True) if x.endswith("^t") else S(x) for x in w.split()) for w in words])


def expr(*words, c=1):
    return TraceExpression({mono(*words): c})


def random_matrices(d, names, seed, low=-3, high=4):
    rng = np.random.default_rng(seed)
    return MatrixSet(d, {k: rng.integers(low, high, (d, d)).tolist() for k in names})


def brute_expectation(spec, mats):
    """Entry-level Weingarten sum over all row and column indices.

    ``E[prod O_{i_k j_k}] = sum_{p,q} Wg(p,q) [i = i o p] [j = j o q]``,
    applied to the index expansion of the traces; independent of the
    signed-pairing reduction.
    """
    n, d = spec.n, mats.d
    grids = np.indices((d,) * (2 * n)).reshape(2 * n, -1)
    a, b = grids[:n], grids[n:]
    weight = np.ones(grids.shape[1], dtype=object)
    for k in range(n):
        Y = np.array(mats.word_matrix(spec.slots[k]), dtype=object)
        weight = weight * Y[b[k], a[spec.gamma(k + 1) - 1]]
    rows = [a[k] if spec.eps[k] > 0 else b[k] for k in range(n)]
    cols = [b[k] if spec.eps[k] > 0 else a[k] for k in range(n)]
    table = weingarten_numeric(n, d)
    total = Fraction(0)
    for p, q in product(table.pairings, repeat=2):
        mask = np.ones(grids.shape[1], dtype=bool)
        for x, y in p.pairs():
            mask &= rows[x - 1] == rows[y - 1]
        for x, y in q.pairs():
            mask &= cols[x - 1] == cols[y - 1]
        total += table[p, q] * int(weight[mask].sum())
    for w in spec.tail:
        total *= mats.trace_word(w)
    return total


class TestCanonical:
    def test_rotation_and_transpose(self):
        w = (S("b"), S("a", True), S("c"))
        forms = {canonical_word(w[i:] + w[:i]) for i in range(3)}
        rev = tuple(s.transpose() for s in reversed(w))
        forms |= {canonical_word(rev[i:] + rev[:i]) for i in range(3)}
        assert len(forms) == 1

    def test_traces_agree_numerically(self):
        mats = random_matrices(4, ["a", "b", "c"], 1)
        w = (S("b"), S("a", True), S("c"))
        direct = Fraction(int(np.trace(np.array(mats.word_matrix(w), dtype=object))))
        assert mats.trace_word(canonical_word(w)) == direct

    def test_monomial_order_insensitive(self):
        assert mono("a", "b c") == mono("c b", "a")
        assert mono("a^t") == mono("a")
        assert mono("a b^t") == mono("b a^t")


class TestExpressions:
    def test_ring_operations(self):
        x = expr("a", c=R.d_power(-1))
        y = expr("b", c=2)
        assert (x + y) - y == x
        assert x * y == expr("a", "b", c=2 * R.d_power(-1))
        assert (x - x).is_zero()
        assert 0 + x == x

    def test_evaluate(self):
        mats = MatrixSet(2, {"a": [[1, 2], [3, 4]], "b": [["1/2", 0], [0, 1]]})
        e = expr("a", "b", c=R.d_power(-1))
        assert e.evaluate(mats) == Fraction(1, 2) * 5 * Fraction(3, 2)


class TestMatrixSet:
    def test_json_round_trip(self):
        m = MatrixSet.from_json({"d": 2, "matrices": {"a": [[1, "1/3"], [0, -2]]}})
        assert MatrixSet.from_json(m.to_json()).to_json() == m.to_json()

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            MatrixSet(2, {"a": [[1, 2, 3]]})

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            MatrixSet(1, {"a": [[0.5]]})


class TestTrSigma:
    def test_examples(self):
        A = np.array([[1, 2], [3, 4]], dtype=object)
        B = np.array([[0, 1], [1, 1]], dtype=object)
        assert tr_sigma(Permutation.identity(2), [A, B]) == 5 * 1
        assert tr_sigma(Permutation.from_cycles([(1, 2)]), [A, B]) == np.trace(A.dot(B))
        mats = [np.array(m, dtype=object) for m in ([[1, 1], [0, 1]], [[2, 0], [1, 1]], [[0, 1], [1, 0]], [[1, 0], [0, 3]])]
        sigma = Permutation.from_cycles([(1, 2, 4), (3,)])
        assert tr_sigma(sigma, mats) == np.trace(mats[0].dot(mats[1]).dot(mats[3])) * np.trace(mats[2])

    def test_mismatch(self):
        with pytest.raises(ValueError):
            tr_sigma(Permutation.identity(2), [np.identity(2, dtype=object), np.identity(3, dtype=object)])


class TestDotEpsilon:
    def test_examples(self):
        g = Permutation.from_cycles([(1, 2)])
        p = P([(1, 2)])
        assert dot_epsilon(p, p, g, (1, 1)) == SignedPermutation.from_map({1: 2, 2: 1, -1: -2, -2: -1}, 2)
        assert dot_epsilon(p, p, g, (1, -1)) == SignedPermutation.from_map({1: -1, -1: 1, 2: -2, -2: 2}, 2)

    def test_definition_by_composition(self):
        n = 4
        D = SignedPermutation.delta(n)
        for gi in permutations(range(1, n + 1)):
            g = Permutation(gi)
            gd = SignedPermutation.embed(g) * D
            for eps in product((1, -1), repeat=n):
                de = SignedPermutation.delta_epsilon(eps)
                for p, q in product(enumerate_pairings(n), repeat=2):
                    slow = gd.inverse() * de * SignedPermutation.embed(p) * D * SignedPermutation.embed(q) * D * de * gd
                    fast = dot_epsilon(p, q, g, eps)
                    assert fast == slow
                    assert fast.is_pairing()

    def test_alternative_form(self):
        # (p .e q) delta = gamma_-^-1 delta_e q delta p delta_e gamma, gamma_- = delta gamma delta
        n = 4
        D = SignedPermutation.delta(n)
        rng = random.Random(5)
        for _ in range(300):
            gi = list(range(1, n + 1))
            rng.shuffle(gi)
            g = SignedPermutation.embed(Permutation(gi))
            eps = tuple(rng.choice((1, -1)) for _ in range(n))
            p, q = rng.choice(list(enumerate_pairings(n))), rng.choice(list(enumerate_pairings(n)))
            de = SignedPermutation.delta_epsilon(eps)
            g_minus = D * g * D
            rhs = g_minus.inverse() * de * SignedPermutation.embed(q) * D * SignedPermutation.embed(p) * de * g
            assert dot_epsilon(p, q, Permutation(gi), eps) * D == rhs

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            dot_epsilon(P([(1, 2)]), P([(1, 2), (3, 4)]), Permutation.identity(2), (1, 1))


class TestPairingToTrace:
    def test_examples(self):
        n = 3
        pi, eta, m = pairing_to_trace(SignedPermutation.delta(n), ["a1", "a2", "a3"])
        assert pi == Permutation.identity(3) and eta == (1, 1, 1) and m == mono("a1", "a2", "a3")
        r = SignedPermutation.from_map({1: 2, 2: 1, -1: -2, -2: -1}, 2)
        pi, eta, m = pairing_to_trace(r, ["a1", "a2"])
        assert pi == Permutation.from_cycles([(1, 2)]) and eta == (1, -1) and m == mono("a1 a2^t")
        r = SignedPermutation.from_map({1: -2, -2: 1, -1: 2, 2: -1}, 2)
        pi, eta, m = pairing_to_trace(r, ["a1", "a2"])
        assert pi == Permutation.from_cycles([(1, 2)]) and eta == (1, 1) and m == mono("a1 a2")

    def test_representative_choice_irrelevant(self):
        rng = random.Random(7)
        for _ in range(1000):
            n = rng.randint(1, 6)
            pts = [k for k in range(1, n + 1)] + [-k for k in range(1, n + 1)]
            rng.shuffle(pts)
            r = {}
            for x, y in zip(pts[::2], pts[1::2]):
                r[x], r[y] = y, x
            slots = [(S(f"a{k}"),) for k in range(1, n + 1)]
            _, _, m = pairing_to_trace(r, slots)
            # the opposite representative of every cycle pair
            seen, words = set(), []
            for start in range(1, n + 1):
                if start in seen:
                    continue
                cyc, x = [], start
                while True:
                    cyc.append(x)
                    seen.add(abs(x))
                    x = r[-x]
                    if x == start:
                        break
                other = [-y for y in reversed(cyc)]
                words.append(tuple(s for y in other for s in (slots[y - 1] if y > 0 else (slots[-y - 1][0].transpose(),))))
            assert TraceMonomial(words) == m

    def test_trace_identity_by_index_sum(self):
        # sum over i = i o r of prod a^(k)_{i_k i_-k} equals Tr_(pi, eta)
        rng = random.Random(9)
        mats = random_matrices(2, [f"a{k}" for k in range(1, 4)], 3)
        for _ in range(30):
            pts = [1, -1, 2, -2, 3, -3]
            rng.shuffle(pts)
            r = {}
            for x, y in zip(pts[::2], pts[1::2]):
                r[x], r[y] = y, x
            total = 0
            for idx in product(range(2), repeat=6):
                i = dict(zip([1, -1, 2, -2, 3, -3], idx))
                if all(i[x] == i[r[x]] for x in i):
                    term = 1
                    for k in range(1, 4):
                        term *= mats.matrices[f"a{k}"][i[k], i[-k]]
                    total += term
            _, _, m = pairing_to_trace(r, [f"a{k}" for k in range(1, 4)])
            assert mats.trace_monomial(m) == total


class TestExpectation:
    def test_intro_identities(self):
        assert expected_trace_symbolic(W((1, -1), ("a1", "a2"))) == expr("a1", "a2", c=R.d_power(-1))
        assert expected_trace_symbolic(W((1, 1), ("a1", "a2"))) == expr("a1 a2^t", c=R.d_power(-1))

    def test_odd_is_zero(self):
        assert expected_trace_symbolic(W((1,), ("I",))).is_zero()
        assert expected_trace_symbolic(W((1, 1, -1), ("a", "b", "c"))).is_zero()

    def test_numeric_examples(self):
        for d in range(2, 7):
            mats = MatrixSet(d, {})
            assert expected_trace_numeric(W((1, -1), ("I", "I")), mats) == d
            two = WordSpec(Permutation.identity(2), (1, 1), ((), ()))
            assert expected_trace_numeric(two, mats) == 1
            eye = MatrixSet(d, {"a1": np.identity(d, dtype=int).tolist(), "a2": np.identity(d, dtype=int).tolist()})
            assert expected_trace_numeric(W((1, -1), ("a1", "a2")), eye) == d

    def test_numeric_errors(self):
        with pytest.raises(ValueError):
            expected_trace_numeric(W((1, -1, 1, -1), ("I",) * 4), MatrixSet(3, {}))
        with pytest.raises(KeyError):
            expected_trace_numeric(W((1, -1), ("a", "b")), MatrixSet(2, {"a": [[1, 0], [0, 1]]}))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_telescoping_words(self, n):
        # O^e I O^-e I ... collapses to the identity
        for eps in product((1, -1), repeat=n):
            full = tuple(e for x in eps for e in (x, -x))
            for d in range(2 * n, 2 * n + 2):
                assert expected_trace_numeric(W(full, ("I",) * (2 * n)), MatrixSet(d, {})) == d

    @pytest.mark.parametrize(
        "gamma,eps",
        [
            ([(1, 2)], (1, -1)),
            ([(1, 2)], (1, 1)),
            ([(1, 2), (3, 4)], (1, 1, 1, -1)),
            ([(1, 2, 3, 4)], (1, 1, -1, 1)),
            ([(1, 3, 2, 4)], (1, -1, -1, 1)),
            ([(1, 2, 3), (4,)], (-1, 1, 1, 1)),
            ([(1,), (2,), (3, 4)], (1, -1, 1, 1)),
        ],
    )
    def test_against_index_brute_force(self, gamma, eps):
        n = len(eps)
        spec = WordSpec(Permutation.from_cycles(gamma, n), eps, tuple(f"a{k}" for k in range(1, n + 1)))
        for d, seed in ((n, 1), (n + 1, 2)):
            mats = random_matrices(d, [f"a{k}" for k in range(1, n + 1)], seed)
            assert expected_trace_numeric(spec, mats) == brute_expectation(spec, mats)

    def test_words_in_slots_against_brute_force(self):
        spec = WordSpec(Permutation.from_cycles([(1, 2)]), (1, 1), ((S("a"), S("b", True)), (S("c"),)), tail=((S("a"), S("c")),))
        mats = random_matrices(3, ["a", "b", "c"], 4)
        assert expected_trace_numeric(spec, mats) == brute_expectation(spec, mats)

    def test_transpose_symmetry(self):
        rng = random.Random(11)
        for _ in range(10):
            n = rng.choice([2, 3, 4])
            eps = tuple(rng.choice((1, -1)) for _ in range(n))
            images = list(range(1, n + 1))
            rng.shuffle(images)
            spec = WordSpec(Permutation(images), eps, [f"a{k}" for k in range(1, n + 1)])
            flipped = spec.transposed()
            for d in range(n, n + 4):
                mats = random_matrices(d, [f"a{k}" for k in range(1, n + 1)], d)
                assert expected_trace_numeric(spec, mats) == expected_trace_numeric(flipped, mats)
            assert expected_trace_symbolic(spec) == expected_trace_symbolic(flipped)

    def test_sign_flip_invariance(self):
        # O and O^t have the same law
        spec = WordSpec(Permutation.from_cycles([(1, 3), (2, 4)]), (1, 1, -1, 1), ("a", "b", "c", "e"))
        flipped = WordSpec(spec.gamma, tuple(-e for e in spec.eps), spec.slots)
        assert expected_trace_symbolic(spec) == expected_trace_symbolic(flipped)

    def test_multi_haar_equal_labels(self):
        eps = (1, -1, 1, 1)
        names = ("a", "b", "c", "e")
        plain = expected_trace_symbolic(W(eps, names))
        labelled = expected_trace_symbolic(W(eps, names, haar_labels=(3, 3, 3, 3)))
        assert plain == labelled

    def test_independent_haar(self):
        # Tr(O1 a O2 b O1^-1 c O2^-1 e) with independent O1, O2
        spec = W((1, 1, -1, -1), ("a", "b", "c", "e"), haar_labels=(1, 2, 1, 2))
        got = expected_trace_symbolic(spec)
        # E over O2 first: O2 b O1^-1 c O2^-1 -> Tr(b O1^-1 c)/d * I
        # averaging O2 first leaves Tr(b O1^-1 c) Tr(O1 a e) / d
        assert got == expr("a e c b", c=R.d_power(-2))

    def test_tail(self):
        spec = WordSpec(Permutation.from_cycles([(1, 2)]), (1, -1), ("a", "b"), tail=(("c",), ("c", "I")))
        assert expected_trace_symbolic(spec) == expr("a", "b", "c", "c", c=R.d_power(-1))

    def test_identity_folding(self):
        assert expected_trace_symbolic(W((1, -1), ("a", "I"))) == expr("a")


class TestCovariance:
    def test_deterministic_words(self):
        assert covariance_symbolic(WordSpec.plain(("a",)), WordSpec.plain(("b", "c"))).is_zero()

    def test_var_trace(self):
        w = W((1,), ("I",))
        assert covariance_symbolic(w, w) == 1

    def test_against_brute_force(self):
        w1, w2 = W((1, 1), ("a1", "a2")), W((1, -1), ("a3", "a4"))
        mats = random_matrices(4, ["a1", "a2", "a3", "a4"], 8)
        joint = brute_expectation(merge(w1, w2), mats)
        e1 = brute_expectation(w1, mats)
        e2 = brute_expectation(w2, mats)
        assert covariance_symbolic(w1, w2).evaluate(mats) == joint - e1 * e2
        assert covariance_symbolic(w1, w2, d=4).evaluate(mats) == joint - e1 * e2

    def test_intro_display(self):
        D = R.d_power
        got = covariance_symbolic(W((1, -1), ("a1", "a2")), W((1, -1), ("a3", "a4"))) * (1 + D(-1) - 2 * D(-2))
        want = (
            expr("a1", "a2", "a3", "a4", c=2 * D(-4))
            - expr("a1 a3", "a2", "a4", c=D(-3)) - expr("a1 a3^t", "a2", "a4", c=D(-3))
            - expr("a1", "a2 a4", "a3", c=D(-3)) - expr("a1", "a2 a4^t", "a3", c=D(-3))
            + expr("a1 a3", "a2 a4", c=D(-2) + D(-3)) + expr("a1 a3^t", "a2 a4^t", c=D(-2) + D(-3))
            - expr("a1 a3^t", "a2 a4", c=D(-3)) - expr("a1 a3", "a2 a4^t", c=D(-3))
        )
        assert got == want


class TestCumulants:
    def test_first_and_second(self):
        mats = random_matrices(4, ["a", "b", "c", "e"], 2)
        w1, w2 = W((1, -1), ("a", "b")), W((1, 1), ("c", "e"))
        assert exact_cumulant([w1], mats) == expected_trace_numeric(w1, mats)
        assert exact_cumulant([w1, w2], mats, 2) == covariance_symbolic(w1, w2).evaluate(mats)

    def test_third_cumulant_decays(self):
        blocks = {"a": [[1, 2], [0, -1]], "b": [[0, 1], [3, 0]]}

        def embedded(d):
            eye = np.identity(d // 2, dtype=int)
            return MatrixSet(d, {k: np.kron(eye, np.array(v)).tolist() for k, v in blocks.items()})

        w = W((1, 1), ("a", "b"))
        expr3 = cumulant_expression([w, w, w])
        vals = [abs(expr3.evaluate(embedded(d))) for d in (8, 16, 32)]
        assert vals[2] < vals[1] < vals[0]
        assert vals[2] <= Fraction(3, 5) * vals[1]

    def test_deterministic_third_cumulant(self):
        w = WordSpec.plain(("a",))
        mats = MatrixSet(2, {"a": [[1, 0], [0, 5]]})
        assert exact_cumulant([w, w, w], mats) == 0

    def test_numeric_matches_symbolic(self):
        ws = [W((1, -1), ("a", "b")), W((1,), ("a",)), W((-1,), ("b",))]
        mats = random_matrices(4, ["a", "b"], 6)
        assert exact_cumulant(ws, mats) == cumulant_expression(ws).evaluate(mats)

    def test_cap(self):
        w = W((1, -1, 1, -1), ("a", "b", "c", "e"))
        with pytest.raises(ValueError):
            cumulant_expression([w, w, w])


class TestParity:
    def test_examples(self):
        g = Permutation.from_cycles([(1, 2)])
        p = P([(1, 2)])
        assert parity_check(p, p, g, (1, -1))
        for n in (4, 6):
            g = Permutation.cycle_type([n])
            eps = tuple((-1) ** k for k in range(n))
            for p, q in product(enumerate_pairings(n), repeat=2):
                assert parity_check(p, q, g, eps)

    def test_two_cycles(self):
        g = Permutation.cycle_type([2, 4])
        eps = (1, -1, 1, -1, 1, -1)
        assert all(parity_check(p, q, g, eps) for p, q in product(enumerate_pairings(6), repeat=2))

    def test_preconditions(self):
        with pytest.raises(ValueError):
            parity_check(P([(1, 2)]), P([(1, 2)]), Permutation.identity(2), (1, -1))
        with pytest.raises(ValueError):
            parity_check(P([(1, 2)]), P([(1, 2)]), Permutation.from_cycles([(1, 2)]), (1, 1))
