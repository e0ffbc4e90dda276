from fractions import Fraction
from itertools import permutations, product

import pytest

from orthowg.asymptotics import (
    NOT_SPOKE,
    REVERSED,
    STANDARD,
    DegreeAssignment,
    LimitDistribution,
    asymptotic_degree,
    limit_cov_powers,
    limit_covariance_spoke,
    limit_part,
    maximal_connectivity_holds,
    phi_o,
    second_order_free_cov,
    spoke_classify,
)
from orthowg.combinatorics import Pairing, Permutation, enumerate_pairings
from orthowg.polynomial import RationalFunctionD as R
from orthowg.trace_calculus import (
    MatrixSet,
    Symbol,
    TraceExpression,
    TraceMonomial,
    WordSpec,
    covariance_symbolic,
    expected_trace_symbolic,
)

P = Pairing.from_pairs
W = WordSpec.single
S = Symbol


def expr(*words, c=1):
    return TraceExpression({TraceMonomial([tuple(S(x) for x in w.split()) for w in words]): c})


def names(prefix, m):
    return [f"{prefix}{i}" for i in range(1, m + 1)]


class TestLimitDistribution:
    def test_transpose_closure(self):
        phi = LimitDistribution({(S("a"), S("b", True)): 3})
        assert phi((S("b"), S("a", True))) == 3
        assert phi((S("a", True), S("b"))) == 3
        assert phi("I") == 1

    def test_inconsistent_table(self):
        with pytest.raises(ValueError):
            LimitDistribution({(S("a"), S("b", True)): 3, (S("b"), S("a", True)): 4})
        with pytest.raises(ValueError):
            LimitDistribution({(): 2})

    def test_missing(self):
        with pytest.raises(KeyError):
            LimitDistribution({})("a")

    def test_phi2_symmetric(self):
        phi = LimitDistribution({}, {("a", "b"): 5})
        assert phi.phi2("b", "a") == 5

    def test_haar_moments(self):
        assert [phi_o(j) for j in (-2, -1, 0, 1, 2)] == [0, 0, 1, 0, 0]


class TestDegree:
    def test_examples(self):
        e = expr("a1", "a2", c=R.d_power(-1))
        assert asymptotic_degree(e, DegreeAssignment({"a1"})) == float("-inf")
        assert asymptotic_degree(expr("a1 a2", c=R.d_power(-1))) == 0
        assert asymptotic_degree(TraceExpression()) == float("-inf")

    def test_validate(self):
        with pytest.raises(ValueError):
            DegreeAssignment({"z"}).validate({"a"})

    def test_numeric_coefficients_rejected(self):
        with pytest.raises(TypeError):
            asymptotic_degree(TraceExpression({TraceMonomial([(S("a"),)]): Fraction(1)}))

    def test_limit_part(self):
        e = expr("a", "b", c=R((1, 2), (0, 0, 1))) + expr("a b", c=R.d_power(-2))
        assert limit_part(e, degree=1) == expr("a", "b", c=2)
        assert limit_part(e, degree=0).is_zero()

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_alternating_centred_bound(self, n):
        eps = tuple((-1) ** k for k in range(n))
        spec = W(eps, names("a", n))
        asg = DegreeAssignment(set(names("a", n)))
        assert asymptotic_degree(expected_trace_symbolic(spec), asg) <= 0

    def test_uncentred_reaches_degree_one(self):
        spec = W((1, -1), ("a", "b"))
        assert asymptotic_degree(expected_trace_symbolic(spec)) == 1


class TestSpokeClassify:
    def test_examples(self):
        p = P([(1, 3), (2, 4)])
        assert spoke_classify(p, (1, 1, 1, 1)).kind == REVERSED
        assert spoke_classify(p, (1, 1, 1, 1)).l == 4
        assert spoke_classify(p, (1, 1, -1, -1)).kind == STANDARD
        assert spoke_classify(P([(1, 2), (3, 4)]), (1, 1, 1, 1)).kind == NOT_SPOKE

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_lemma_conclusions(self, m):
        for p in enumerate_pairings(2 * m):
            for eps in product((1, -1), repeat=2 * m):
                res = spoke_classify(p, eps)
                if res.kind != NOT_SPOKE:
                    assert all(res.checks.values()), (p, eps, res)

    def test_spokes_are_classified(self):
        # every pairing of the right cycle form with admissible signs is a spoke
        from orthowg.combinatorics import enumerate_spokes

        m = 3
        for p in enumerate_spokes(m):
            assert spoke_classify(p, (1,) * m + (-1,) * m).kind == STANDARD
        for p in enumerate_spokes(m, reversed=True):
            assert spoke_classify(p, (1,) * 2 * m).kind == REVERSED

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            spoke_classify(P([(1, 2), (3, 4)]), (1, 1, 1, 1), (1, 2))


class TestMaximalConnectivity:
    @pytest.mark.parametrize("n", [2, 4])
    def test_all_gamma(self, n):
        pairings = list(enumerate_pairings(n))
        for images in permutations(range(1, n + 1)):
            g = Permutation(images)
            for eps in product((1, -1), repeat=n):
                assert all(maximal_connectivity_holds(p, g, eps) for p in pairings)

    def test_per_cycle_type_n6(self):
        from orthowg.verify import maximal_connectivity_failures

        bad, count = maximal_connectivity_failures(6)
        assert bad == [] and count > 0


class TestLimitCovarianceSpoke:
    def test_unequal_lengths(self):
        phi = LimitDistribution(lambda w: 1)
        assert limit_covariance_spoke(phi, (1, 1), (1,)) == 0

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_all_ones(self, m):
        phi = LimitDistribution(lambda w: 1)
        assert limit_covariance_spoke(phi, (1,) * m, (-1,) * m) == m
        assert limit_covariance_spoke(phi, (1,) * m, (1,) * m) == m

    def test_zero_exponent(self):
        with pytest.raises(ValueError):
            limit_covariance_spoke(LimitDistribution(lambda w: 1), (0,), (1,))

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_matches_engine_limit(self, m):
        phi = LimitDistribution.symbolic()
        asg = DegreeAssignment(set(names("a", m)) | set(names("b", m)))
        for eps in product((1, -1), repeat=2 * m):
            k, l = eps[:m], eps[m:]
            cov = covariance_symbolic(W(k, names("a", m)), W(l, names("b", m)))
            assert asymptotic_degree(cov, asg) <= 0
            spoke = limit_covariance_spoke(phi, k, l)
            if not isinstance(spoke, TraceExpression):
                spoke = TraceExpression.scalar(spoke)
            assert limit_part(cov, asg) == spoke.map_coefficients(Fraction)

    def test_numeric_phi(self):
        # k = l = (1, -1): one standard term phi(a1 b1) phi(a2 b2), one reversed
        # term phi(a1 b1^t) phi(a2 b2^t)
        table = {("a1", "b1"): 2, ("a2", "b2"): 3, ("a1", "b1^t"): 5, ("a2", "b2^t"): 7}
        phi = LimitDistribution({(S(x), S(y[:2], y.endswith("^t"))): v for (x, y), v in table.items()})
        assert limit_covariance_spoke(phi, (1, -1), (1, -1)) == 2 * 3 + 5 * 7

    def test_missing_phi(self):
        with pytest.raises(KeyError):
            limit_covariance_spoke(LimitDistribution({}), (1,), (-1,))


class TestSecondOrderFreeCov:
    def test_examples(self):
        assert second_order_free_cov({}, {}, 1) == 0
        zero = lambda i, j: 0  # noqa: E731
        assert second_order_free_cov(zero, zero, 3) == 0
        ab = lambda i, j: 1 if i == j else 0  # noqa: E731
        assert second_order_free_cov(ab, zero, 2) == 1
        assert second_order_free_cov(ab, zero, 2, literal=True) == 1

    def test_forms_differ_in_cross_terms(self):
        one = lambda i, j: 1  # noqa: E731
        assert second_order_free_cov(one, one, 2) == 4
        assert second_order_free_cov(one, one, 2, literal=True) == 8

    def test_missing_input(self):
        with pytest.raises(KeyError):
            second_order_free_cov({(1, 1): 1}, {}, 2)

    def test_same_subalgebra_n1(self):
        with pytest.raises(ValueError):
            second_order_free_cov({}, {}, 1, same_subalgebra=True)


class TestPowerCovariance:
    def test_unequal(self):
        assert limit_cov_powers(1, 2)["engine_value"] == 0
        assert limit_cov_powers(-3, 2)["engine_value"] == 0

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_enumeration_counts(self, m):
        for n in (m, -m):
            res = limit_cov_powers(m, n)
            assert res["engine_value"] == m
            assert res["published_value"] == 2 * m

    def test_exact_variance_of_trace(self):
        w = W((1,), ("I",))
        for d in range(2, 9):
            assert covariance_symbolic(w, w, d).evaluate(MatrixSet(d, {})) == 1

    def test_zero_power(self):
        with pytest.raises(ValueError):
            limit_cov_powers(0, 1)
