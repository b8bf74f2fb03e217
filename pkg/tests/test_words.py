import random

import pytest
from hypothesis import given, strategies as st

from flab.words import (
    FreeWord,
    WordSet,
    ball,
    ball_list,
    ball_size,
    check_ordering_condition,
    convex_hull,
    distance,
    extreme_points,
    failing_ordering_index,
    format_word,
    geodesic_interval,
    identity,
    inv,
    is_connected,
    mul,
    parse_word,
    radius_center,
    spiral_ordering,
    thicken,
)


def w(text, rank=2):
    return parse_word(text, rank)


def naive_reduce(letters):
    """Reduce-to-fixpoint oracle for products."""
    letters = list(letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(letters) - 1):
            if letters[i] == -letters[i + 1]:
                del letters[i : i + 2]
                changed = True
                break
    return tuple(letters)


words_st = st.lists(
    st.sampled_from([1, -1, 2, -2]), max_size=10
).map(lambda ls: FreeWord(2, ls))


class TestMul:
    def test_inverse_cancellation(self):
        a = w("a")
        assert mul(a, inv(a)) == identity(2)

    def test_one_step_reduction(self):
        assert mul(w("ab"), w("Ba")) == w("aa")

    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            mul(w("a", 2), w("a", 3))

    @given(words_st, words_st)
    def test_against_naive_reduction_oracle(self, a, b):
        prod = mul(a, b)
        assert prod.letters == naive_reduce(a.letters + b.letters)
        assert len(prod) <= len(a) + len(b)

    @given(words_st)
    def test_square_length(self, a):
        assert len(mul(a, a)) <= 2 * len(a)

    @given(words_st, words_st, words_st)
    def test_associative(self, a, b, c):
        assert mul(mul(a, b), c) == mul(a, mul(b, c))

    @given(words_st)
    def test_inverse(self, a):
        assert mul(a, inv(a)) == identity(2)
        assert mul(inv(a), a) == identity(2)


class TestMetric:
    @given(words_st, words_st)
    def test_symmetry(self, a, b):
        assert distance(a, b) == distance(b, a) == len(mul(inv(a), b))

    @given(words_st, words_st, words_st)
    def test_triangle(self, a, b, c):
        assert distance(a, c) <= distance(a, b) + distance(b, c)


class TestParse:
    def test_round_trip(self):
        for text in ["e", "a", "abA", "aBBa", "c" if False else "ab"]:
            assert format_word(parse_word(text, 2 if "c" not in text else 3)) == text

    def test_identity_forms(self):
        assert parse_word("", 2) == parse_word("e", 2) == identity(2)

    def test_unreduced_rejected(self):
        with pytest.raises(ValueError):
            parse_word("aA", 2)

    @given(words_st)
    def test_format_parse_inverse(self, a):
        assert parse_word(format_word(a), 2) == a


class TestBall:
    def test_radius_zero(self):
        b = ball(2, 0)
        assert len(b) == 1 and identity(2) in b

    def test_radius_one(self):
        b = ball(2, 1)
        assert len(b) == 5
        assert {format_word(x) for x in b} == {"e", "a", "A", "b", "B"}

    def test_tree_growth_counts(self):
        assert len(ball(2, 2)) == 17
        assert len(ball(2, 3)) == 53

    @pytest.mark.parametrize("rank", [2, 3])
    @pytest.mark.parametrize("n", range(6))
    def test_closed_form(self, rank, n):
        assert len(ball(rank, n)) == ball_size(rank, n)

    def test_all_reduced_and_within_radius(self):
        for v in ball(2, 3):
            assert len(v) <= 3


class TestGeodesic:
    def test_prefix_path(self):
        assert geodesic_interval(w("e"), w("ab")) == WordSet(2, [w("e"), w("a"), w("ab")])

    def test_through_identity(self):
        assert geodesic_interval(w("a"), w("b")) == WordSet(2, [w("a"), w("e"), w("b")])

    def test_single_point(self):
        assert geodesic_interval(w("ab"), w("ab")) == WordSet(2, [w("ab")])

    @given(words_st, words_st)
    def test_size_is_distance_plus_one(self, a, b):
        assert len(geodesic_interval(a, b)) == distance(a, b) + 1


def pairwise_hull_oracle(s):
    """Union of geodesics over all pairs: an independent hull oracle."""
    out = set()
    elems = list(s)
    for a in elems:
        for b in elems:
            out.update(geodesic_interval(a, b))
    return WordSet(s.rank, out)


class TestHull:
    def test_two_generators(self):
        got = convex_hull(WordSet(2, [w("a"), w("b")]))
        assert got == WordSet(2, [w("a"), w("e"), w("b")])

    def test_idempotent_on_connected(self):
        s = WordSet(2, [w("a"), w("e"), w("b")])
        assert convex_hull(s) == s

    def test_oracle_case(self):
        got = convex_hull(WordSet(2, [w("aa"), w("bb")]))
        assert got == WordSet(2, [w("aa"), w("a"), w("e"), w("b"), w("bb")])

    def test_error_on_empty(self):
        with pytest.raises(ValueError):
            convex_hull(WordSet(2, []))

    def test_against_pairwise_oracle_random(self):
        rng = random.Random(7)
        big = list(ball(2, 3))
        for _ in range(25):
            s = WordSet(2, rng.sample(big, rng.randint(1, 6)))
            got = convex_hull(s)
            assert got == pairwise_hull_oracle(s)
            assert is_connected(got)
            assert set(s) <= set(got)
            assert convex_hull(got) == got

    def test_monotone(self):
        rng = random.Random(11)
        big = list(ball(2, 3))
        for _ in range(10):
            sample = rng.sample(big, 5)
            small = WordSet(2, sample[:3])
            large = WordSet(2, sample)
            assert set(convex_hull(small)) <= set(convex_hull(large))


class TestExtremePoints:
    def test_tripod(self):
        s = WordSet(2, [w("a"), w("e"), w("b")])
        assert extreme_points(s) == WordSet(2, [w("a"), w("b")])

    def test_singleton_is_empty(self):
        assert len(extreme_points(WordSet(2, [w("ab")]))) == 0

    def test_hull_case(self):
        s = convex_hull(WordSet(2, [w("aa"), w("bb")]))
        assert extreme_points(s) == WordSet(2, [w("aa"), w("bb")])

    def test_hull_of_extremes_recovers_connected_set(self):
        rng = random.Random(3)
        big = list(ball(2, 3))
        for _ in range(25):
            s = convex_hull(WordSet(2, rng.sample(big, rng.randint(2, 6))))
            if len(s) < 2:
                continue
            assert convex_hull(extreme_points(s)) == s


class TestRadiusCenter:
    def test_tripod(self):
        rho, centers = radius_center(WordSet(2, [w("a"), w("e"), w("b")]))
        assert rho == 1 and w("e") in centers

    def test_singleton(self):
        rho, centers = radius_center(WordSet(2, [w("ab")]))
        assert rho == 0 and centers == WordSet(2, [w("ab")])

    def test_segment(self):
        rho, centers = radius_center(WordSet(2, [w("e"), w("a"), w("aa")]))
        assert rho == 1 and centers == WordSet(2, [w("a")])

    def test_exhaustive_oracle(self):
        rng = random.Random(5)
        big = list(ball(2, 2))
        for _ in range(20):
            s = WordSet(2, rng.sample(big, rng.randint(1, 5)))
            rho, centers = radius_center(s)
            # brute force over a generous candidate region
            candidates = thicken(convex_hull(s), 1)
            best = min(max(distance(c, v) for v in s) for c in candidates)
            assert rho == best
            for c in centers:
                assert max(distance(c, v) for v in s) == rho
            brute = {c for c in candidates if max(distance(c, v) for v in s) == rho}
            assert set(centers) == brute


class TestSpiralOrdering:
    def test_radius_one(self):
        order = spiral_ordering(2, 1)
        assert order[0] == identity(2)
        assert len(order) == 5

    def test_prefixes_connected(self):
        order = spiral_ordering(2, 2)
        assert len(order) == 17
        for k in range(1, len(order) + 1):
            assert is_connected(WordSet(2, order[:k]))

    def test_matches_ball(self):
        assert WordSet(2, spiral_ordering(2, 3)) == ball(2, 3)


class TestOrderingCondition:
    def test_singleton_hull(self):
        order = spiral_ordering(2, 2)
        assert check_ordering_condition(WordSet(2, [identity(2)]), order)

    def test_two_point_hull(self):
        hull = WordSet(2, [w("e"), w("A")])
        assert check_ordering_condition(hull, spiral_ordering(2, 2))

    def test_repeat_fails(self):
        order = [w("e"), w("a"), w("a")]
        assert failing_ordering_index(WordSet(2, [w("e")]), order) == 2

    def test_centered_hulls_pass_at_depth_three(self):
        # Cross-validation of the covering lemma on small cases: hulls
        # centered at the identity never get swallowed by earlier translates.
        for ws in [
            WordSet(2, [w("e")]),
            WordSet(2, [w("e"), w("a")]),
            WordSet(2, [w("A"), w("e"), w("a")]),
            WordSet(2, [w("e"), w("a"), w("b")]),
            WordSet(2, [w("B"), w("e"), w("a"), w("b")]),
        ]:
            assert check_ordering_condition(ws, spiral_ordering(2, 3))


class TestThicken:
    def test_ball_growth(self):
        assert thicken(WordSet(2, [identity(2)]), 2) == ball(2, 2)

    def test_contains_original(self):
        s = WordSet(2, [w("ab"), w("B")])
        assert set(s) <= set(thicken(s, 1))
