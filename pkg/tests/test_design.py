"""Tests for design construction, generators, reduction, and text I/O."""

import numpy as np
import pytest

from pooltest import (
    DesignFormatError,
    TestDesign,
    format_design,
    gen_bernoulli,
    gen_doubly_regular,
    gen_individual,
    new_design,
    parse_design,
    reduce_design,
    row_weights,
)

import helpers


class TestNewDesign:
    def test_basic_counts(self):
        d = new_design([{0, 1}, {2}], 3)
        assert d.T == 2
        assert d.weights == (2, 1)

    def test_empty_design_is_valid(self):
        d = new_design([], 5)
        assert d.T == 0
        assert d.n == 5

    def test_repeated_rows_allowed(self):
        d = new_design([{0}, {0}, {0}], 1)
        assert d.T == 3
        assert d.weights == (1, 1, 1)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            new_design([{3}], 3)
        with pytest.raises(ValueError):
            new_design([{-1}], 3)

    def test_zero_items_rejected(self):
        with pytest.raises(ValueError):
            new_design([], 0)

    def test_weights_match_popcounts(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            d = helpers.random_messy_design(rng, 8, 5)
            assert d.weights == tuple(m.bit_count() for m in d.row_masks)


class TestGenerators:
    def test_individual_is_identity(self):
        d = gen_individual(3)
        assert d.T == 3
        assert d.row_masks == (1, 2, 4)
        assert d.weights == (1, 1, 1)

    def test_individual_single_item(self):
        assert gen_individual(1).row_masks == (1,)

    def test_individual_rejects_zero(self):
        with pytest.raises(ValueError):
            gen_individual(0)

    def test_bernoulli_degenerate_zero(self):
        d = gen_bernoulli(6, 4, 0.0, seed=1)
        assert all(m == 0 for m in d.row_masks)

    def test_bernoulli_degenerate_one(self):
        d = gen_bernoulli(6, 4, 1.0, seed=1)
        assert d.weights == (6, 6, 6, 6)

    def test_bernoulli_deterministic(self):
        a = gen_bernoulli(100, 50, 0.1, seed=7)
        b = gen_bernoulli(100, 50, 0.1, seed=7)
        assert a == b
        assert a != gen_bernoulli(100, 50, 0.1, seed=8)

    def test_bernoulli_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            gen_bernoulli(5, 2, 1.5, seed=0)
        with pytest.raises(ValueError):
            gen_bernoulli(5, 2, -0.1, seed=0)

    def test_doubly_regular_forced_shape(self):
        d = gen_doubly_regular(6, 2, 3, seed=0)
        assert d.T == 4
        assert d.weights == (3, 3, 3, 3)
        col = [sum(m >> i & 1 for m in d.row_masks) for i in range(6)]
        assert col == [2] * 6

    def test_doubly_regular_single_test(self):
        d = gen_doubly_regular(4, 1, 4, seed=0)
        assert d.T == 1
        assert d.row_masks == (0b1111,)

    def test_doubly_regular_divisibility(self):
        with pytest.raises(ValueError):
            gen_doubly_regular(5, 2, 3, seed=0)

    def test_doubly_regular_deterministic(self):
        assert gen_doubly_regular(12, 3, 4, seed=5) == gen_doubly_regular(12, 3, 4, seed=5)

    @pytest.mark.parametrize("n,l,r", [(8, 2, 4), (12, 3, 4), (10, 4, 5), (9, 2, 3)])
    def test_doubly_regular_regularity(self, n, l, r):
        d = gen_doubly_regular(n, l, r, seed=11)
        assert d.T == n * l // r
        assert set(d.weights) == {r}
        assert all(sum(m >> i & 1 for m in d.row_masks) == l for i in range(n))


class TestRowWeights:
    def test_identity(self):
        assert row_weights(gen_individual(4)) == (1, 1, 1, 1)

    def test_all_ones(self):
        assert row_weights(new_design([{0, 1, 2}, {0, 1, 2}], 3)) == (3, 3)

    def test_mixed(self):
        assert row_weights(new_design([{0, 1}, set(), {0, 1, 2}], 3)) == (2, 0, 3)


class TestReduce:
    def test_hand_traced_example(self):
        d = new_design([set(), {0}, {0, 1, 2}], 3)
        reduced, log = reduce_design(d)
        assert reduced.n == 2
        assert reduced.row_masks == (0b11,)
        assert log.removed_empty_tests == (0,)
        assert log.resolved_items == ((0, 1),)
        assert log.item_map == (1, 2)
        assert log.test_map == (2,)

    def test_identity_reduces_to_nothing(self):
        reduced, log = reduce_design(gen_individual(3))
        assert reduced.T == 0 and reduced.n == 0
        assert log.resolved_items == ((0, 0), (1, 1), (2, 2))
        assert log.item_map == ()

    def test_already_reduced_untouched(self):
        d = new_design([{0, 1}, {1, 2}], 3)
        reduced, log = reduce_design(d)
        assert reduced == d
        assert log.removed_empty_tests == () and log.resolved_items == ()
        assert log.item_map == (0, 1, 2)

    def test_cascading_removals(self):
        # resolving item 0 drops test {0,1} to weight 1, which resolves item 1
        d = new_design([{0}, {0, 1}], 2)
        reduced, log = reduce_design(d)
        assert reduced.T == 0 and reduced.n == 0
        assert log.resolved_items == ((0, 0), (1, 1))

    def test_min_weight_after_reduce(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            d = helpers.random_messy_design(rng, 9, 7)
            reduced, _ = reduce_design(d)
            assert all(w >= 2 for w in reduced.weights)

    def test_idempotent(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            d = helpers.random_messy_design(rng, 8, 6)
            reduced, _ = reduce_design(d)
            again, log2 = reduce_design(reduced)
            assert again == reduced
            assert log2.resolved_items == () and log2.removed_empty_tests == ()

    def test_ratio_never_grows_when_t_below_n(self):
        rng = np.random.default_rng(5)
        checked = 0
        for _ in range(80):
            T = int(rng.integers(1, 8))
            n = int(rng.integers(T + 1, 11))
            d = helpers.random_messy_design(rng, n, T)
            reduced, _ = reduce_design(d)
            if reduced.n:
                assert reduced.T / reduced.n <= d.T / d.n + 1e-12
                checked += 1
        assert checked > 20

    def test_maps_are_injective(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            d = helpers.random_messy_design(rng, 8, 8)
            _, log = reduce_design(d)
            assert len(set(log.item_map)) == len(log.item_map)
            assert len(set(log.test_map)) == len(log.test_map)

    def test_lift_items(self):
        d = new_design([set(), {0}, {0, 1, 2}], 3)
        _, log = reduce_design(d)
        assert log.lift_items([0, 1]) == (1, 2)
        assert log.lift_items([1]) == (2,)


class TestTextFormat:
    def test_round_trip(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            d = helpers.random_messy_design(rng, 9, 5)
            assert parse_design(format_design(d)) == d

    def test_known_rendering(self):
        d = new_design([{0, 1}, {2}], 3)
        assert format_design(d) == "2 3\n110\n001\n"

    def test_comments_ignored(self):
        text = "# a comment\n2 3\n110\n# another\n001\n"
        assert parse_design(text) == new_design([{0, 1}, {2}], 3)

    def test_missing_rows(self):
        with pytest.raises(DesignFormatError):
            parse_design("2 3\n110\n")

    def test_bad_characters(self):
        with pytest.raises(DesignFormatError):
            parse_design("1 3\n1x0\n")

    def test_bad_row_length(self):
        with pytest.raises(DesignFormatError):
            parse_design("1 3\n11\n")

    def test_bad_header(self):
        with pytest.raises(DesignFormatError):
            parse_design("3\n")
        with pytest.raises(DesignFormatError):
            parse_design("1 0\n\n")

    def test_no_trailing_newline(self):
        assert parse_design("1 2\n10") == new_design([{0}], 2)


class TestDesignType:
    def test_hashable_and_immutable(self):
        d = new_design([{0}], 2)
        assert hash(d) == hash(new_design([{0}], 2))
        with pytest.raises(AttributeError):
            d.n = 3

    def test_mask_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            TestDesign(n=2, row_masks=(4,))
