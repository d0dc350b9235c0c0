"""Tests for Weyl group arithmetic."""

import pytest

from app.models.cartan import from_preset
from app.models.weyl import (
    apply_word,
    identity,
    inverse_word,
    is_reduced_word,
    length_and_reduce,
    prefix,
    simple_reflection,
    suffix_inverse,
)
from app.utils.error_handler import IndexOutOfRange


def _reduced_words(realization, max_length):
    """Every reduced word up to max_length, grown by non-descent letters."""
    words = [()]
    frontier = [()]
    for _ in range(max_length):
        grown = []
        for word in frontier:
            w = apply_word(realization, word)
            grown.extend(
                word + (i,) for i in range(1, realization.r + 1) if not w.is_right_descent(i)
            )
        words.extend(grown)
        frontier = grown
    return words


class TestWeylElement:
    """Test WeylElement operations."""

    def test_braid_relation_a2(self, a2):
        s1, s2 = simple_reflection(a2, 1), simple_reflection(a2, 2)

        assert s1 * s2 * s1 == s2 * s1 * s2
        assert (s1 * s1).is_identity()

    def test_braid_relation_b2(self, b2):
        s1, s2 = simple_reflection(b2, 1), simple_reflection(b2, 2)

        assert s1 * s2 * s1 * s2 == s2 * s1 * s2 * s1
        assert s1 * s2 * s1 != s2 * s1 * s2

    def test_reflection_action(self, a2):
        """s_1 sends α_1 = (2, -1) to -α_1."""
        assert simple_reflection(a2, 1).apply((2, -1)) == (-2, 1)
        assert simple_reflection(a2, 1).apply((0, 1)) == (0, 1)

    def test_inverse(self, a2):
        w = apply_word(a2, (1, 2))

        assert w.inverse() == apply_word(a2, (2, 1))
        assert (w * w.inverse()).is_identity()

    def test_descents(self, a2):
        w = apply_word(a2, (1, 2))

        assert w.is_right_descent(2)
        assert not w.is_right_descent(1)
        assert w.is_left_descent(1)
        assert not w.is_left_descent(2)

    def test_descent_letter_range(self, a2):
        with pytest.raises(IndexOutOfRange):
            identity(a2).is_right_descent(3)
        with pytest.raises(IndexOutOfRange):
            simple_reflection(a2, 0)
        with pytest.raises(IndexOutOfRange):
            simple_reflection(a2, 1.5)

    def test_extended_realization_acts_on_all_coordinates(self, a1_affine):
        w = simple_reflection(a1_affine, 1)

        assert w.mat.shape == (3, 3)
        assert (w * w).is_identity()


class TestLengthAndReduce:
    """Test lengths and canonical words."""

    @pytest.mark.parametrize("preset, longest", [("A2", 3), ("B2", 4), ("G2", 6)])
    def test_longest_elements(self, preset, longest):
        realization = from_preset(preset)
        word = tuple((1, 2) * longest)[:longest]
        w = apply_word(realization, word)

        assert w.length == longest
        assert is_reduced_word(realization, word)
        assert not is_reduced_word(realization, tuple((1, 2) * longest)[: longest + 1])

    def test_canonical_word_is_lexicographically_smallest(self, a2):
        assert apply_word(a2, (2, 1, 2)).word == (1, 2, 1)
        assert apply_word(a2, (2, 1)).word == (2, 1)

    def test_identity(self, a2):
        assert length_and_reduce(identity(a2)) == (0, ())

    def test_non_reduced_word_collapses(self, a2):
        assert apply_word(a2, (1, 2, 2, 1, 2)).word == (2,)

    def test_affine_words_keep_growing(self, a1_affine):
        """The affine Weyl group is infinite: alternating words stay reduced."""
        assert is_reduced_word(a1_affine, (1, 2, 1, 2, 1, 2))
        assert apply_word(a1_affine, (1, 2, 1, 2, 1)).length == 5
        assert not is_reduced_word(a1_affine, (1, 2, 2))


class TestFaithfulness:
    """Canonical words and matrices determine each other up to length 8."""

    @pytest.mark.parametrize("preset, elements", [("A2", 6), ("B2", 8), ("A1affine", 17)])
    def test_canonical_words_match_matrices(self, preset, elements):
        realization = from_preset(preset)
        canonical_of = {}
        matrix_of = {}
        for word in _reduced_words(realization, 8):
            w = apply_word(realization, word)
            length, canonical = length_and_reduce(w)

            assert length == len(word)
            assert canonical_of.setdefault(w.mat, canonical) == canonical
            assert matrix_of.setdefault(canonical, w.mat) == w.mat
            assert apply_word(realization, canonical) == w

        assert len(canonical_of) == len(matrix_of) == elements

    @pytest.mark.parametrize("preset", ["A2", "B2", "A1affine"])
    def test_reflection_changes_length_by_one(self, preset):
        """l(w s_i) = l(w) - 1 exactly at right descents, l(w) + 1 elsewhere."""
        realization = from_preset(preset)
        for word in _reduced_words(realization, 8):
            w = apply_word(realization, word)
            for i in range(1, realization.r + 1):
                step = (w * simple_reflection(realization, i)).length - w.length

                assert step == (-1 if w.is_right_descent(i) else 1)


class TestWordHelpers:
    """Test prefixes and suffixes of words."""

    def test_prefix(self, a2):
        assert prefix(a2, (1, 2, 1), 2) == apply_word(a2, (1, 2))
        assert prefix(a2, (1, 2, 1), 0).is_identity()

    def test_suffix_inverse(self, a2):
        """Letters after position 1 of (1, 2, 1), read backwards."""
        assert suffix_inverse(a2, (1, 2, 1), 1) == apply_word(a2, (1, 2))
        assert suffix_inverse(a2, (1, 2, 1), 3).is_identity()

    def test_inverse_word(self):
        assert inverse_word((1, 2, 3)) == (3, 2, 1)
