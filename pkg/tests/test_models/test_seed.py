"""Tests for double words, word seeds and ensemble matrices."""

import pytest
import sympy as sp

from app.models.cartan import from_preset
from app.models.seed import (
    Seed,
    build_ensemble,
    build_seed,
    empty_word,
    exchange_entry,
    frozen_shift,
    parse_double_word,
    parse_letters,
)
from app.models.weyl import apply_word, identity
from app.utils.error_handler import BadShape, IndexOutOfRange, NotReduced


class TestDoubleWord:
    """Test index conventions on the affine A1 example."""

    def test_index_set(self, example_word):
        assert example_word.m == 4
        assert example_word.index_set == (-3, -2, -1, 1, 2, 3, 4)
        assert example_word.negative_word == (1, 2)
        assert example_word.positive_word == (1, 2)

    def test_weights_and_signs(self, example_word):
        assert [example_word.weight(k) for k in (-3, -2, -1, 1, 2, 3, 4)] == [3, 2, 1, 1, 2, 1, 2]
        assert [example_word.epsilon(k) for k in (-1, 1, 2, 3, 4)] == [-1, -1, -1, 1, 1]
        assert example_word.weight(7) == 3
        assert example_word.epsilon(5) == 1
        with pytest.raises(IndexOutOfRange):
            example_word.weight(8)

    def test_successors(self, example_word):
        assert example_word.successor(-1) == 1
        assert example_word.successor(-2) == 2
        assert example_word.successor(1) == 3
        assert example_word.successor(3) == 5
        assert example_word.successor(-3) == 5
        assert example_word.slot_successor(-3) == 7
        assert example_word.slot_successor(4) == 6

    def test_frozen(self, example_word):
        frozen = [k for k in example_word.index_set if example_word.is_frozen(k)]

        assert frozen == [-3, -2, -1, 3, 4]

    def test_minor_labels(self, example_word, a1_affine):
        """u_{<=k} collects negative letters, v_{>k} inverts the positive tail."""
        assert example_word.u_upto(2) == apply_word(a1_affine, (1, 2))
        assert example_word.u_upto(-1) == identity(a1_affine)
        assert example_word.v_after(2) == apply_word(a1_affine, (2, 1))
        assert example_word.v_after(-1) == example_word.v.inverse()
        assert example_word.v_after(4) == identity(a1_affine)
        assert len(example_word.a_minor_labels()) == 7

    def test_to_dict(self, example_word):
        data = example_word.to_dict()

        assert data["letters"] == [-1, -2, 1, 2]
        assert data["u"] == [1, 2]
        assert data["I"] == [-3, -2, -1, 1, 2, 3, 4]


class TestParseDoubleWord:
    """Test double word validation."""

    def test_parse_letters(self):
        assert parse_letters("-1,-2,1,2") == (-1, -2, 1, 2)
        assert parse_letters(" ") == ()
        with pytest.raises(BadShape):
            parse_letters("1,a")

    @pytest.mark.parametrize("letters", [(0,), (3,), (-3, 1)])
    def test_letter_range(self, a2, letters):
        with pytest.raises(IndexOutOfRange):
            parse_double_word(a2, letters)

    def test_positive_side_not_reduced(self, a2):
        with pytest.raises(NotReduced) as excinfo:
            parse_double_word(a2, (1, -2, 1))

        assert excinfo.value.side == "positive"

    def test_negative_side_checked_first(self, a2):
        with pytest.raises(NotReduced) as excinfo:
            parse_double_word(a2, (-1, 1, -1, 1))

        assert excinfo.value.side == "negative"

    def test_shuffles_are_accepted(self, a2):
        word = parse_double_word(a2, (1, -1, 2, -2, 1))

        assert word.u.word == (1, 2)
        assert word.v.word == (1, 2, 1)


class TestWordSeed:
    """Test the exchange matrix of a word seed."""

    def test_example_exchange_matrix(self, example_word, example_data):
        seed = build_seed(example_word)

        assert seed.indices == tuple(example_data["I"])
        assert seed.B == example_data["B"]
        assert seed.unfrozen == tuple(example_data["unfrozen"])
        assert seed.d == (1,) * 7

    def test_single_entries(self, example_word):
        assert exchange_entry(example_word, -3, 1) == 1
        assert exchange_entry(example_word, -3, -1) == sp.Rational(-1, 2)
        assert exchange_entry(example_word, 1, -2) == 2
        assert exchange_entry(example_word, 2, 3) == 2

    def test_sl2_word(self, sl2):
        seed = build_seed(parse_double_word(sl2, (-1, 1)))

        assert seed.B == sp.Matrix([[0, 1, 0], [-1, 0, -1], [0, 1, 0]])
        assert seed.unfrozen == (1,)

    def test_invariants_hold(self, example_word, b2, g2):
        assert build_seed(example_word).invariant_violations() == []
        assert build_seed(parse_double_word(b2, (-1, 2, -2, 1))).invariant_violations() == []
        assert build_seed(parse_double_word(g2, (1, -2, 2, -1, 1))).invariant_violations() == []

    def test_a2_exchange_matrix_by_hand(self, a2):
        """Entries of (1, -1, 2, -2) worked out bracket by bracket, I = (-2, -1, 1, 2, 3, 4)."""
        half = sp.Rational(1, 2)
        expected = sp.Matrix(
            [
                [0, -half, 1, 0, -1, 0],
                [half, 0, -1, 0, 0, 0],
                [-1, 1, 0, 1, 0, 0],
                [0, 0, -1, 0, 1, -half],
                [1, 0, 0, -1, 0, 1],
                [0, 0, 0, half, -1, 0],
            ]
        )

        seed = build_seed(parse_double_word(a2, (1, -1, 2, -2)))

        assert seed.B == expected
        assert seed.unfrozen == (1, 3)

    @pytest.mark.parametrize(
        "preset, letters, position",
        [
            ("A2", (1, -2), 1),
            ("A2", (1, -1, 2, -2), 2),
            ("B2", (-1, 2, -2, 1), 1),
            ("A1affine", (-1, -2, 1, 2), 2),
        ],
    )
    def test_commuting_letters_swap(self, preset, letters, position):
        """Swapping adjacent letters of opposite sign and different weight only relabels B."""
        realization = from_preset(preset)
        swapped = list(letters)
        swapped[position - 1], swapped[position] = swapped[position], swapped[position - 1]
        seed = build_seed(parse_double_word(realization, letters))
        other = build_seed(parse_double_word(realization, swapped))

        relabel = {position: position + 1, position + 1: position}
        rows = [other.position(relabel.get(k, k)) for k in seed.indices]

        assert other.B.extract(rows, rows) == seed.B
        assert [other.weights[row] for row in rows] == list(seed.weights)

    def test_symmetrizer_weights(self, b2):
        seed = build_seed(parse_double_word(b2, (1, 2)))

        assert seed.weights == (2, 1, 1, 2)
        assert seed.d == (2, 1, 1, 2)


class TestSeed:
    """Test generic seeds."""

    def test_from_matrix_defaults(self):
        seed = Seed.from_matrix([[0, 1], [-1, 0]])

        assert seed.indices == (1, 2)
        assert seed.unfrozen == (1, 2)
        assert seed.b(1, 2) == 1
        assert seed.invariant_violations() == []

    def test_half_integer_outside_frozen_block(self):
        seed = Seed.from_matrix([[0, sp.Rational(1, 2)], [sp.Rational(-1, 2), 0]])

        problems = seed.invariant_violations()
        assert any("non-integral" in p for p in problems)

    def test_not_skew_symmetrizable(self):
        seed = Seed.from_matrix([[0, 1], [1, 0]])

        assert any("skew" in p for p in seed.invariant_violations())

    def test_size_mismatch(self):
        with pytest.raises(BadShape):
            Seed((1, 2), (False,), (0, 0), sp.ImmutableMatrix([[0, 1], [-1, 0]]), (1, 1))

    def test_unknown_index(self):
        with pytest.raises(IndexOutOfRange):
            Seed.from_matrix([[0]]).position(5)


class TestEnsembleMatrices:
    """Test M and B~ = B + M."""

    def test_example_matrices(self, example_word, example_data):
        ensemble = build_ensemble(example_word)

        assert ensemble.M == example_data["M"]
        assert ensemble.Btilde == example_data["Btilde"]
        assert abs(ensemble.det) == example_data["abs_det_btilde"]

    def test_sl2_word_determinant(self, sl2):
        ensemble = build_ensemble(parse_double_word(sl2, (-1, 1)))

        assert abs(ensemble.det) == 2

    def test_sl2_single_letter(self, sl2):
        ensemble = build_ensemble(parse_double_word(sl2, (1,)))

        assert ensemble.Btilde == sp.Matrix([[1, -1], [1, 1]])

    def test_empty_word_gives_cartan_matrix(self, a2):
        """With no letters every index is frozen and B~ = Cfull."""
        word = empty_word(a2)

        assert build_seed(word).B == sp.zeros(2, 2)
        assert frozen_shift(word) == sp.Matrix([[2, -1], [-1, 2]])
        assert build_ensemble(word).det == 3

    def test_to_dict(self, example_word):
        data = build_ensemble(example_word).to_dict()

        assert data["detBtilde"] in ([2, 1], [-2, 1])
        assert data["Btilde"][0][3] == [1, 1]
