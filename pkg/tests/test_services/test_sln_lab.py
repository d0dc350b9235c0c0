"""Tests for the exact SL_n constructions and identity checks."""

import pytest
import sympy as sp

from app.models.group_point import GroupPoint
from app.models.seed import parse_double_word
from app.services.sln_lab import (
    build_t_param,
    build_x_param,
    coroot,
    coweight_torus,
    elem,
    gauss,
    in_double_cell,
    involution,
    involution_self_test,
    minor,
    pi_plus,
    random_sl_point,
    twist,
    verify_coweight_param,
    verify_gendetid,
    verify_group_fact,
    verify_newlem,
    verify_thm_main,
    verify_twist_inverse,
    verify_twist_zero,
    verify_uni_fact,
    verify_x_to_a,
    weyl_rep,
)
from app.utils.error_handler import (
    BadShape,
    IndexOutOfRange,
    NotInCell,
    NotInG0,
    NotReduced,
    PreconditionViolated,
)
from app.utils.sampling import trial_rng

R = sp.Rational


@pytest.fixture
def sample_point():
    return GroupPoint(2, sp.ImmutableMatrix([[2, 1], [1, 1]]))


class TestGenerators:
    """Test x_{±i}, coroots, coweights and Weyl representatives."""

    def test_elem(self):
        assert elem(3, 1, 5).mat == sp.Matrix([[1, 5, 0], [0, 1, 0], [0, 0, 1]])
        assert elem(3, -2, 5).mat == sp.Matrix([[1, 0, 0], [0, 1, 0], [0, 5, 1]])

    def test_elem_index_range(self):
        with pytest.raises(IndexOutOfRange):
            elem(3, 3, 1)
        with pytest.raises(IndexOutOfRange):
            elem(3, 0, 1)

    def test_coroot(self):
        assert coroot(2, 1, 2).mat == sp.diag(2, R(1, 2))

        with pytest.raises(PreconditionViolated):
            coroot(2, 1, 0)

    def test_coweight_torus_is_adjoint(self):
        point = coweight_torus(3, 2, 5)

        assert point.adjoint
        assert point.mat == sp.diag(5, 5, 1)

    def test_weyl_representatives(self):
        assert weyl_rep(2, (1,)).mat == sp.Matrix([[0, -1], [1, 0]])
        assert weyl_rep(2, (1,), "doublebar").mat == sp.Matrix([[0, 1], [-1, 0]])

    def test_bar_matches_generator_product(self):
        product = elem(2, 1, -1) * elem(2, -1, 1) * elem(2, 1, -1)

        assert product.mat == weyl_rep(2, (1,)).mat

    def test_braid_relation(self):
        assert weyl_rep(3, (1, 2, 1)).mat == weyl_rep(3, (2, 1, 2)).mat

    def test_unknown_representative(self):
        with pytest.raises(BadShape):
            weyl_rep(2, (1,), "tilde")


class TestGauss:
    """Test the exact LDU decomposition and minors."""

    def test_decomposition(self, sample_point):
        parts = gauss(sample_point)

        assert parts.lower == sp.Matrix([[1, 0], [R(1, 2), 1]])
        assert parts.diagonal == sp.diag(2, R(1, 2))
        assert parts.upper == sp.Matrix([[1, R(1, 2)], [0, 1]])
        assert parts.product() == sample_point.mat

    def test_not_in_g0(self):
        with pytest.raises(NotInG0) as excinfo:
            gauss(sp.Matrix([[0, 1], [-1, 0]]))
        assert excinfo.value.minor_index == 1

    def test_minors(self, sample_point):
        assert minor(sample_point, 1) == 2
        assert minor(sample_point, 1, (1,), ()) == 1

        with pytest.raises(IndexOutOfRange):
            minor(sample_point, 2)

    def test_pi_plus_trivial_word(self, sample_point):
        assert pi_plus((), sample_point).mat == gauss(sample_point).lower

    def test_random_point_has_gauss_decomposition(self):
        point = random_sl_point(3, trial_rng(0, 0), 10)

        assert point.mat.det() == 1
        assert gauss(point).product() == point.mat


class TestInvolutions:
    def test_theta_swaps_generators(self):
        assert involution(elem(2, 1, 3), "theta").mat == elem(2, -1, 3).mat

    def test_sigma(self):
        assert involution(elem(2, 1, 3), "sigma").mat == elem(2, -1, -3).mat

    def test_self_test(self):
        report = involution_self_test(3, R(2, 7))

        assert report.passed, report.witness
        assert report.instance == {"n": 3, "t": [2, 7]}

    def test_unknown_involution(self, sample_point):
        with pytest.raises(BadShape):
            involution(sample_point, "tau")


class TestTwist:
    """Test ζ^{u,v} on SL_2 with u = e, v = s_1."""

    def test_twist_value(self):
        image = twist((), (1,), elem(2, 1, 3))

        assert image.mat == sp.Matrix([[R(1, 3), 1], [0, 3]])

    def test_twist_zero(self):
        assert verify_twist_zero((), (1,), elem(2, 1, 3)).passed

    def test_twist_inverse(self):
        report = verify_twist_inverse((), (1,), elem(2, 1, 3))

        assert report.passed
        assert report.instance == {"n": 2, "u": [], "v": [1]}

    def test_outside_cell(self):
        with pytest.raises(NotInCell):
            twist((1,), (), GroupPoint.identity(2))

    def test_in_double_cell(self):
        assert in_double_cell((), (), GroupPoint.identity(2))
        assert not in_double_cell((1,), (), GroupPoint.identity(2))


class TestWordParametrizations:
    """Test the theorem, the X-to-A formula and the coweight parametrization."""

    def test_t_param_sl2(self, sl2):
        word = parse_double_word(sl2, (1,))

        assert build_t_param(word, [2, 3]).mat == sp.Matrix([[3, R(2, 3)], [0, R(1, 3)]])

    def test_t_param_arity(self, sl2):
        with pytest.raises(BadShape):
            build_t_param(parse_double_word(sl2, (1,)), [2])

    def test_type_a_only(self, example_word):
        with pytest.raises(PreconditionViolated):
            build_t_param(example_word, [1] * 7)

    def test_thm_main_sl2(self, sl2):
        report = verify_thm_main(parse_double_word(sl2, (1,)), [2, 3])

        assert report.passed, report.witness
        assert report.instance["t"] == [[2, 1], [3, 1]]

    @pytest.mark.parametrize("letters", [(1, 2), (1, 2, 1)])
    def test_thm_main_sl3(self, sl3, letters):
        word = parse_double_word(sl3, letters)
        t = [R(k + 2, k + 1) for k in range(word.m + word.rtilde)]

        assert verify_thm_main(word, t).passed

    def test_x_to_a_sl3(self, sl3):
        report = verify_x_to_a(parse_double_word(sl3, (1, 2)), [2, 3, 5, 7])

        assert report.passed, report.witness

    def test_coweight_param_sl2(self, sl2):
        word = parse_double_word(sl2, (1,))
        X = {-1: R(3), 1: R(2, 5)}

        assert build_x_param(word, X).adjoint
        assert verify_coweight_param(word, X).passed


class TestNewlem:
    @pytest.mark.parametrize("k", [0, 1])
    def test_minus_statement(self, sl2, k):
        word = parse_double_word(sl2, (-1, 1))

        assert verify_newlem(word, [2, 3, 5], k, 1, "minus").passed

    @pytest.mark.parametrize("k", [1, 2])
    def test_plus_statement(self, sl2, k):
        word = parse_double_word(sl2, (-1, 1))

        report = verify_newlem(word, [2, 3, 5], k, 1, "plus")
        assert report.passed
        assert report.instance["statement"] == "plus"

    def test_position_range(self, sl2):
        with pytest.raises(IndexOutOfRange):
            verify_newlem(parse_double_word(sl2, (-1, 1)), [2, 3, 5], 2, 1, "minus")


class TestFactorizations:
    def test_group_fact(self):
        report = verify_group_fact(3, (1, 2), [2, 3])

        assert report.passed, report.witness
        assert report.witness["recovered"] == [[2, 1], [3, 1]]

    def test_uni_fact(self):
        assert verify_uni_fact(3, (1, 2, 1), [2, R(1, 3), 5]).passed

    def test_non_reduced_word(self):
        with pytest.raises(NotReduced):
            verify_group_fact(3, (1, 1), [2, 3])


class TestGendetid:
    @pytest.mark.parametrize(
        "n,u,v,i",
        [(3, (), (), 1), (3, (1,), (), 2), (4, (1,), (3,), 2), (4, (2,), (3,), 1)],
    )
    def test_identity_holds(self, n, u, v, i):
        report = verify_gendetid(n, u, v, i, trials=3, rng_seed=11)

        assert report.passed, report.witness

    def test_length_precondition(self):
        with pytest.raises(PreconditionViolated):
            verify_gendetid(4, (2,), (3,), 2, trials=1, rng_seed=0)
