import pytest

from ssdefect.curve import check_hyp1, minimal_model
from ssdefect.families import family_base, family_member, hesse_member, icosahedral_c4c6
from ssdefect.iwasawa import congruence_check


@pytest.mark.parametrize("p,D", [(3, 1), (3, -1), (5, 3), (5, 14)])
def test_t_zero_is_the_base(p, D):
    assert family_member(p, D, 0) == minimal_model(family_base(p, D))[0]


@pytest.mark.parametrize("p,D,t", [(3, 1, 1), (3, 1, 3), (3, -1, 2), (3, -1, 7), (5, 3, 1), (5, 3, 6), (5, 14, 8), (5, 14, -2)])
def test_members_share_the_residual_traces(p, D, t):
    v = congruence_check(family_base(p, D), family_member(p, D, t), p, bound=150)
    assert v.congruent, v.witness


def test_congruence_screen_detects_a_mismatch():
    from ssdefect.curve import WeierstrassCurve

    v = congruence_check(WeierstrassCurve.from_ainvs([-1, 0]), WeierstrassCurve.from_ainvs([3, 3]), 3)
    assert not v.congruent and v.witness == 7


@pytest.mark.parametrize("a,b,t", [(-1, 0, 2), (1, 0, 5), (2, 3, 1), (-4, 7, -3)])
def test_hesse_discriminant_divisible_by_the_new_factor(a, b, t):
    E = hesse_member(a, b, t)
    c = 27 * a * a * t**4 + 108 * b * t**3 - 18 * a * t * t - 1
    assert E.discriminant % c == 0


@pytest.mark.parametrize("D,t", [(3, 0), (3, 2), (14, 6), (-5, 1)])
def test_icosahedral_invariants_are_consistent(D, t):
    c4, c6 = icosahedral_c4c6(D, t)
    assert (c4**3 - c6**2) % 1728 == 0 and c4**3 != c6**2


@pytest.mark.parametrize("p,D,t", [(3, 1, 3), (3, -1, 5), (5, 3, 6), (5, 14, 8)])
def test_supersingular_members(p, D, t):
    assert check_hyp1(family_member(p, D, t), p).passed


@pytest.mark.parametrize("t,a3", [(1, -3), (2, 3)])
def test_congruent_member_can_fail_the_hypothesis(t, a3):
    v = check_hyp1(family_member(3, 1, t), 3)
    assert not v.passed and v.ap == a3


def test_unsupported_prime():
    with pytest.raises(ValueError):
        family_member(7, 1, 1)
    with pytest.raises(ValueError):
        family_base(2, 1)
