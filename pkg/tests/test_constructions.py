import math
from fractions import Fraction

import pytest

from labparts.core import (
    InvalidInput,
    check_chasles,
    check_equivariance,
    dist,
    energy_to_dist,
    pair_energy,
    q_energy,
    sep,
)
from labparts.constructions import (
    SumFactors,
    averaging_eta,
    direct_sum_space,
    group_naive_space,
    naive_space,
    product_action,
    product_space,
    proper_sum_basepoint,
    proper_sum_space,
    pullback,
    quotient_average,
    weighted_naive_space,
    weighted_naive_sum_space,
)
from labparts.groups import DirectSumGroup, FiniteGroup
from labparts.walls import walls_to_labelled, z_line_walls_space, zn_half_space_walls


# ---------------------------------------------------------------------------
# naive families


@pytest.mark.parametrize("q", [1, 2, 3])
def test_naive_metric_is_discrete(q):
    space = naive_space(range(5), q)
    for x in range(5):
        for y in range(5):
            expected = Fraction(0 if x == y else 1)
            assert pair_energy(space, x, y) == expected
            assert dist(space, x, y) == float(x != y)


def test_weighted_naive_energy():
    space = weighted_naive_space(range(3), 3, 2)
    assert pair_energy(space, 0, 1) == 9
    zero = weighted_naive_space(range(3), 0, 2)
    assert pair_energy(zero, 0, 1) == 0
    with pytest.raises(InvalidInput):
        weighted_naive_space(range(3), -1, 2)


def test_naive_group_translation(rng):
    z6 = FiniteGroup.cyclic(6)
    space, action = group_naive_space(z6, 2)
    samples = [(rng.randrange(6), rng.randrange(6), rng.randrange(6)) for _ in range(120)]
    assert check_equivariance(space, action, samples).passed


# ---------------------------------------------------------------------------
# pull-backs


def test_pullback_preserves_distances_exactly(rng):
    target, _ = z_line_walls_space(2)
    doubled = pullback(lambda y: (2 * y[0],), target, target.universe)
    for _ in range(60):
        a, b = rng.randrange(-6, 7), rng.randrange(-6, 7)
        assert pair_energy(doubled, (a,), (b,)) == pair_energy(target, (2 * a,), (2 * b,))
    assert pair_energy(doubled, (0,), (3,)) == 6


# ---------------------------------------------------------------------------
# products


def test_product_energy_additivity(rng):
    f1 = naive_space(range(4), 2)
    f2 = walls_to_labelled(zn_half_space_walls(1), 2)
    f3 = weighted_naive_space(range(3), 2, 2)
    space = product_space([f1, f2, f3], 2)
    for _ in range(100):
        x = (rng.randrange(4), (rng.randrange(-5, 6),), rng.randrange(3))
        y = (rng.randrange(4), (rng.randrange(-5, 6),), rng.randrange(3))
        total = pair_energy(space, x, y)
        parts = (
            pair_energy(f1, x[0], y[0])
            + pair_energy(f2, x[1], y[1])
            + pair_energy(f3, x[2], y[2])
        )
        assert total == parts


def test_product_requires_matching_exponent():
    with pytest.raises(InvalidInput):
        product_space([naive_space(range(2), 1), naive_space(range(2), 2)], 2)


def test_two_naive_factors_distance_sqrt2():
    space = product_space([naive_space(range(2), 2), naive_space(range(2), 2)], 2)
    assert pair_energy(space, (0, 0), (1, 1)) == 2
    assert math.isclose(dist(space, (0, 0), (1, 1)), math.sqrt(2), rel_tol=1e-12)
    assert pair_energy(space, (1, 0), (1, 0)) == 0


def test_product_action_coordinatewise(rng):
    z2, z3 = FiniteGroup.cyclic(2), FiniteGroup.cyclic(3)
    s1, a1 = group_naive_space(z2, 2)
    s2, a2 = group_naive_space(z3, 2)
    space, action = product_action([s1, s2], [a1, a2], 2)
    samples = []
    for _ in range(100):
        g = (rng.randrange(2), rng.randrange(3))
        x = (rng.randrange(2), rng.randrange(3))
        y = (rng.randrange(2), rng.randrange(3))
        samples.append((g, x, y))
    assert check_equivariance(space, action, samples).passed
    # factorwise distance of a translated point
    g = (1, 2)
    x = (0, 0)
    assert pair_energy(space, action.point_map(g, x), x) == 2


# ---------------------------------------------------------------------------
# weighted naive sums and the proper sum


def phi_abs(i):
    return Fraction(1 + abs(i))


def test_weighted_naive_sum_energies_all_elements():
    group = DirectSumGroup(FiniteGroup.cyclic(2), range(-3, 4))
    space, _ = weighted_naive_sum_space(group, phi_abs, 2)
    for w in group.elements():
        expected = sum(phi_abs(i) ** 2 for i in group.support(w))
        assert pair_energy(space, w, group.identity) == expected


def test_weighted_naive_sum_spec_example():
    group = DirectSumGroup(FiniteGroup.cyclic(2), range(-3, 4))
    space, _ = weighted_naive_sum_space(group, phi_abs, 2)
    w = group.mul(group.delta(-1, 1), group.delta(2, 1))
    assert pair_energy(space, w, group.identity) == 13


def test_weighted_naive_sum_general_pairs(rng):
    group = DirectSumGroup(FiniteGroup.cyclic(3), range(-2, 3))
    space, action = weighted_naive_sum_space(group, phi_abs, 2)
    elements = list(group.elements())
    for _ in range(80):
        w, wp = rng.choice(elements), rng.choice(elements)
        expected = sum(phi_abs(i) ** 2 for i in group.support(group.mul(group.inv(w), wp)))
        assert pair_energy(space, w, wp) == expected
    samples = [(rng.choice(elements), rng.choice(elements), rng.choice(elements)) for _ in range(60)]
    assert check_equivariance(space, action, samples).passed


def test_direct_sum_space_chasles(rng):
    factor = naive_space(range(3), 2)
    space = direct_sum_space(lambda i: factor, lambda i: 0, 2, index_window=range(4))
    pts = [space.universe.sample(rng, 1)[0] for _ in range(30)]
    for _ in range(40):
        x, y, z = rng.choice(pts), rng.choice(pts), rng.choice(pts)
        assert check_chasles(space, x, y, z)


def test_proper_sum_orbital_energy_and_lower_bound():
    factor_group = FiniteGroup.cyclic(2)
    fs, fa = group_naive_space(factor_group, 2)
    group = DirectSumGroup(factor_group, range(-3, 4))
    factors = SumFactors(lambda i: fs, lambda i: 0, lambda i: fa)
    space, action = proper_sum_space(factors, group, 2, phi_abs)
    y0 = proper_sum_basepoint(group)
    for w in group.elements():
        e = pair_energy(space, action.point_map(w, y0), y0)
        expected = sum(1 + phi_abs(i) ** 2 for i in group.support(w))
        assert e == expected
        if w != group.identity:
            assert e >= max(phi_abs(i) ** 2 for i in group.support(w))


def test_semidirect_action_is_group_homomorphism(rng):
    from labparts.cli import infinite_dihedral_built
    from labparts.groups import ball_enumerate

    built = infinite_dihedral_built(2)
    space, action = built.space, built.actions["main"]
    group = action.group
    ball = [g for g, _ in ball_enumerate(group, 3)]
    for _ in range(150):
        g, gp = rng.choice(ball), rng.choice(ball)
        x = space.universe.sample(rng, 1)[0]
        assert action.point_map(g, action.point_map(gp, x)) == action.point_map(group.mul(g, gp), x)
    assert action.point_map(group.identity, ((5,), 1)) == ((5,), 1)


def test_semidirect_orbital_energy_dihedral():
    from labparts.cli import infinite_dihedral_built

    # orbital energy of (n, s) at ((0,), e): |n| wall crossings plus the flip
    built = infinite_dihedral_built(2)
    space, action = built.space, built.actions["main"]
    x0 = built.basepoint
    for n in range(-5, 6):
        for s in (0, 1):
            e = pair_energy(space, action.point_map((n, s), x0), x0)
            assert e == abs(n) + (1 if s else 0)


def test_semidirect_rejects_incompatible_twist():
    from labparts.core import Action, InvalidInput
    from labparts.constructions import SemidirectData, semidirect_space
    from labparts.groups import FiniteGroup, infinite_dihedral
    from labparts.walls import z_line_walls_space

    space1, action1 = z_line_walls_space(2)
    flip_group = FiniteGroup.cyclic(2)
    space2, action2 = group_naive_space(flip_group, 2)
    broken_twist = Action(group=flip_group, point_map=lambda s, x: (x[0] + 1,) if s == 1 else x)
    data = SemidirectData(
        space1=space1,
        action1=action1,
        space2=space2,
        action2=action2,
        twist_action=broken_twist,
        group=infinite_dihedral(),
    )
    with pytest.raises(InvalidInput):
        semidirect_space(data, 2)


def test_wreath_support_evidence():
    from labparts.cli import toy_wreath_walls
    from labparts.constructions import wreath_support_evidence

    z4 = FiniteGroup.cyclic(4)
    walls, _, _, group_w, _, cosets = toy_wreath_walls(z4, (0,), FiniteGroup.cyclic(2))
    evidence = wreath_support_evidence(walls, group_w, cosets.reps[0], 3)
    assert set(evidence) == set(cosets.reps)
    assert all(v >= 1 for v in evidence.values())


def test_proper_sum_warns_on_bounded_phi():
    factor_group = FiniteGroup.cyclic(2)
    fs, fa = group_naive_space(factor_group, 2)
    group = DirectSumGroup(factor_group, range(3))
    factors = SumFactors(lambda i: fs, lambda i: 0, lambda i: fa)
    with pytest.warns(UserWarning):
        proper_sum_space(factors, group, 2, lambda i: Fraction(1), phi_diverges=False)


# ---------------------------------------------------------------------------
# quotient averaging


def quotient_setups():
    z4 = FiniteGroup.cyclic(4)
    s3 = FiniteGroup.symmetric(3)
    transposition = next(g for g in range(6) if g != s3.identity and s3.mul(g, g) == s3.identity)
    return [
        (z4, (0, 2)),
        (s3, tuple(sorted((s3.identity, transposition)))),
    ]


@pytest.mark.parametrize("group,subgroup", quotient_setups())
@pytest.mark.parametrize("q", [1, 2])
def test_quotient_average_norm_bound(group, subgroup, q):
    space, action = group_naive_space(group, q)
    quotient, qaction = quotient_average(space, group, subgroup, action)
    eta = averaging_eta(space, group, subgroup)
    rep_of = {g: qaction.point_map(g, quotient.universe.points[0]) for g in group.elements()}
    base = quotient.universe.points[0]
    if q == 1:
        bound = 2 * q_energy(space.norm, eta)
        for g in group.elements():
            lhs = pair_energy(quotient, rep_of[g], base)
            rhs = pair_energy(space, g, group.identity)
            assert abs(lhs - rhs) <= bound
    else:
        bound = 2 * energy_to_dist(space.norm, q_energy(space.norm, eta))
        for g in group.elements():
            lhs = dist(quotient, rep_of[g], base)
            rhs = dist(space, g, group.identity)
            assert abs(lhs - rhs) <= bound + 1e-9


def test_quotient_average_trivial_subgroup_is_identity(rng):
    z4 = FiniteGroup.cyclic(4)
    space, action = group_naive_space(z4, 1)
    quotient, _ = quotient_average(space, z4, (0,), action)
    for _ in range(20):
        x, y = rng.randrange(4), rng.randrange(4)
        assert pair_energy(quotient, x, y) == pair_energy(space, x, y)


def test_quotient_average_z4_example():
    z4 = FiniteGroup.cyclic(4)
    space, action = group_naive_space(z4, 1)
    quotient, _ = quotient_average(space, z4, (0, 2), action)
    assert quotient.universe.points == (0, 1)
    v = sep(quotient, 1, 0)
    assert len(v) == 4
    assert all(abs(value) == Fraction(1, 2) for _, value in v.items())
    assert pair_energy(quotient, 1, 0) == 1
    eta = averaging_eta(space, z4, (0, 2))
    assert 2 * q_energy(space.norm, eta) == 1


def test_quotient_average_equivariance(rng):
    s3 = FiniteGroup.symmetric(3)
    transposition = next(g for g in range(6) if g != s3.identity and s3.mul(g, g) == s3.identity)
    space, action = group_naive_space(s3, 2)
    quotient, qaction = quotient_average(space, s3, (s3.identity, transposition), action)
    pts = quotient.universe.points
    samples = [(rng.randrange(6), rng.choice(pts), rng.choice(pts)) for _ in range(150)]
    assert check_equivariance(quotient, qaction, samples).passed


def test_quotient_average_rejects_non_subgroup():
    z4 = FiniteGroup.cyclic(4)
    space, action = group_naive_space(z4, 1)
    with pytest.raises(InvalidInput):
        quotient_average(space, z4, (0, 1), action)
