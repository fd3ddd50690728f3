"""Generic combinators producing new spaces with labelled partitions.

Provided constructions: pull-backs along arbitrary point maps, (weighted)
naive Dirac families, finite products and restricted direct sums with
factor-tagged labels, the properness-restoring sum that pairs a direct sum
with a diverging-weight naive structure on the acting group, semidirect
gluings, averaging over a finite subgroup to descend a structure to a coset
space, and the wreath-product gluing that combines a walls structure on
W x I with a direct sum of structures on the lamp group.

Scaling conventions: the naive family on a set scales Dirac functions so
that a separated pair has q-energy exactly w**q; the irrational per-label
factor 2**(-1/q) is folded into the label weights (each Dirac label carries
weight 1/2 and value +-w), which keeps every energy rational for every q.
"""

from __future__ import annotations

import itertools
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from .core import (
    Action,
    DomainError,
    InvalidInput,
    Label,
    NormSpec,
    Point,
    PointUniverse,
    Space,
    SparseVec,
    _split_signed,
    dirac,
    factor,
    finite_universe,
)
from .groups import DirectSumGroup, FiniteGroup, ProductGroup, SemidirectGroup, coset_table

MAX_ENUM = 4096


# ---------------------------------------------------------------------------
# pull-back


def pullback(f: Callable[[Point], Point], space: Space, universe: PointUniverse, description: str = "") -> Space:
    """Pull a structure back along f: sep_Y(y, y') = sep_X(f(y), f(y')).

    Labels and norm are reused from the target, so f becomes a homomorphism
    and distances are preserved exactly.
    """

    def diff(y, yp):
        fy, fyp = f(y), f(yp)
        space.universe.require(fy)
        space.universe.require(fyp)
        return space.diff(fy, fyp)

    return Space(
        universe=universe,
        diff=diff,
        norm=space.norm,
        description=description or f"pullback of {space.description}",
    )


def pullback_action(f: Callable[[Point], Point], space_action: Action, point_map: Callable[[Any, Point], Point]) -> Action:
    """Action on a pull-back space for an equivariant f.

    The label map is inherited unchanged since the pulled-back structure
    reuses the target's labels.
    """
    return Action(group=space_action.group, point_map=point_map, label_map=space_action.label_map)


# ---------------------------------------------------------------------------
# naive Dirac families


def weighted_naive_space(points: Iterable, w, q, universe: PointUniverse | None = None) -> Space:
    """The w-weighted naive structure: separated pairs sit at distance w.

    Labels are Dirac labels of weight 1/2; sep(x, y) has value +w at x and
    -w at y, so the q-energy of any separated pair is w**q exactly.
    """
    w = Fraction(w)
    if w < 0:
        raise InvalidInput("naive weight must be nonnegative")
    if universe is None:
        universe = finite_universe(points)

    def diff(x, y):
        if x == y or w == 0:
            return SparseVec()
        return SparseVec(((dirac(x), w), (dirac(y), -w)))

    return Space(
        universe=universe,
        diff=diff,
        norm=NormSpec(q, lambda label: Fraction(1, 2)),
        description=f"naive(w={w}, q={q})",
    )


def naive_space(points: Iterable, q, universe: PointUniverse | None = None) -> Space:
    return weighted_naive_space(points, 1, q, universe)


def naive_group_action(group, point_map: Callable[[Any, Point], Point] | None = None) -> Action:
    """Automorphism action on a naive space over a group's elements.

    Pulling the Dirac function at z back along x -> gx gives the Dirac
    function at g^{-1} z.
    """
    pm = point_map if point_map is not None else (lambda g, x: group.mul(g, x))

    def label_map(g, label):
        (tag, z) = label[0]
        return dirac(pm(group.inv(g), z))

    return Action(group=group, point_map=pm, label_map=label_map)


def group_naive_space(group: FiniteGroup, q, w=1) -> tuple[Space, Action]:
    """The naive structure on a finite group with its left translation action."""
    space = weighted_naive_space(group.elements(), w, q)
    return space, naive_group_action(group)


# ---------------------------------------------------------------------------
# finite products


def _common_exponent(factors: Sequence[Space], q) -> None:
    for i, fac in enumerate(factors):
        if fac.norm.q != NormSpec(q).q:
            raise InvalidInput(
                f"factor {i} has exponent {fac.norm.q}, product requires {q}: "
                "the factor-tagged union of labels computes the q-sum of factor energies"
            )


def product_space(factors: Sequence[Space], q, description: str = "") -> Space:
    """Direct product with the factor-tagged union of label families.

    Points are tuples; sep is the disjoint union of per-factor separation
    vectors, so the q-energy is exactly the sum of the factor energies.
    All factors must already carry the exponent q.
    """
    factors = list(factors)
    _common_exponent(factors, q)

    def contains(x) -> bool:
        return (
            isinstance(x, tuple)
            and len(x) == len(factors)
            and all(f.universe.contains(v) for f, v in zip(factors, x))
        )

    points = None
    if all(f.universe.points is not None for f in factors):
        total = 1
        for f in factors:
            total *= max(1, len(f.universe.points))
        if total <= MAX_ENUM:
            points = tuple(itertools.product(*(f.universe.points for f in factors)))

    def sampler(rng: random.Random):
        return tuple(f.universe.sample(rng, 1)[0] for f in factors)

    def diff(x, y):
        entries = []
        for i, fac in enumerate(factors):
            for label, value in fac.diff(x[i], y[i]).items():
                entries.append((factor(i, label), value))
        return SparseVec(entries)

    def weight_of(label: Label):
        (tag, i) = label[0]
        return factors[i].norm.weight(tuple(label[1:]))

    return Space(
        universe=PointUniverse(contains=contains, points=points, sampler=sampler),
        diff=diff,
        norm=NormSpec(q, weight_of),
        description=description or f"product[{', '.join(f.description for f in factors)}]",
    )


def product_action(factors: Sequence[Space], actions: Sequence[Action], q) -> tuple[Space, Action]:
    """Coordinatewise action of the product group on the product space."""
    space = product_space(factors, q)
    group = ProductGroup([a.group for a in actions])
    actions = list(actions)

    def point_map(g, x):
        return tuple(a.point_map(gi, xi) for a, gi, xi in zip(actions, g, x))

    label_map = None
    if all(a.label_map is not None for a in actions):

        def label_map(g, label):
            (tag, i) = label[0]
            target, sign = _split_signed(actions[i].label_map(g[i], tuple(label[1:])))
            return (factor(i, target), sign)

    return space, Action(group=group, point_map=point_map, label_map=label_map)


# ---------------------------------------------------------------------------
# restricted direct sums


def sum_point(entries: Iterable[tuple[Any, Point]], basepoint_at: Callable[[Any], Point]) -> tuple:
    """Canonical finite-support point of a restricted direct sum."""
    return tuple(sorted((i, x) for i, x in entries if x != basepoint_at(i)))


def direct_sum_space(
    factor_at: Callable[[Any], Space],
    basepoint_at: Callable[[Any], Point],
    q,
    index_window: Sequence = (),
    description: str = "",
) -> Space:
    """Restricted direct sum relative to basepoints, with lazy factors.

    Points are sorted tuples of (index, factor point) listing only the
    coordinates that differ from the basepoint; factors are materialised
    only on the supports of queried points.  ``index_window`` bounds the
    sampler, not the space.
    """

    def contains(x) -> bool:
        if not isinstance(x, tuple):
            return False
        indices = []
        for item in x:
            if not (isinstance(item, tuple) and len(item) == 2):
                return False
            i, xi = item
            indices.append(i)
            fac = factor_at(i)
            if not fac.universe.contains(xi) or xi == basepoint_at(i):
                return False
        return all(indices[k] < indices[k + 1] for k in range(len(indices) - 1))

    def sampler(rng: random.Random):
        if not index_window:
            raise DomainError("direct sum sampler needs an index window")
        k = rng.randrange(0, min(3, len(index_window)) + 1)
        chosen = rng.sample(list(index_window), k)
        entries = []
        for i in chosen:
            fac = factor_at(i)
            xi = fac.universe.sample(rng, 1)[0]
            entries.append((i, xi))
        return sum_point(entries, basepoint_at)

    def coordinate(x, i):
        for j, xj in x:
            if j == i:
                return xj
        return basepoint_at(i)

    def diff(x, y):
        indices = {i for i, _ in x} | {i for i, _ in y}
        entries = []
        for i in indices:
            fac = factor_at(i)
            for label, value in fac.diff(coordinate(x, i), coordinate(y, i)).items():
                entries.append((factor(i, label), value))
        return SparseVec(entries)

    def weight_of(label: Label):
        (tag, i) = label[0]
        return factor_at(i).norm.weight(tuple(label[1:]))

    return Space(
        universe=PointUniverse(contains=contains, sampler=sampler),
        diff=diff,
        norm=NormSpec(q, weight_of),
        description=description or "direct sum",
    )


def weighted_naive_sum_space(group: DirectSumGroup, phi: Callable[[Any], Fraction] | None, q) -> tuple[Space, Action]:
    """The direct sum of phi(i)-weighted naive structures on a lamp group.

    Points are the group's own finite-support elements; the q-energy of
    c(w, w') is the sum of phi(i)**q over the support of w^{-1} w'.  The
    group acts on itself by left translation with an exact label map.
    When phi is None the default 1 + |enumeration rank| weighting is used,
    which diverges along the index window.
    """
    if phi is None:
        ranks = {i: r for r, i in enumerate(group.index_window)}

        def phi(i):
            return Fraction(1 + ranks.get(i, len(ranks)))

    h = group.factor

    def contains(w) -> bool:
        return isinstance(w, tuple) and all(
            isinstance(item, tuple) and len(item) == 2 and item[1] != h.identity for item in w
        )

    def sampler(rng: random.Random):
        k = rng.randrange(0, min(4, len(group.index_window)) + 1)
        idx = rng.sample(list(group.index_window), k)
        hs = [x for x in h.elements() if x != h.identity]
        return tuple(sorted((i, rng.choice(hs)) for i in idx))

    def diff(w, wp):
        indices = {i for i, _ in w} | {i for i, _ in wp}
        entries = []
        for i in sorted(indices, key=repr):
            a = group.component(w, i)
            b = group.component(wp, i)
            if a == b:
                continue
            weight = Fraction(phi(i))
            if weight == 0:
                continue
            entries.append((factor(i, dirac(a)), weight))
            entries.append((factor(i, dirac(b)), -weight))
        return SparseVec(entries)

    space = Space(
        universe=PointUniverse(contains=contains, sampler=sampler),
        diff=diff,
        norm=NormSpec(q, lambda label: Fraction(1, 2)),
        description=f"weighted naive sum q={q}",
    )

    def label_map(w, label):
        (tag, i) = label[0]
        (dtag, z) = label[1]
        return factor(i, dirac(h.mul(h.inv(group.component(w, i)), z)))

    action = Action(group=group, point_map=group.mul, label_map=label_map)
    return space, action


# ---------------------------------------------------------------------------
# properness-restoring sum


@dataclass(frozen=True)
class SumFactors:
    """Per-index data for a restricted direct sum with factor actions."""

    factor_at: Callable[[Any], Space]
    basepoint_at: Callable[[Any], Point]
    action_at: Callable[[Any], Action]


def proper_sum_space(
    factors: SumFactors,
    group: DirectSumGroup,
    q,
    phi: Callable[[Any], Fraction] | None = None,
    phi_diverges: bool = True,
) -> tuple[Space, Action]:
    """Product of a direct sum of factor structures with the diverging-weight
    naive structure on the acting lamp group, carrying the diagonal action.

    For w in the lamp group and base point y0 = (basepoints, identity), the
    q-energy of c(w.y0, y0) is the sum over supp(w) of the factor orbital
    energies plus phi(i)**q, so orbits escape every ball whenever the factor
    actions are proper and phi diverges.
    """
    if not phi_diverges:
        warnings.warn("phi is declared bounded on an infinite index set: properness is not guaranteed")

    x_part = direct_sum_space(
        factors.factor_at, factors.basepoint_at, q, index_window=group.index_window, description="orbit sum"
    )
    w_part, w_action = weighted_naive_sum_space(group, phi, q)
    space = product_space([x_part, w_part], q, description=f"proper sum q={q}")

    h = group.factor

    def point_map(w, y):
        x, u = y
        indices = {i for i, _ in x} | {i for i, _ in w}
        moved = []
        for i in indices:
            xi = None
            for j, xj in x:
                if j == i:
                    xi = xj
            if xi is None:
                xi = factors.basepoint_at(i)
            moved.append((i, factors.action_at(i).point_map(group.component(w, i), xi)))
        return (sum_point(moved, factors.basepoint_at), group.mul(w, u))

    def label_map(w, label):
        (tag, part) = label[0]
        inner = tuple(label[1:])
        if part == 0:
            (ftag, i) = inner[0]
            act = factors.action_at(i)
            if act.label_map is None:
                raise DomainError("factor action carries no label map")
            target, sign = _split_signed(act.label_map(group.component(w, i), tuple(inner[1:])))
            return (factor(0, factor(i, target)), sign)
        target, sign = _split_signed(w_action.label_map(w, inner))
        return (factor(1, target), sign)

    return space, Action(group=group, point_map=point_map, label_map=label_map)


def proper_sum_basepoint(group: DirectSumGroup) -> tuple:
    return ((), group.identity)


# ---------------------------------------------------------------------------
# semidirect gluing


@dataclass(frozen=True)
class SemidirectData:
    """Inputs for a semidirect gluing.

    ``twist_action`` is the action of the quotient group on the first space
    extending the twist homomorphism; it is required as explicit input and
    must be compatible with the first action in the sense that
    g2 g1 g2^{-1} acts on space1 as twist(g2)(g1) does.
    """

    space1: Space
    action1: Action
    space2: Space
    action2: Action
    twist_action: Action
    group: SemidirectGroup

    def check_compatibility(self, rng: random.Random, samples: int = 40) -> bool:
        g1s = list(self.action1.group.generators) + [self.action1.group.identity]
        g2s = list(self.action2.group.generators) + [self.action2.group.identity]
        for _ in range(samples):
            g1 = rng.choice(g1s)
            g2 = rng.choice(g2s)
            x = self.space1.universe.sample(rng, 1)[0]
            lhs = self.twist_action.point_map(
                g2, self.action1.point_map(g1, self.twist_action.point_map(self.action2.group.inv(g2), x))
            )
            rhs = self.action1.point_map(self.group.twist(g2, g1), x)
            if lhs != rhs:
                return False
        return True


def semidirect_space(data: SemidirectData, q, rng: random.Random | None = None) -> tuple[Space, Action]:
    """Product structure on X1 x X2 with the glued semidirect action
    tau(g1, g2)(x1, x2) = (g1 . (twist(g2) . x1), g2 . x2)."""
    rng = rng if rng is not None else random.Random(0)
    if not data.check_compatibility(rng):
        raise InvalidInput("twist action is not compatible with the first factor action")

    space = product_space([data.space1, data.space2], q, description="semidirect product structure")

    def point_map(g, x):
        g1, g2 = g
        x1, x2 = x
        return (
            data.action1.point_map(g1, data.twist_action.point_map(g2, x1)),
            data.action2.point_map(g2, x2),
        )

    label_map = None
    if data.action1.label_map is not None and data.action2.label_map is not None and data.twist_action.label_map is not None:

        def label_map(g, label):
            g1, g2 = g
            (tag, part) = label[0]
            inner = tuple(label[1:])
            if part == 0:
                mid, s1 = _split_signed(data.action1.label_map(g1, inner))
                out, s2 = _split_signed(data.twist_action.label_map(g2, mid))
                return (factor(0, out), s1 * s2)
            out, s = _split_signed(data.action2.label_map(g2, inner))
            return (factor(1, out), s)

    return space, Action(group=data.group, point_map=point_map, label_map=label_map)


# ---------------------------------------------------------------------------
# finite-quotient averaging


def quotient_average(space: Space, group: FiniteGroup, subgroup: Iterable[int], action: Action) -> tuple[Space, Action]:
    """Average a structure on a group over a finite subgroup.

    The source space's points must be exactly the group's elements with
    ``action`` the left translation.  Points of the result are the coset
    representatives of G/F; separation vectors are averages over F inside
    the original label family:

        sep'(gF, g'F) = (1/|F|) sum_f sep(g f, g' f).

    The orbital norms change by at most 2 * ||(1/|F|) sum_f sep(f, e)||.
    """
    table = coset_table(group, subgroup)
    size = Fraction(1, len(table.subgroup))

    def diff(r, rp):
        acc = SparseVec()
        for f in table.subgroup:
            acc = acc + space.diff(group.mul(r, f), group.mul(rp, f))
        return acc.scaled(size)

    quotient = Space(
        universe=finite_universe(table.reps),
        diff=diff,
        norm=space.norm,
        description=f"{space.description} averaged over F (|F|={len(table.subgroup)})",
    )

    quotient_action = Action(
        group=group,
        point_map=lambda g, r: table.rep_of[group.mul(g, r)],
        label_map=action.label_map,
    )
    return quotient, quotient_action


def averaging_eta(space: Space, group: FiniteGroup, subgroup: Iterable[int]) -> SparseVec:
    """The drift vector eta = (1/|F|) sum_f sep(f, e).

    Orbital norms of the averaged structure stay within K = 2 ||eta|| of the
    original ones; callers form K at the exactness level they need (2 times
    the q-energy at q = 1, a float root otherwise).
    """
    sub = tuple(sorted(set(subgroup)))
    eta = SparseVec()
    for f in sub:
        eta = eta + space.diff(f, group.identity)
    return eta.scaled(Fraction(1, len(sub)))


# ---------------------------------------------------------------------------
# wreath gluing


@dataclass(frozen=True)
class WreathWalls:
    """A user-supplied atomic walls structure on W x I with its symmetries.

    ``walls`` lives on points (w, i); the two label maps (optional) describe
    how wall labels move under the lamp translation w0 . (w, i) = (w0 w, i)
    and the shifter g . (w, i) = (rho(g) w, g i).
    """

    walls: Any
    label_map_w: Callable[[Any, Label], Any] | None = None
    label_map_g: Callable[[Any, Label], Any] | None = None


def wreath_glue(
    wreath_walls: WreathWalls,
    factor_space: Space,
    factor_action: Action,
    group_w: DirectSumGroup,
    group_g: FiniteGroup,
    shift: Callable[[Any, Any], Any],
    q,
) -> tuple[Space, Action, Action]:
    """Glue a walls structure on W x I with the direct sum over I of a
    structure on the lamp factor.

    Points are ((w1, i), w2); the lamp group acts by
    tau_W(w)((w1, i), w2) = ((w w1, i), w w2) and the shifter by
    tau_G(g)((w1, i), w2) = ((rho(g) w1, g i), rho(g) w2) where rho permutes
    coordinates through ``shift`` (the action of G on the index set I).
    For the base point ((e, i0), e) the orbital q-energy of tau_W(w) splits
    as the wall distance plus the sum of factor orbital energies over the
    support of w.
    """
    from .walls import walls_to_labelled

    walls_space = walls_to_labelled(wreath_walls.walls, q)
    lamp_sum = direct_sum_space(
        lambda i: factor_space,
        lambda i: factor_action.group.identity,
        q,
        index_window=group_w.index_window,
        description="lamp sum",
    )
    space = product_space([walls_space, lamp_sum], q, description=f"wreath gluing q={q}")

    h = factor_action.group

    def rho(g, w):
        return tuple(sorted((shift(g, i), x) for i, x in w))

    def as_sum_point(w):
        return tuple((i, x) for i, x in w)

    def point_map_w(w, y):
        (w1, i), w2 = y
        return ((group_w.mul(w, w1), i), as_sum_point(group_w.mul(w, tuple(w2))))

    def point_map_g(g, y):
        (w1, i), w2 = y
        return ((rho(g, w1), shift(g, i)), as_sum_point(rho(g, tuple(w2))))

    def lamp_label_map(w, label):
        (tag, i) = label[0]
        inner = tuple(label[1:])
        target, sign = _split_signed(factor_action.label_map(group_w.component(w, i), inner))
        return (factor(i, target), sign)

    def make_label_map(walls_lm, lamp_lm):
        if walls_lm is None or factor_action.label_map is None:
            return None

        def label_map(g, label):
            (tag, part) = label[0]
            inner = tuple(label[1:])
            if part == 0:
                target, sign = _split_signed(walls_lm(g, inner))
                return (factor(0, target), sign)
            target, sign = _split_signed(lamp_lm(g, inner))
            return (factor(1, target), sign)

        return label_map

    def lamp_label_map_g(g, label):
        # coordinate i of rho(g)w is the coordinate g^{-1} i of w
        (tag, i) = label[0]
        return (factor(shift(group_g.inv(g), i), tuple(label[1:])), 1)

    action_w = Action(
        group=group_w,
        point_map=point_map_w,
        label_map=make_label_map(wreath_walls.label_map_w, lamp_label_map),
    )
    action_g = Action(
        group=group_g,
        point_map=point_map_g,
        label_map=make_label_map(wreath_walls.label_map_g, lamp_label_map_g),
    )
    return space, action_w, action_g


def wreath_support_evidence(walls, group_w: DirectSumGroup, i0, radius: int) -> dict:
    """Finite-ball evidence that wall distances control lamp supports.

    For each index j, the minimum of d((w, i0), (e, i0)) over the enumerated
    ball elements w whose support contains j.  Radii R then admit the finite
    set {j : minimum <= R} as a support bound for all enumerated w with
    wall distance at most R; a zero minimum at some j means the walls never
    see lamps at j and properness of the gluing is not supported.
    """
    from .groups import ball_enumerate

    evidence: dict = {}
    identity_point = (group_w.identity, i0)
    for w, _ in ball_enumerate(group_w, radius):
        if w == group_w.identity:
            continue
        d = walls.wall_distance((w, i0), identity_point)
        for j in group_w.support(w):
            if j not in evidence or d < evidence[j]:
                evidence[j] = d
    return evidence
