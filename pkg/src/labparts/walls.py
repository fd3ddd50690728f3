"""Atomic measured-walls structures and their labelled-partitions form.

A measured walls structure here is atomic: a family of walls (two-piece
partitions given by a membership predicate), a positive rational weight per
wall, and a separation oracle returning the finitely many walls separating a
pair of points.  The wall pseudo-metric d(x, y) sums the weights of the
separating walls.  Converting to labelled partitions puts one indicator
label per wall, weighted by the wall's weight, so the q-energy of a
separation vector equals the wall distance exactly, for every exponent q.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable

from .core import (
    Action,
    CheckReport,
    DomainError,
    NormSpec,
    Point,
    PointUniverse,
    Space,
    SparseVec,
    wall,
)
from .groups import FiniteGroup, ZGroup, coset_table


@dataclass(frozen=True)
class MeasuredWalls:
    """Walls with atomic weights and a finite separation oracle.

    ``member(wall_id, x)`` says on which side of the wall x lies;
    ``separating(x, y)`` returns the wall ids with x and y on opposite
    sides, and must be finite, symmetric and empty on the diagonal.
    """

    universe: PointUniverse
    weight: Callable[[Any], Fraction]
    member: Callable[[Any, Point], bool]
    separating: Callable[[Point, Point], Iterable]
    description: str = ""

    def wall_distance(self, x: Point, y: Point) -> Fraction:
        self.universe.require(x)
        self.universe.require(y)
        return sum((Fraction(self.weight(h)) for h in self.separating(x, y)), Fraction(0))


def walls_to_labelled(walls: MeasuredWalls, q) -> Space:
    """Labelled partitions with one indicator label per wall.

    Separation vectors take values +-1 on separating walls (sign recording
    the side of the first argument); the label weight is the wall weight, so
    the q-energy equals the wall distance independently of q.
    """

    def diff(x, y):
        entries = []
        for h in walls.separating(x, y):
            entries.append((wall(h), 1 if walls.member(h, x) else -1))
        if len(entries) > 100_000:
            raise DomainError("separation set too large to be finite")
        return SparseVec(entries)

    def weight_of(label):
        return Fraction(walls.weight(label[0][1]))

    return Space(
        universe=walls.universe,
        diff=diff,
        norm=NormSpec(q, weight_of),
        description=f"walls[{walls.description}] q={q}",
    )


def check_walls(walls: MeasuredWalls, samples: Iterable[tuple[Point, Point, Point]]) -> CheckReport:
    """Symmetry, emptiness on the diagonal and the triangle inequality of the
    wall pseudo-metric, on sampled triples."""
    report = CheckReport("walls-oracle")
    for x, y, z in samples:
        ok = (
            set(walls.separating(x, y)) == set(walls.separating(y, x))
            and not list(walls.separating(x, x))
            and walls.wall_distance(x, z) <= walls.wall_distance(x, y) + walls.wall_distance(y, z)
        )
        if ok:
            ok = all(walls.member(h, x) != walls.member(h, y) for h in walls.separating(x, y))
        report.record(ok, None if ok else {"triple": (x, y, z)})
    return report


# ---------------------------------------------------------------------------
# coordinate half-space walls on Z^n


def zn_half_space_walls(n: int, window: int = 8) -> MeasuredWalls:
    """Half-space walls {x : x_i <= k} on Z^n, each of weight 1.

    The wall distance is the l^1 metric.  ``window`` only bounds the default
    point sampler; membership and separation work on all of Z^n.
    """
    if n < 1:
        raise DomainError("dimension must be >= 1")

    def contains(x) -> bool:
        return isinstance(x, tuple) and len(x) == n and all(isinstance(v, int) for v in x)

    def sampler(rng: random.Random):
        return tuple(rng.randrange(-window, window + 1) for _ in range(n))

    def member(h, x) -> bool:
        axis, k = h
        return x[axis] <= k

    def separating(x, y):
        out = []
        for axis in range(n):
            lo, hi = sorted((x[axis], y[axis]))
            out.extend((axis, k) for k in range(lo, hi))
        return out

    return MeasuredWalls(
        universe=PointUniverse(contains=contains, sampler=sampler),
        weight=lambda h: Fraction(1),
        member=member,
        separating=separating,
        description=f"Z^{n} half-spaces",
    )


def zn_translation_action(n: int) -> Action:
    """Translation of Z^n on the half-space-walls space, with label map.

    Only provided for n = 1 as a ZGroup action; higher n actions are built
    through products.  Pulling the indicator of {x <= k} back along the
    translation by t gives the indicator of {x <= k - t}.
    """
    if n != 1:
        raise DomainError("direct translation action provided for n=1 only")
    group = ZGroup()

    def point_map(t, x):
        return (x[0] + t,)

    def label_map(t, label):
        (tag, (axis, k)) = label[0]
        return wall((axis, k - t))

    return Action(group=group, point_map=point_map, label_map=label_map)


def z_line_walls_space(q) -> tuple[Space, Action]:
    """The integer line with half-line walls and its translation action."""
    space = walls_to_labelled(zn_half_space_walls(1), q)
    return space, zn_translation_action(1)


# ---------------------------------------------------------------------------
# left-invariant walls on a finite group from coset partitions


def coset_walls(group: FiniteGroup, subgroups: Iterable[Iterable[int]], weight=Fraction(1)) -> MeasuredWalls:
    """Walls on a finite group given by left cosets of the listed subgroups.

    Each wall is a pair (subgroup index, coset representative); a point lies
    on the inside iff it belongs to that coset.  Left translation permutes
    each family, so the group acts by automorphisms on the derived space.
    """
    tables = [coset_table(group, sub) for sub in subgroups]
    wall_ids = tuple((i, rep) for i, table in enumerate(tables) for rep in table.reps)
    weight = Fraction(weight)

    def member(h, x) -> bool:
        i, rep = h
        return tables[i].rep_of[x] == rep

    def separating(x, y):
        return [h for h in wall_ids if member(h, x) != member(h, y)]

    return MeasuredWalls(
        universe=finite_group_universe(group),
        weight=lambda h: weight,
        member=member,
        separating=separating,
        description=f"coset walls on {group.name or group.size}",
    )


def finite_group_universe(group: FiniteGroup) -> PointUniverse:
    return PointUniverse(
        contains=lambda x: isinstance(x, int) and 0 <= x < group.size,
        points=tuple(range(group.size)),
    )


def coset_walls_action(group: FiniteGroup, walls: MeasuredWalls, tables_subgroups: Iterable[Iterable[int]]) -> Action:
    """Left translation action on a coset-walls space.

    Pulling the coset indicator 1_{rep C} back along x -> gx gives the
    indicator of g^{-1} rep C, whose wall id keeps the subgroup index and
    moves the representative.
    """
    tables = [coset_table(group, sub) for sub in tables_subgroups]

    def label_map(g, label):
        (tag, (i, rep)) = label[0]
        return wall((i, tables[i].rep_of[group.mul(group.inv(g), rep)]))

    return Action(group=group, point_map=lambda g, x: group.mul(g, x), label_map=label_map)


def custom_walls_load(path) -> MeasuredWalls:
    """Load walls from a text file over an enumerated point set.

    Format: a ``points`` line naming the points, then one line per wall:
    ``wall <id> <weight> <m_1> ... <m_k>`` with m_j in {0, 1} flagging
    membership of the j-th point.  Weights are rationals like ``2/3``.
    """
    points: tuple = ()
    walls = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "points":
                points = tuple(parts[1:])
            elif parts[0] == "wall":
                if len(parts) != 3 + len(points):
                    raise DomainError(f"wall line has wrong arity: {line!r}")
                wid, w = parts[1], Fraction(parts[2])
                if w <= 0:
                    raise DomainError("wall weights must be positive")
                mask = {p: v == "1" for p, v in zip(points, parts[3:])}
                walls.append((wid, w, mask))
            else:
                raise DomainError(f"unrecognised walls line: {line!r}")
    if not points:
        raise DomainError("walls file declares no points")
    weights = {wid: w for wid, w, _ in walls}
    masks = {wid: mask for wid, _, mask in walls}

    return MeasuredWalls(
        universe=finite_universe_str(points),
        weight=lambda h: weights[h],
        member=lambda h, x: masks[h][x],
        separating=lambda x, y: [h for h in weights if masks[h][x] != masks[h][y]],
        description=f"custom walls ({len(walls)} walls)",
    )


def finite_universe_str(points) -> PointUniverse:
    pts = tuple(points)
    index = set(pts)
    return PointUniverse(contains=index.__contains__, points=pts)
