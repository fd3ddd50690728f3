"""Sparse separation vectors, weighted q-energies and the induced pseudo-metric.

A space with labelled partitions is a set of points together with a family of
scalar labelling functions; the separation vector of a pair (x, y) records, per
label, the difference of label values at x and at y.  At desk scale every such
space is represented by three pieces of data:

* a point universe (finite, or lazily sampled),
* a difference oracle ``(x, y) -> SparseVec`` returning the separation vector,
* a norm specification: an exponent q >= 1 (or the supremum norm) and a
  nonnegative weight per label.

The label family itself is never materialised; separation vectors are finitely
supported in every construction provided here, so the oracle is the whole
structure.  All scalars are exact rationals.  The q-energy (the q-th power of
the weighted norm) is the canonical exact quantity; distances are derived
floats, except for the supremum norm where the distance itself is exact.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable

Point = Any
Label = tuple
Scalar = Fraction

SUP = "sup"


class DomainError(ValueError):
    """A point, label or map argument lies outside the structure's domain."""


class InvalidInput(ValueError):
    """Structurally invalid input (bad exponent, non-subgroup, broken table)."""


# ---------------------------------------------------------------------------
# labels
#
# A label is a tuple of tagged components.  Constructions prefix components:
# the i-th factor of a product wraps inner labels under a ('factor', i)
# component, a tree-of-spaces vertex under ('vertex', v), and so on.
# Structural equality of tuples is label equality.

def dirac(point) -> Label:
    """Label of the Dirac labelling function at ``point``."""
    return (("dirac", point),)


def wall(wall_id) -> Label:
    """Label of the indicator of a wall half-space."""
    return (("wall", wall_id),)


def pair_label(a, b) -> Label:
    """Label indexed by an ordered pair of points."""
    return (("pair", a, b),)


def coset_fn(cid) -> Label:
    """Label of a coordinate functional (used by cocycle-derived spaces)."""
    return (("cfn", cid),)


def custom(token) -> Label:
    return (("custom", token),)


def factor(i, label: Label) -> Label:
    """Tag ``label`` as living on the i-th factor of a product."""
    return (("factor", i),) + tuple(label)


def vertex_tag(v, label: Label) -> Label:
    """Tag ``label`` as living on the vertex space ``v`` of a tree of spaces."""
    return (("vertex", v),) + tuple(label)


def label_key(label: Label) -> str:
    """Deterministic sort key for labels of mixed component types."""
    return repr(label)


# ---------------------------------------------------------------------------
# sparse functionals


class SparseVec:
    """Finite-support map from labels to rationals; zeros are never stored.

    This is the computational form of a separation vector: addition,
    negation and scaling stay inside the class, and two vectors are equal
    exactly when all entries agree.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable | dict = ()):
        items = entries.items() if isinstance(entries, dict) else entries
        acc: dict = {}
        for label, value in items:
            value = Fraction(value)
            if not value:
                continue
            total = acc.get(label, 0) + value
            if total:
                acc[label] = total
            else:
                acc.pop(label, None)
        object.__setattr__(self, "_entries", acc)

    def __getitem__(self, label) -> Fraction:
        return self._entries.get(label, Fraction(0))

    def items(self):
        return self._entries.items()

    def support(self):
        return self._entries.keys()

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVec):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def __add__(self, other: "SparseVec") -> "SparseVec":
        acc = dict(self._entries)
        for label, value in other.items():
            total = acc.get(label, 0) + value
            if total:
                acc[label] = total
            else:
                acc.pop(label, None)
        out = SparseVec.__new__(SparseVec)
        object.__setattr__(out, "_entries", acc)
        return out

    def __sub__(self, other: "SparseVec") -> "SparseVec":
        return self + (-other)

    def __neg__(self) -> "SparseVec":
        return self.scaled(-1)

    def scaled(self, c) -> "SparseVec":
        c = Fraction(c)
        if not c:
            return ZERO_VEC
        out = SparseVec.__new__(SparseVec)
        object.__setattr__(out, "_entries", {l: c * v for l, v in self.items()})
        return out

    def __repr__(self) -> str:
        body = ", ".join(
            f"{label!r}: {value}" for label, value in sorted(self.items(), key=lambda kv: label_key(kv[0]))
        )
        return f"SparseVec({{{body}}})"


ZERO_VEC = SparseVec()


def combine(a: SparseVec, b: SparseVec, lam=1, mu=1) -> SparseVec:
    """Canonicalised linear combination ``lam*a + mu*b``."""
    return a.scaled(lam) + b.scaled(mu)


# ---------------------------------------------------------------------------
# norm specifications and energies


def unit_weight(label: Label) -> Fraction:
    return Fraction(1)


@dataclass(frozen=True)
class NormSpec:
    """Exponent q (rational >= 1, or SUP) plus a nonnegative weight per label.

    The q-energy of a vector v is sum_l weight(l) * |v(l)|**q; for SUP it is
    the largest weighted absolute value.  Weights house atomic wall measures
    and the scaling factors of weighted Dirac families, keeping every energy
    rational whenever q is an integer.
    """

    q: Any
    weight: Callable[[Label], Fraction] = unit_weight

    def __post_init__(self):
        if self.q == SUP:
            return
        q = Fraction(self.q)
        if q < 1:
            raise InvalidInput(f"norm exponent must be >= 1 or SUP, got {self.q}")
        object.__setattr__(self, "q", q)

    @property
    def exact(self) -> bool:
        """True when q-energies of rational vectors are exact rationals."""
        return self.q == SUP or self.q.denominator == 1


def q_energy(spec: NormSpec, vec: SparseVec):
    """Weighted q-energy of ``vec``; exact Fraction for integer q and SUP.

    For non-integer exponents the result is a float (|v|**q is irrational in
    general); callers comparing such energies use a 1e-9 relative tolerance.
    """
    if spec.q == SUP:
        best = Fraction(0)
        for label, value in vec.items():
            w = spec.weight(label)
            cand = w * abs(value)
            if cand > best:
                best = cand
        return best
    q = spec.q
    if q.denominator == 1:
        n = q.numerator
        return sum((spec.weight(l) * abs(v) ** n for l, v in vec.items()), Fraction(0))
    qf = float(q)
    return math.fsum(float(spec.weight(l)) * float(abs(v)) ** qf for l, v in vec.items())


def energy_to_dist(spec: NormSpec, energy) -> float:
    if spec.q == SUP:
        return float(energy)
    return float(energy) ** (1.0 / float(spec.q))


def values_match(a, b, rel_tol: float = 1e-9) -> bool:
    """Exact comparison when both sides are rational, float tolerance otherwise."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=rel_tol, abs_tol=1e-12)


# ---------------------------------------------------------------------------
# point universes and spaces


@dataclass(frozen=True)
class PointUniverse:
    """Membership oracle plus either a full enumeration or a point sampler."""

    contains: Callable[[Point], bool]
    points: tuple | None = None
    sampler: Callable[[random.Random], Point] | None = None

    def require(self, x) -> None:
        if not self.contains(x):
            raise DomainError(f"point {x!r} is not in this space")

    def sample(self, rng: random.Random, n: int) -> list:
        if self.points is not None:
            return [self.points[rng.randrange(len(self.points))] for _ in range(n)]
        if self.sampler is None:
            raise DomainError("universe has neither enumeration nor sampler")
        return [self.sampler(rng) for _ in range(n)]

    def enumerate(self) -> tuple:
        if self.points is None:
            raise DomainError("universe is not finitely enumerable")
        return self.points


def finite_universe(points: Iterable) -> PointUniverse:
    pts = tuple(points)
    index = set(pts)
    return PointUniverse(contains=index.__contains__, points=pts)


@dataclass(frozen=True)
class Space:
    """A space with labelled partitions, given by its difference oracle.

    Invariants (verified by the check suite, not re-derived per call):
    ``diff(x, x)`` is empty, ``diff(x, y) == -diff(y, x)``, the Chasles
    relation ``diff(x, z) == diff(x, y) + diff(y, z)`` holds exactly, and
    every returned vector has finite q-energy.
    """

    universe: PointUniverse
    diff: Callable[[Point, Point], SparseVec]
    norm: NormSpec
    description: str = ""


def sep(space: Space, x: Point, y: Point) -> SparseVec:
    """Separation vector c(x, y), with per-label entries p(x) - p(y)."""
    space.universe.require(x)
    space.universe.require(y)
    return space.diff(x, y)


def pair_energy(space: Space, x: Point, y: Point):
    return q_energy(space.norm, sep(space, x, y))


def dist(space: Space, x: Point, y: Point) -> float:
    """The labelled-partitions pseudo-metric d(x, y) = ||c(x, y)||."""
    return energy_to_dist(space.norm, pair_energy(space, x, y))


# ---------------------------------------------------------------------------
# label bijections and relabelling

SignedLabel = Any  # Label or (Label, sign) with sign in {+1, -1}


def _split_signed(value: SignedLabel) -> tuple[Label, int]:
    if (
        isinstance(value, tuple)
        and len(value) == 2
        and isinstance(value[1], int)
        and value[1] in (1, -1)
        and isinstance(value[0], tuple)
        and value[0]
        and isinstance(value[0][0], tuple)
    ):
        return value[0], value[1]
    return value, 1


@dataclass(frozen=True)
class LabelBijection:
    """A bijection of labels, possibly with signs.

    ``apply`` realises the pull-back map on labelling functions (p maps to
    p composed with the underlying point map); ``invert`` is its inverse.
    A signed image (l, -1) means the pulled-back function is the negative of
    the labelling function at l up to an additive constant, which is the
    general shape of an isometry on difference vectors.
    """

    apply: Callable[[Label], SignedLabel]
    invert: Callable[[Label], SignedLabel]

    def inverse(self) -> "LabelBijection":
        return LabelBijection(apply=self.invert, invert=self.apply)


def identity_bijection() -> LabelBijection:
    ident = lambda label: label
    return LabelBijection(apply=ident, invert=ident)


def relabel(vec: SparseVec, phi: LabelBijection, direction: str = "forward") -> SparseVec:
    """Compose ``vec`` with a label bijection.

    forward: result(l) = vec(phi(l)), i.e. the vector is pulled back along
    phi; inverse: result(phi(l)) = vec(l).  Weighted energies are preserved
    whenever phi preserves weights.  Raises DomainError if phi is undefined
    on a support label.
    """
    if direction == "forward":
        mover = phi.invert
    elif direction == "inverse":
        mover = phi.apply
    else:
        raise InvalidInput(f"direction must be 'forward' or 'inverse', got {direction!r}")
    out = []
    for label, value in vec.items():
        try:
            image = mover(label)
        except (KeyError, DomainError) as exc:
            raise DomainError(f"label bijection undefined on {label!r}") from exc
        if image is None:
            raise DomainError(f"label bijection undefined on {label!r}")
        target, sign = _split_signed(image)
        out.append((target, sign * value))
    return SparseVec(out)


# ---------------------------------------------------------------------------
# group actions by automorphisms


@dataclass(frozen=True)
class Action:
    """A group acting on a space, optionally with a label bijection per element.

    ``point_map(g, x)`` is the action on points.  When ``label_map`` is
    given, ``label_map(g, l)`` realises the pull-back of labelling functions
    along the action of g, so that for all x, y and labels l

        diff(g.x, g.y)(l) == sign * diff(x, y)(label_map(g, l))

    and weights are preserved.  The attribute ``group`` is any group handle
    from :mod:`labparts.groups`.
    """

    group: Any
    point_map: Callable[[Any, Point], Point]
    label_map: Callable[[Any, Label], SignedLabel] | None = None

    def bijection(self, g) -> LabelBijection:
        if self.label_map is None:
            raise DomainError("action carries no label map")
        inv = self.group.inv(g)
        return LabelBijection(
            apply=lambda label: self.label_map(g, label),
            invert=lambda label: self.label_map(inv, label),
        )


def translated_sep(space: Space, action: Action, g, x: Point, y: Point) -> SparseVec:
    """c(g.x, g.y) computed through the label map, for cross-checking."""
    return relabel(space.diff(x, y), action.bijection(g), "forward")


# ---------------------------------------------------------------------------
# structural checks


@dataclass
class CheckReport:
    """Aggregated pass/fail record for a sampled structural check."""

    name: str
    total: int = 0
    failures: list = field(default_factory=list)
    max_failures_kept: int = 20

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, ok: bool, context=None) -> None:
        self.total += 1
        if not ok and len(self.failures) < self.max_failures_kept:
            self.failures.append(context)

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"{self.name}: {status} ({self.total} samples, {len(self.failures)} failures kept)"


def check_chasles(space: Space, x: Point, y: Point, z: Point) -> bool:
    """Exact test of c(x, z) == c(x, y) + c(y, z)."""
    return sep(space, x, z) == combine(sep(space, x, y), sep(space, y, z))


def check_antisymmetry(space: Space, x: Point, y: Point) -> bool:
    return sep(space, x, y) == -sep(space, y, x)


def check_homomorphism(
    f: Callable[[Point], Point],
    source: Space,
    target: Space,
    sample_pairs: Iterable[tuple[Point, Point]],
    rel_tol: float = 1e-9,
) -> CheckReport:
    """Per sampled pair, does f preserve the pseudo-metric?

    Energies are compared exactly when both norms are exact with the same
    exponent; otherwise distances are compared with the float tolerance.
    """
    report = CheckReport("homomorphism")
    same_q = source.norm.q == target.norm.q
    for x, y in sample_pairs:
        fx, fy = f(x), f(y)
        try:
            target.universe.require(fx)
            target.universe.require(fy)
        except DomainError:
            report.record(False, {"pair": (x, y), "reason": "image outside target"})
            continue
        es = pair_energy(source, x, y)
        et = pair_energy(target, fx, fy)
        if same_q:
            ok = values_match(es, et, rel_tol)
        else:
            ok = math.isclose(
                energy_to_dist(source.norm, es),
                energy_to_dist(target.norm, et),
                rel_tol=rel_tol,
                abs_tol=1e-12,
            )
        report.record(ok, None if ok else {"pair": (x, y), "source": str(es), "target": str(et)})
    return report


def check_equivariance(
    space: Space,
    action: Action,
    samples: Iterable[tuple[Any, Point, Point]],
    rel_tol: float = 1e-9,
) -> CheckReport:
    """Per sample (g, x, y): d(gx, gy) == d(x, y), plus the vector identity
    c(gx, gy) == c(x, y) relabelled, and weight preservation, when the action
    carries a label map."""
    report = CheckReport("equivariance")
    for g, x, y in samples:
        gx = action.point_map(g, x)
        gy = action.point_map(g, y)
        lhs = sep(space, gx, gy)
        rhs = sep(space, x, y)
        ok = values_match(q_energy(space.norm, lhs), q_energy(space.norm, rhs), rel_tol)
        detail = None
        if ok and action.label_map is not None:
            moved = relabel(rhs, action.bijection(g), "forward")
            ok = moved == lhs
            if ok:
                for label in rhs.support():
                    target, _ = _split_signed(action.label_map(g, label))
                    if space.norm.weight(label) != space.norm.weight(target):
                        ok = False
                        detail = {"sample": (g, x, y), "reason": "weight not preserved", "label": label}
                        break
            else:
                detail = {"sample": (g, x, y), "reason": "vector identity failed"}
        elif not ok:
            detail = {"sample": (g, x, y), "reason": "distance changed"}
        report.record(ok, detail)
    return report


def check_pseudo_metric(
    space: Space,
    triples: Iterable[tuple[Point, Point, Point]],
    rel_tol: float = 1e-9,
) -> CheckReport:
    """Pseudo-metric axioms on sampled triples.

    d(x, x) = 0 and symmetry are exact (at the energy level); the triangle
    inequality is exact for q = 1 and checked after root extraction with the
    relative tolerance otherwise.
    """
    report = CheckReport("pseudo-metric")
    for x, y, z in triples:
        exx = pair_energy(space, x, x)
        exy = pair_energy(space, x, y)
        eyx = pair_energy(space, y, x)
        ok = (not exx) and exy == eyx and check_antisymmetry(space, x, y) and check_chasles(space, x, y, z)
        if ok:
            if space.norm.q != SUP and space.norm.q == 1:
                exz = pair_energy(space, x, z)
                eyz = pair_energy(space, y, z)
                ok = exz <= exy + eyz
            else:
                dxz = dist(space, x, z)
                dxy = dist(space, x, y)
                dyz = dist(space, y, z)
                ok = dxz <= dxy + dyz + rel_tol * (dxy + dyz + 1.0)
        report.record(ok, None if ok else {"triple": (x, y, z)})
    return report
