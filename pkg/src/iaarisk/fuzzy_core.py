"""Exact piecewise-constant fuzzy sets built with the Interval Agreement Approach.

Membership functions are step functions over a bounded rating scale. All
breakpoints and grades are held as :class:`fractions.Fraction`, so integrals
(Jaccard similarity, centroids) are computed in closed form without any
sampling error.

Evaluation convention
---------------------
Inside a cell ``(b_i, b_{i+1})`` the grade is ``values[i]``. At a breakpoint
the grade is the larger of the two adjacent cells (outside the first and last
breakpoint the function is 0), unless the breakpoint carries a point override.
This makes closed-interval coverage exact: an interval ``[1, 3]`` covers
``x = 3``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateSetError, DomainError, EmptyPanelError, ValidationError

__all__ = [
    "RatingScale",
    "Interval",
    "MembershipFunction",
    "AgreementT1",
    "ZSliceSet",
    "to_fraction",
    "build_iaa",
    "membership",
    "evaluate",
    "aggregate_zgt2",
    "secondary_grade",
    "zslice",
    "mean_function",
    "jaccard",
    "area",
    "centroid_t1",
    "centroid_zgt2",
    "sample",
]


def to_fraction(value) -> Fraction:
    """Convert a rating to an exact Fraction.

    Floats go through their shortest decimal repr so that ``1.5`` and ``0.1``
    become ``3/2`` and ``1/10`` rather than their binary expansions.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"not a rating value: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValidationError(f"rating must be finite, got {value!r}")
        return Fraction(repr(float(value)))
    if isinstance(value, Real):
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"not a number: {value!r}") from None
    raise ValidationError(f"not a rating value: {value!r}")


@dataclass(frozen=True)
class RatingScale:
    min: Fraction = Fraction(1)
    max: Fraction = Fraction(9)

    def __post_init__(self):
        lo, hi = to_fraction(self.min), to_fraction(self.max)
        if not lo < hi:
            raise ValidationError(f"scale min must be < max, got [{lo}, {hi}]")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @property
    def midpoint(self) -> Fraction:
        return (self.min + self.max) / 2

    @property
    def width(self) -> Fraction:
        return self.max - self.min

    def contains(self, x) -> bool:
        return self.min <= to_fraction(x) <= self.max

    def check(self, x, what="x") -> Fraction:
        x = to_fraction(x)
        if not self.min <= x <= self.max:
            raise DomainError(f"{what}={x} outside scale [{self.min}, {self.max}]")
        return x


@dataclass(frozen=True, order=True)
class Interval:
    """A closed response interval ``[lo, hi]``; ``lo == hi`` is a certain answer."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = to_fraction(self.lo), to_fraction(self.hi)
        if lo > hi:
            raise ValidationError(f"interval lo > hi: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def covers(self, x) -> bool:
        return self.lo <= x <= self.hi

    def within(self, scale: RatingScale) -> bool:
        return scale.min <= self.lo and self.hi <= scale.max

    def __repr__(self):
        return f"Interval({_fmt(self.lo)}, {_fmt(self.hi)})"


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else str(float(q))


@dataclass(frozen=True)
class MembershipFunction:
    """Step function on a rating scale.

    ``values[i]`` is the grade on the open cell between ``breakpoints[i]`` and
    ``breakpoints[i + 1]``. ``point_overrides`` maps breakpoints to grades that
    exceed both neighbouring cells (measure-zero spikes).
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    point_overrides: tuple[tuple[Fraction, Fraction], ...] = ()
    scale: RatingScale = field(default_factory=RatingScale)

    def __post_init__(self):
        bps = tuple(to_fraction(b) for b in self.breakpoints)
        vals = tuple(to_fraction(v) for v in self.values)
        ovr = tuple(sorted((to_fraction(x), to_fraction(g)) for x, g in dict(self.point_overrides).items()))
        if bps and len(vals) != len(bps) - 1:
            raise ValidationError(
                f"need {len(bps) - 1} cell values for {len(bps)} breakpoints, got {len(vals)}"
            )
        if not bps and vals:
            raise ValidationError("cell values given without breakpoints")
        if any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        if bps and (bps[0] < self.scale.min or bps[-1] > self.scale.max):
            raise ValidationError("breakpoints must lie within the rating scale")
        if any(not 0 <= v <= 1 for v in vals) or any(not 0 <= g <= 1 for _, g in ovr):
            raise ValidationError("membership grades must lie in [0, 1]")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "point_overrides", ovr)
        for x, g in ovr:
            if x not in bps:
                raise ValidationError(f"point override at {x} is not a breakpoint")
            if g < self._edge_grade(bps.index(x)):
                raise ValidationError(f"point override at {x} is below its neighbouring cells")

    @classmethod
    def indicator(cls, lo, hi, scale: RatingScale | None = None) -> "MembershipFunction":
        scale = scale or RatingScale()
        lo, hi = to_fraction(lo), to_fraction(hi)
        if lo == hi:
            return cls((lo,), (), ((lo, Fraction(1)),), scale)
        return cls((lo, hi), (Fraction(1),), (), scale)

    @classmethod
    def zero(cls, scale: RatingScale | None = None) -> "MembershipFunction":
        return cls((), (), (), scale or RatingScale())

    def _edge_grade(self, i: int) -> Fraction:
        left = self.values[i - 1] if i > 0 else Fraction(0)
        right = self.values[i] if i < len(self.values) else Fraction(0)
        return max(left, right)

    def cells(self) -> Iterable[tuple[Fraction, Fraction, Fraction]]:
        """Yield ``(left, right, grade)`` for each open cell."""
        return zip(self.breakpoints, self.breakpoints[1:], self.values)

    def __call__(self, x) -> Fraction:
        return membership(self, x)

    @property
    def grades(self) -> set[Fraction]:
        """Every grade the function attains on the scale (0 included when reachable)."""
        out = set(self.values) | {g for _, g in self.point_overrides}
        if not self.breakpoints or self.breakpoints[0] > self.scale.min or self.breakpoints[-1] < self.scale.max:
            out.add(Fraction(0))
        return out

    @property
    def height(self) -> Fraction:
        return max(self.grades, default=Fraction(0))

    def is_zero(self) -> bool:
        return self.height == 0

    def scaled(self, factor) -> "MembershipFunction":
        f = to_fraction(factor)
        return MembershipFunction(
            self.breakpoints,
            tuple(v * f for v in self.values),
            tuple((x, g * f) for x, g in self.point_overrides),
            self.scale,
        )

    def shifted(self, delta, scale: RatingScale | None = None) -> "MembershipFunction":
        d = to_fraction(delta)
        scale = scale or RatingScale(self.scale.min + d, self.scale.max + d)
        return MembershipFunction(
            tuple(b + d for b in self.breakpoints),
            self.values,
            tuple((x + d, g) for x, g in self.point_overrides),
            scale,
        )


@dataclass(frozen=True)
class AgreementT1:
    """IAA type-1 set: a membership function plus the number of source intervals."""

    fn: MembershipFunction
    source_count: int
    label: tuple[str, ...] = ()

    def __post_init__(self):
        if self.source_count < 1:
            raise ValidationError("source_count must be a positive integer")

    @property
    def scale(self) -> RatingScale:
        return self.fn.scale


@dataclass(frozen=True)
class ZSliceSet:
    """zSlice general type-2 set: ``M`` group functions with z-levels ``j/M``.

    Slices are not stored; :func:`zslice`, :func:`secondary_grade` and
    :func:`centroid_zgt2` derive them from the group functions.
    """

    groups: tuple[tuple[str, AgreementT1], ...]

    @property
    def m(self) -> int:
        return len(self.groups)

    @property
    def scale(self) -> RatingScale:
        return self.groups[0][1].scale

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.groups)

    @property
    def functions(self) -> tuple[MembershipFunction, ...]:
        return tuple(t1.fn for _, t1 in self.groups)

    @property
    def z_levels(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(j, self.m) for j in range(1, self.m + 1))


# --------------------------------------------------------------------------
# construction


def build_iaa(intervals: Sequence[Interval], scale: RatingScale | None = None) -> AgreementT1:
    """Aggregate intervals into a type-1 set whose grade is the covering fraction.

    ``mu(x) = |{i : lo_i <= x <= hi_i}| / N``, with every interval weighted
    equally and nothing discarded.
    """
    scale = scale or RatingScale()
    intervals = [iv if isinstance(iv, Interval) else Interval(*iv) for iv in intervals]
    if not intervals:
        raise EmptyPanelError()
    for k, iv in enumerate(intervals):
        if not iv.within(scale):
            raise ValidationError(
                f"interval #{k} {iv!r} outside scale [{scale.min}, {scale.max}]"
            )
    n = len(intervals)
    bps = sorted({iv.lo for iv in intervals} | {iv.hi for iv in intervals})

    # difference array over cells: interval covers cells lo..hi-1 (open interiors)
    pos = {b: i for i, b in enumerate(bps)}
    diff = [0] * (len(bps) + 1)
    for iv in intervals:
        diff[pos[iv.lo]] += 1
        diff[pos[iv.hi]] -= 1
    counts, running = [], 0
    for i in range(len(bps) - 1):
        running += diff[i]
        counts.append(running)

    closed = [sum(1 for iv in intervals if iv.lo <= b <= iv.hi) for b in bps]
    overrides = []
    for i, b in enumerate(bps):
        left = counts[i - 1] if i > 0 else 0
        right = counts[i] if i < len(counts) else 0
        if closed[i] > max(left, right):
            overrides.append((b, Fraction(closed[i], n)))

    fn = MembershipFunction(
        tuple(bps), tuple(Fraction(c, n) for c in counts), tuple(overrides), scale
    )
    return AgreementT1(fn, n)


def membership(fs: MembershipFunction, x) -> Fraction:
    """Grade of ``fs`` at ``x``; ``x`` must lie on the scale."""
    x = fs.scale.check(x)
    bps = fs.breakpoints
    if not bps or x < bps[0] or x > bps[-1]:
        return Fraction(0)
    i = bisect.bisect_left(bps, x)
    if bps[i] == x:
        for px, g in fs.point_overrides:
            if px == x:
                return g
        return fs._edge_grade(i)
    return fs.values[i - 1]


def evaluate(fs: MembershipFunction, xs) -> np.ndarray:
    """Vectorised float evaluation for plotting; same convention as :func:`membership`."""
    xs = np.asarray(xs, dtype=float)
    bps = np.array([float(b) for b in fs.breakpoints])
    out = np.zeros(xs.shape)
    if bps.size == 0:
        return out
    cell_vals = np.array([0.0] + [float(v) for v in fs.values] + [0.0])
    idx = np.searchsorted(bps, xs, side="right")
    out = cell_vals[idx]
    # breakpoints: max of adjacent cells, then overrides
    hit = np.searchsorted(bps, xs, side="left")
    on_bp = (hit < bps.size) & (bps[np.minimum(hit, bps.size - 1)] == xs)
    edge = np.maximum(cell_vals[hit], cell_vals[np.minimum(hit + 1, bps.size)])
    out = np.where(on_bp, edge, out)
    for px, g in fs.point_overrides:
        out = np.where(xs == float(px), float(g), out)
    return out


# --------------------------------------------------------------------------
# pointwise combination on a merged partition


def _merged_breakpoints(fns: Sequence[MembershipFunction]) -> list[Fraction]:
    return sorted(set().union(*(f.breakpoints for f in fns)))


def _cell_grade(fs: MembershipFunction, lo: Fraction, hi: Fraction) -> Fraction:
    return membership(fs, (lo + hi) / 2)


def _combine(
    fns: Sequence[MembershipFunction],
    reduce: Callable[[list[Fraction]], Fraction],
) -> MembershipFunction:
    """Build ``x -> reduce([f(x) for f in fns])`` exactly.

    ``reduce`` must be monotone non-decreasing in each argument, which keeps
    breakpoint grades at or above both neighbouring cells.
    """
    scale = fns[0].scale
    bps = _merged_breakpoints(fns)
    if not bps:
        return MembershipFunction.zero(scale)
    values = tuple(
        reduce([_cell_grade(f, a, b) for f in fns]) for a, b in zip(bps, bps[1:])
    )
    proto = MembershipFunction(tuple(bps), values, (), scale)
    overrides = []
    for i, b in enumerate(bps):
        g = reduce([membership(f, b) for f in fns])
        if g > proto._edge_grade(i):
            overrides.append((b, g))
    return MembershipFunction(tuple(bps), values, tuple(overrides), scale)


def _require_same_scale(fns: Sequence[MembershipFunction]):
    scales = {f.scale for f in fns}
    if len(scales) > 1:
        raise ValidationError(f"membership functions on different scales: {sorted(map(str, scales))}")


# --------------------------------------------------------------------------
# type-2 aggregation


def aggregate_zgt2(groups) -> ZSliceSet:
    """Stack ``M`` group sets into a zSlice type-2 set with z-levels ``1/M .. 1``.

    ``groups`` is a sequence of ``(label, AgreementT1)`` pairs, or of bare
    ``AgreementT1`` objects (labelled by position).
    """
    pairs = []
    for k, g in enumerate(groups):
        if isinstance(g, AgreementT1):
            pairs.append((str(k), g))
        else:
            label, t1 = g
            pairs.append((str(label), t1))
    if not pairs:
        raise EmptyPanelError("empty group list")
    _require_same_scale([t1.fn for _, t1 in pairs])
    return ZSliceSet(tuple(pairs))


def secondary_grade(z: ZSliceSet, x, y) -> Fraction:
    """Fraction of group functions whose grade at ``x`` is at least ``y``."""
    x = z.scale.check(x)
    y = to_fraction(y)
    if not 0 <= y <= 1:
        raise DomainError(f"y={y} outside [0, 1]")
    if y == 0:
        return Fraction(1)
    hits = sum(1 for f in z.functions if membership(f, x) >= y)
    return Fraction(hits, z.m)


def zslice(z: ZSliceSet, j: int) -> MembershipFunction:
    """Slice ``j`` (1-based): the pointwise ``j``-th largest group grade.

    Its graph is the upper envelope of the region whose secondary grade is at
    least ``j/M``, so slices are nested: slice 1 is the max, slice ``M`` the min.
    """
    if not 1 <= j <= z.m:
        raise DomainError(f"slice index {j} out of range 1..{z.m}")
    return _combine(z.functions, lambda gs: sorted(gs, reverse=True)[j - 1])


def mean_function(fns: Sequence[MembershipFunction]) -> MembershipFunction:
    """Pointwise arithmetic mean of several membership functions."""
    if not fns:
        raise EmptyPanelError("no membership functions to average")
    _require_same_scale(fns)
    n = len(fns)
    return _combine(fns, lambda gs: sum(gs, Fraction(0)) / n)


# --------------------------------------------------------------------------
# integrals


def area(fs: MembershipFunction) -> Fraction:
    return sum(((b - a) * v for a, b, v in fs.cells()), Fraction(0))


def jaccard(a: MembershipFunction, b: MembershipFunction) -> float:
    """Jaccard similarity ``int min(a, b) / int max(a, b)``, exact over merged cells."""
    _require_same_scale([a, b])
    inter = union = Fraction(0)
    bps = _merged_breakpoints([a, b])
    for lo, hi in zip(bps, bps[1:]):
        ga, gb = _cell_grade(a, lo, hi), _cell_grade(b, lo, hi)
        inter += (hi - lo) * min(ga, gb)
        union += (hi - lo) * max(ga, gb)
    if union == 0:
        raise DomainError("undefined similarity (0/0)")
    return float(inter / union)


def _centroid_exact(fs: MembershipFunction) -> Fraction:
    mass = area(fs)
    if mass == 0:
        raise DegenerateSetError("degenerate set: centroid undefined")
    moment = sum(((b * b - a * a) / 2 * v for a, b, v in fs.cells()), Fraction(0))
    return moment / mass


def centroid_t1(fs: MembershipFunction) -> float:
    """Centroid ``int x mu / int mu``; point overrides carry no mass."""
    return float(_centroid_exact(fs))


def centroid_zgt2(z: ZSliceSet) -> float:
    """Centroid after collapsing the type-2 set to its mean group function.

    The mean function equals both the integral of the secondary grade over
    ``y`` and the plain average of the ``M`` slices.
    """
    return float(_centroid_exact(mean_function(z.functions)))


# --------------------------------------------------------------------------
# plot data


def _grid(lo: Fraction, hi: Fraction, step: Fraction) -> list[Fraction]:
    pts, k = [], 0
    while lo + k * step <= hi:
        pts.append(lo + k * step)
        k += 1
    if pts[-1] != hi:
        pts.append(hi)
    return pts


def sample(fs, step, y_step=Fraction(1, 20)) -> list[tuple]:
    """Tabulate a set on a regular grid that includes both scale endpoints.

    A :class:`MembershipFunction` (or :class:`AgreementT1`) yields
    ``(x, grade)`` rows; a :class:`ZSliceSet` yields ``(x, y, z)`` rows with
    ``y`` running over ``[0, 1]`` in ``y_step`` increments. Values are Fractions.
    """
    step = to_fraction(step)
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    if isinstance(fs, AgreementT1):
        fs = fs.fn
    xs = _grid(fs.scale.min, fs.scale.max, step)
    if isinstance(fs, MembershipFunction):
        return [(x, membership(fs, x)) for x in xs]
    if isinstance(fs, ZSliceSet):
        y_step = to_fraction(y_step)
        if y_step <= 0:
            raise DomainError(f"y_step must be positive, got {y_step}")
        ys = _grid(Fraction(0), Fraction(1), y_step)
        rows = []
        for x in xs:
            grades = [membership(f, x) for f in fs.functions]
            for y in ys:
                zval = Fraction(1) if y == 0 else Fraction(sum(g >= y for g in grades), fs.m)
                rows.append((x, y, zval))
        return rows
    raise TypeError(f"cannot sample {type(fs).__name__}")
