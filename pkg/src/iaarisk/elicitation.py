"""Ingestion and organisation of interval-valued questionnaire responses.

Response CSV layout::

    expert_id,profession,factor_id,lo,hi[,experience_years]

Lines starting with ``#`` are comments. An empty ``hi`` (or ``hi == lo``)
records a certain, single-score answer as the degenerate interval ``[lo, lo]``.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, TextIO

import numpy as np

from .errors import EmptyPanelError, NotFoundError, ValidationError
from .fuzzy_core import (
    AgreementT1,
    Interval,
    RatingScale,
    ZSliceSet,
    aggregate_zgt2,
    build_iaa,
    jaccard,
    to_fraction,
)

RESPONSE_HEADER = ("expert_id", "profession", "factor_id", "lo", "hi")
MANIFEST_HEADER = ("factor_id", "category", "display_name")
FACTOR_CATEGORIES = ("affective", "work_life", "in_vehicle_tech", "weather")

PROFESSIONS = {
    "HD": "HGV Driver",
    "FM": "Fleet Manager",
    "R": "Researcher",
    "RS": "Road Safety",
}


@dataclass(frozen=True)
class ResponseRecord:
    expert_id: str
    profession: str
    factor_id: str
    lo: Fraction
    hi: Fraction
    experience_years: float | None = None

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)


@dataclass(frozen=True)
class ResponsePanel:
    records: tuple[ResponseRecord, ...]
    index: Mapping[tuple[str, str], tuple[Interval, ...]]
    scale: RatingScale

    @classmethod
    def from_records(cls, records: Iterable[ResponseRecord], scale: RatingScale | None = None):
        scale = scale or RatingScale()
        records = tuple(records)
        seen = set()
        index: dict[tuple[str, str], list[Interval]] = {}
        for r in records:
            if not r.profession or not r.factor_id:
                raise ValidationError(f"record {r.expert_id!r}: profession and factor_id must be nonempty")
            iv = r.interval
            if not iv.within(scale):
                raise ValidationError(
                    f"record {r.expert_id!r}/{r.factor_id!r}: rating outside scale [{scale.min}, {scale.max}]"
                )
            key = (r.expert_id, r.factor_id)
            if key in seen:
                raise ValidationError(f"duplicate response for expert {r.expert_id!r}, factor {r.factor_id!r}")
            seen.add(key)
            index.setdefault((r.factor_id, r.profession), []).append(iv)
        frozen = MappingProxyType({k: tuple(v) for k, v in index.items()})
        return cls(records, frozen, scale)

    @property
    def factors(self) -> list[str]:
        """Factor labels in order of first appearance."""
        return list(dict.fromkeys(r.factor_id for r in self.records))

    def professions(self, factor: str | None = None) -> list[str]:
        return list(
            dict.fromkeys(r.profession for r in self.records if factor is None or r.factor_id == factor)
        )

    def __len__(self):
        return len(self.records)


# --------------------------------------------------------------------------
# CSV I/O


def _parse_rating(text: str, line: int, column: str) -> Fraction:
    try:
        return to_fraction(text)
    except ValidationError:
        raise ValidationError(f"line {line}: {column} is not a number: {text!r}") from None


def _data_lines(source: TextIO) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(source, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, raw


def parse_responses(source: TextIO | str, scale: RatingScale | None = None) -> ResponsePanel:
    """Read a response CSV into a validated :class:`ResponsePanel`.

    ``source`` is an open text stream or the CSV text itself.
    """
    scale = scale or RatingScale()
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = list(_data_lines(source))
    if not lines:
        raise EmptyPanelError()
    rows = csv.reader([raw for _, raw in lines])
    header = [h.strip() for h in next(rows)]
    if tuple(header[:5]) != RESPONSE_HEADER or header[5:] not in ([], ["experience_years"]):
        raise ValidationError(
            f"line {lines[0][0]}: expected header {','.join(RESPONSE_HEADER)}[,experience_years], got {','.join(header)}"
        )
    width = len(header)

    records = []
    seen: dict[tuple[str, str], int] = {}
    for (lineno, _), row in zip(lines[1:], rows):
        row = [c.strip() for c in row]
        if len(row) == 5 and width == 6:
            row.append("")
        if len(row) != width:
            raise ValidationError(f"line {lineno}: expected {width} fields, got {len(row)}")
        expert, prof, factor, lo_s, hi_s = row[:5]
        if not expert or not prof or not factor:
            raise ValidationError(f"line {lineno}: expert_id, profession and factor_id must be nonempty")
        lo = _parse_rating(lo_s, lineno, "lo")
        hi = _parse_rating(hi_s, lineno, "hi") if hi_s else lo
        if lo > hi:
            raise ValidationError(f"line {lineno}: lo > hi ({lo_s} > {hi_s})")
        if not (scale.min <= lo and hi <= scale.max):
            raise ValidationError(
                f"line {lineno}: rating outside scale [{scale.min}, {scale.max}]: [{lo_s}, {hi_s or lo_s}]"
            )
        if (expert, factor) in seen:
            raise ValidationError(
                f"line {lineno}: duplicate response for expert {expert!r}, factor {factor!r} "
                f"(first at line {seen[expert, factor]})"
            )
        seen[expert, factor] = lineno
        exp = None
        if width == 6 and row[5]:
            try:
                exp = float(row[5])
            except ValueError:
                raise ValidationError(f"line {lineno}: experience_years is not a number: {row[5]!r}") from None
            if exp < 0 or not np.isfinite(exp):
                raise ValidationError(f"line {lineno}: experience_years must be non-negative")
        records.append(ResponseRecord(expert, prof, factor, lo, hi, exp))

    if not records:
        raise EmptyPanelError()
    return ResponsePanel.from_records(records, scale)


def _num(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    s = f"{float(q):.10f}".rstrip("0")
    if to_fraction(s) != q:
        raise ValidationError(f"rating {q} has no finite decimal form")
    return s


def serialize_responses(panel: ResponsePanel) -> str:
    """Inverse of :func:`parse_responses` (degenerate answers keep an empty ``hi``)."""
    with_exp = any(r.experience_years is not None for r in panel.records)
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(RESPONSE_HEADER + (("experience_years",) if with_exp else ()))
    for r in panel.records:
        row = [r.expert_id, r.profession, r.factor_id, _num(r.lo), "" if r.lo == r.hi else _num(r.hi)]
        if with_exp:
            row.append("" if r.experience_years is None else f"{r.experience_years:g}")
        w.writerow(row)
    return out.getvalue()


@dataclass(frozen=True)
class FactorInfo:
    factor_id: str
    category: str
    display_name: str


def parse_factor_manifest(source: TextIO | str) -> dict[str, FactorInfo]:
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = list(_data_lines(source))
    if not lines:
        return {}
    rows = csv.reader([raw for _, raw in lines])
    header = tuple(h.strip() for h in next(rows))
    if header != MANIFEST_HEADER:
        raise ValidationError(f"line {lines[0][0]}: expected header {','.join(MANIFEST_HEADER)}")
    out = {}
    for (lineno, _), row in zip(lines[1:], rows):
        if len(row) != 3:
            raise ValidationError(f"line {lineno}: expected 3 fields, got {len(row)}")
        fid, cat, name = (c.strip() for c in row)
        if cat not in FACTOR_CATEGORIES:
            raise ValidationError(f"line {lineno}: unknown category {cat!r}; expected one of {FACTOR_CATEGORIES}")
        if fid in out:
            raise ValidationError(f"line {lineno}: duplicate factor {fid!r}")
        out[fid] = FactorInfo(fid, cat, name)
    return out


# --------------------------------------------------------------------------
# panel queries


def panel_intervals(panel: ResponsePanel, factor: str, profession: str) -> list[Interval]:
    try:
        return list(panel.index[factor, profession])
    except KeyError:
        keys = ", ".join(f"{f}/{p}" for f, p in panel.index)
        raise NotFoundError(f"no responses for factor {factor!r}, profession {profession!r}; available: {keys}") from None


def build_group_fs(panel: ResponsePanel, factor: str, profession: str) -> AgreementT1:
    t1 = build_iaa(panel_intervals(panel, factor, profession), panel.scale)
    return AgreementT1(t1.fn, t1.source_count, (factor, profession))


def build_factor_zgt2(panel: ResponsePanel, factor: str) -> ZSliceSet:
    """Aggregate every profession's set for ``factor`` into one type-2 set."""
    profs = panel.professions(factor)
    if not profs:
        raise NotFoundError(f"unknown factor {factor!r}; available: {', '.join(panel.factors)}")
    return aggregate_zgt2([(p, build_group_fs(panel, factor, p)) for p in profs])


@dataclass(frozen=True)
class SimilarityMatrix:
    factor: str
    labels: tuple[str, ...]
    values: np.ndarray

    def __getitem__(self, pair: tuple[str, str]) -> float:
        a, b = pair
        return float(self.values[self.labels.index(a), self.labels.index(b)])

    def pairs(self):
        """Yield ``(row_label, col_label, value)`` over the full matrix."""
        for i, a in enumerate(self.labels):
            for j, b in enumerate(self.labels):
                yield a, b, float(self.values[i, j])


def similarity_matrix(panel: ResponsePanel, factor: str) -> SimilarityMatrix:
    """Pairwise Jaccard similarity between the professions' sets for ``factor``."""
    profs = sorted(panel.professions(factor))
    if len(profs) < 2:
        raise ValidationError(
            f"factor {factor!r} needs at least 2 professions for a similarity matrix, has {len(profs)}"
        )
    fns = [build_group_fs(panel, factor, p).fn for p in profs]
    n = len(profs)
    mat = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            mat[i, j] = mat[j, i] = jaccard(fns[i], fns[j])
    mat.setflags(write=False)
    return SimilarityMatrix(factor, tuple(profs), mat)


# --------------------------------------------------------------------------
# summary statistics


@dataclass(frozen=True)
class GroupStats:
    factor: str
    profession: str
    count: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mode: int
    mean_width: float


PanelSummary = list[GroupStats]


def midpoint_mode(midpoints: Iterable, scale: RatingScale | None = None) -> int:
    """Most frequent midpoint after rounding half-up to an integer rating.

    Ties go to the rating closest to the scale midpoint, then to the lower one.
    """
    scale = scale or RatingScale()
    ratings = [int((to_fraction(m) + Fraction(1, 2)) // 1) for m in midpoints]
    if not ratings:
        raise EmptyPanelError()
    counts = Counter(ratings)
    top = max(counts.values())
    mid = scale.midpoint
    return min((r for r, c in counts.items() if c == top), key=lambda r: (abs(r - mid), r))


def summarize(panel: ResponsePanel) -> PanelSummary:
    """Per (factor, profession) statistics over interval midpoints."""
    if not panel.records:
        raise EmptyPanelError()
    out = []
    for (factor, prof), ivs in panel.index.items():
        mids = np.array([float(iv.midpoint) for iv in ivs])
        q1, med, q3 = np.percentile(mids, [25, 50, 75])
        out.append(
            GroupStats(
                factor,
                prof,
                len(ivs),
                float(mids.min()),
                float(q1),
                float(med),
                float(q3),
                float(mids.max()),
                midpoint_mode((iv.midpoint for iv in ivs), panel.scale),
                float(sum((iv.width for iv in ivs), Fraction(0)) / len(ivs)),
            )
        )
    out.sort(key=lambda s: (s.factor, s.profession))
    return out
