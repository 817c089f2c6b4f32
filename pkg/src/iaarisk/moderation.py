"""Moderate driver risk scores by the defuzzified impact of contextual factors.

Three steps: defuzzify each factor's type-2 set into a crisp impact score on
the rating scale, merge the impacts of the conditions a driver faced into a
joint effect, then map the joint effect linearly onto ``[norm_lo, norm_hi]``
and multiply it into the base risk score.

Arithmetic is exact (``Fraction``) with explicit half-up rounding at the
points named in :class:`ModerationConfig`.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Sequence, TextIO

from .errors import DomainError, NotFoundError, ValidationError
from .fuzzy_core import RatingScale, ZSliceSet, centroid_zgt2, to_fraction

ENSEMBLES = ("mean", "min", "weighted_mean")
# declared by the method family but not implementable without expert rules / priors
UNIMPLEMENTED_ENSEMBLES = ("fuzzy_rules", "bayes")

PAPER_IMPACTS = {
    "high_time_pressure": 2.45,
    "low_time_pressure": 7.55,
    "absence_of_cameras": 4.36,
    "presence_of_cameras": 5.76,
    "rainy": 3.78,
    "energetic": 6.02,
}


def round_half_up(value, dp: int | None) -> Fraction:
    """Round an exact value to ``dp`` decimals, ties away from zero; ``None`` is a no-op."""
    q = to_fraction(value)
    if dp is None:
        return q
    scaled = q * 10**dp
    units = scaled.__floor__()
    rem = scaled - units
    if rem > Fraction(1, 2) or (rem == Fraction(1, 2) and q >= 0):
        units += 1
    return Fraction(units, 10**dp)


@dataclass(frozen=True)
class ModerationConfig:
    """Knobs for the moderation pipeline.

    ``weights`` is only used by ``weighted_mean``: either a sequence aligned
    with the scores, or a mapping from condition label to weight.
    ``round_joint_dp`` is ``None`` by default (joint effect kept exact).
    """

    ensemble: str = "mean"
    weights: Sequence[float] | Mapping[str, float] | None = None
    norm_lo: float = 0.5
    norm_hi: float = 1.5
    round_impacts_dp: int | None = 2
    round_joint_dp: int | None = None
    round_multiplier_dp: int | None = 3
    round_score_dp: int | None = 2
    clamp: tuple[float, float] = (0.0, 100.0)
    scale: RatingScale = field(default_factory=RatingScale)

    def __post_init__(self):
        if self.ensemble in UNIMPLEMENTED_ENSEMBLES:
            raise NotImplementedError(f"ensemble {self.ensemble!r} needs expert rules or priors; not available")
        if self.ensemble not in ENSEMBLES:
            raise ValidationError(f"unknown ensemble {self.ensemble!r}; expected one of {ENSEMBLES}")
        if self.ensemble == "weighted_mean" and self.weights is None:
            raise ValidationError("weighted_mean ensemble requires weights")
        if to_fraction(self.norm_lo) > to_fraction(self.norm_hi):
            raise ValidationError(f"norm_lo must not exceed norm_hi, got [{self.norm_lo}, {self.norm_hi}]")
        for name in ("round_impacts_dp", "round_joint_dp", "round_multiplier_dp", "round_score_dp"):
            dp = getattr(self, name)
            if dp is not None and (not isinstance(dp, int) or dp < 0):
                raise ValidationError(f"{name} must be a non-negative integer or None")
        lo, hi = self.clamp
        if not lo < hi:
            raise ValidationError(f"clamp lower bound must be below upper, got {self.clamp}")
        if isinstance(self.weights, Mapping):
            object.__setattr__(self, "weights", MappingProxyType(dict(self.weights)))
        elif self.weights is not None:
            object.__setattr__(self, "weights", tuple(self.weights))


class ImpactRegistry(Mapping[str, float]):
    """Read-only map from condition label to crisp impact score."""

    def __init__(self, scores: Mapping[str, float], scale: RatingScale | None = None):
        self.scale = scale or RatingScale()
        data = {}
        for label, score in scores.items():
            q = to_fraction(score)
            if not self.scale.min <= q <= self.scale.max:
                raise ValidationError(
                    f"impact score for {label!r} = {score} outside scale [{self.scale.min}, {self.scale.max}]"
                )
            data[str(label)] = float(score)
        self._data = data

    def __getitem__(self, label):
        return self._data[label]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    def __repr__(self):
        return f"ImpactRegistry({self._data!r})"

    @classmethod
    def paper_defaults(cls) -> "ImpactRegistry":
        return cls(PAPER_IMPACTS)

    @classmethod
    def from_zgt2(cls, sets: Mapping[str, ZSliceSet], cfg: "ModerationConfig | None" = None) -> "ImpactRegistry":
        cfg = cfg or ModerationConfig()
        return cls({label: defuzzify_factor(z, cfg) for label, z in sets.items()}, cfg.scale)


@dataclass(frozen=True)
class ModerationResult:
    base_score: float
    conditions: tuple[str, ...]
    impact_scores: tuple[float, ...]
    joint_effect: float
    multiplier: float
    moderated_score: float
    audit: tuple[str, ...]


def defuzzify_factor(z: ZSliceSet, cfg: ModerationConfig | None = None) -> float:
    cfg = cfg or ModerationConfig()
    return float(round_half_up(centroid_zgt2(z), cfg.round_impacts_dp))


def _weights_for(scores, cfg: ModerationConfig, labels) -> list[Fraction]:
    w = cfg.weights
    if isinstance(w, Mapping):
        if labels is None:
            raise ValidationError("label-keyed weights need condition labels")
        missing = [lab for lab in labels if lab not in w]
        if missing:
            raise ValidationError(f"no weight for conditions {missing}")
        ws = [to_fraction(w[lab]) for lab in labels]
    else:
        ws = [to_fraction(x) for x in w]
    if len(ws) != len(scores):
        raise ValidationError(f"weight-length mismatch: {len(ws)} weights for {len(scores)} scores")
    if any(x < 0 for x in ws) or sum(ws) == 0:
        raise ValidationError("weights must be non-negative and not all zero")
    return ws


def _merge_exact(scores, cfg: ModerationConfig, labels=None) -> Fraction:
    if not scores:
        raise ValidationError("no impact scores to merge")
    qs = [to_fraction(s) for s in scores]
    for s in qs:
        cfg.scale.check(s, "impact score")
    if cfg.ensemble == "mean":
        return sum(qs, Fraction(0)) / len(qs)
    if cfg.ensemble == "min":
        return min(qs)
    ws = _weights_for(qs, cfg, labels)
    return sum((w * s for w, s in zip(ws, qs)), Fraction(0)) / sum(ws)


def merge_impacts(scores: Sequence[float], cfg: ModerationConfig | None = None, labels=None) -> float:
    """Joint effect of several impacts (mean, min or weighted mean); not rounded."""
    return float(_merge_exact(scores, cfg or ModerationConfig(), labels))


def _normalize_exact(joint, cfg: ModerationConfig) -> Fraction:
    j = cfg.scale.check(joint, "joint effect")
    lo, hi = to_fraction(cfg.norm_lo), to_fraction(cfg.norm_hi)
    m = lo + (j - cfg.scale.min) * (hi - lo) / cfg.scale.width
    return round_half_up(m, cfg.round_multiplier_dp)


def normalize_multiplier(joint: float, cfg: ModerationConfig | None = None) -> float:
    """Map a joint effect linearly from the rating scale onto ``[norm_lo, norm_hi]``."""
    return float(_normalize_exact(joint, cfg or ModerationConfig()))


def _fmt(q, dp=None) -> str:
    return f"{float(q):.{dp}f}" if dp is not None else f"{float(q):.6f}".rstrip("0").rstrip(".")


def moderate(
    base_score: float,
    conditions: Sequence[str],
    registry: Mapping[str, float],
    cfg: ModerationConfig | None = None,
) -> ModerationResult:
    """Moderate one driver's base risk score (a percentage) by their conditions."""
    cfg = cfg or ModerationConfig()
    conditions = tuple(conditions)
    if not conditions:
        raise ValidationError("no conditions given: nothing to moderate")
    unknown = [c for c in conditions if c not in registry]
    if unknown:
        raise NotFoundError(f"unknown conditions {unknown}; known: {', '.join(sorted(registry))}")
    base = to_fraction(base_score)
    if not 0 <= base <= 100:
        raise DomainError(f"base score {base_score} outside [0, 100]")

    impacts = [round_half_up(registry[c], cfg.round_impacts_dp) for c in conditions]
    joint = round_half_up(_merge_exact(impacts, cfg, conditions), cfg.round_joint_dp)
    mult = _normalize_exact(joint, cfg)
    lo, hi = (to_fraction(c) for c in cfg.clamp)
    raw = base * mult
    clamped = min(max(raw, lo), hi)
    score = round_half_up(clamped, cfg.round_score_dp)

    audit = [f"base score: {_fmt(base)}%"]
    audit += [f"factor {c}: impact {_fmt(s)}" for c, s in zip(conditions, impacts)]
    audit.append(f"joint effect ({cfg.ensemble}): {_fmt(joint)}")
    audit.append(
        f"multiplier: norm({_fmt(joint)})[{_fmt(cfg.norm_lo)}, {_fmt(cfg.norm_hi)}] = {_fmt(mult)}"
    )
    line = f"moderated score: {_fmt(base)}% x {_fmt(mult)} = {_fmt(score)}%"
    if clamped != raw:
        line += f" (clamped from {_fmt(raw)})"
    audit.append(line)

    return ModerationResult(
        float(base),
        conditions,
        tuple(float(s) for s in impacts),
        float(joint),
        float(mult),
        float(score),
        tuple(audit),
    )


# --------------------------------------------------------------------------
# CSV formats


def _rows(source: TextIO | str):
    if isinstance(source, str):
        source = io.StringIO(source)
    for lineno, raw in enumerate(source, start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        yield lineno, next(csv.reader([raw]))


def read_registry(source: TextIO | str, scale: RatingScale | None = None) -> ImpactRegistry:
    """Parse ``condition_label,impact_score`` rows (a header row is optional)."""
    scores = {}
    for lineno, row in _rows(source):
        row = [c.strip() for c in row]
        if row == ["condition_label", "impact_score"]:
            continue
        if len(row) != 2:
            raise ValidationError(f"line {lineno}: expected 2 fields, got {len(row)}")
        label, value = row
        try:
            score = float(value)
        except ValueError:
            raise ValidationError(f"line {lineno}: impact score is not a number: {value!r}") from None
        if label in scores:
            raise ValidationError(f"line {lineno}: duplicate condition {label!r}")
        scores[label] = score
    return ImpactRegistry(scores, scale)


def write_registry(registry: Mapping[str, float], dp: int = 2) -> str:
    lines = ["condition_label,impact_score"]
    lines += [f"{label},{float(registry[label]):.{dp}f}" for label in sorted(registry)]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BatchRow:
    driver_id: str
    base_score: float
    conditions: tuple[str, ...]
    line: int


def read_batch(source: TextIO | str) -> list[BatchRow]:
    """Parse ``driver_id,base_score,label1;label2;...`` rows (header optional)."""
    out = []
    for lineno, row in _rows(source):
        row = [c.strip() for c in row]
        if row and row[0] == "driver_id":
            continue
        if len(row) != 3:
            raise ValidationError(f"line {lineno}: expected 3 fields, got {len(row)}")
        driver, base_s, conds = row
        try:
            base = float(base_s)
        except ValueError:
            raise ValidationError(f"line {lineno}: base score is not a number: {base_s!r}") from None
        labels = tuple(c.strip() for c in conds.split(";") if c.strip())
        if not labels:
            raise ValidationError(f"line {lineno}: no conditions for driver {driver!r}")
        out.append(BatchRow(driver, base, labels, lineno))
    return out


def moderate_batch(rows: Sequence[BatchRow], registry, cfg: ModerationConfig | None = None):
    """Moderate every row; errors are re-raised with the offending line number."""
    results = []
    for r in rows:
        try:
            results.append((r, moderate(r.base_score, r.conditions, registry, cfg)))
        except NotFoundError as e:
            raise NotFoundError(f"line {r.line}: {e}") from None
        except (ValidationError, DomainError) as e:
            raise type(e)(f"line {r.line}: {e}") from None
    return results


BATCH_OUTPUT_HEADER = ("driver_id", "base_score", "joint_effect", "multiplier", "moderated_score")


def write_batch_results(results, cfg: ModerationConfig | None = None) -> str:
    cfg = cfg or ModerationConfig()
    mdp = cfg.round_multiplier_dp if cfg.round_multiplier_dp is not None else 6
    sdp = cfg.round_score_dp if cfg.round_score_dp is not None else 6
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BATCH_OUTPUT_HEADER)
    for row, res in results:
        w.writerow(
            [
                row.driver_id,
                f"{res.base_score:.2f}",
                f"{res.joint_effect:.4f}",
                f"{res.multiplier:.{mdp}f}",
                f"{res.moderated_score:.{sdp}f}",
            ]
        )
    return out.getvalue()
