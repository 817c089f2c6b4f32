"""Command-line front end: ``iaarisk {build-fs,similarity,defuzzify,moderate,export-plot}``.

Exit codes: 0 success, 2 usage, 3 validation, 4 I/O, 5 domain (degenerate
sets, unknown labels, partial results), 6 empty panel.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .elicitation import build_factor_zgt2, build_group_fs, parse_responses, similarity_matrix
from .errors import DegenerateSetError, DomainError, EmptyPanelError, NotFoundError, ValidationError
from .fuzzy_core import RatingScale, sample, to_fraction
from .moderation import (
    ModerationConfig,
    defuzzify_factor,
    moderate_batch,
    read_batch,
    read_registry,
    write_batch_results,
    write_registry,
)

log = logging.getLogger("iaarisk")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4
EXIT_DOMAIN = 5
EXIT_EMPTY = 6


def _dec(q, dp=6) -> str:
    return f"{float(q):.{dp}f}"


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def _scale(args) -> RatingScale:
    return RatingScale(args.scale_min, args.scale_max)


def _read_panel(args):
    with open(args.responses, encoding="utf-8") as fh:
        return parse_responses(fh, _scale(args))


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _table(header, rows) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return out.getvalue()


# --------------------------------------------------------------------------
# subcommands


def cmd_build_fs(args) -> int:
    panel = _read_panel(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    keys = [
        (f, p)
        for f, p in panel.index
        if (args.factor is None or f == args.factor) and (args.profession is None or p == args.profession)
    ]
    if not keys:
        raise NotFoundError(f"no (factor, profession) group matches factor={args.factor!r} profession={args.profession!r}")
    for factor, prof in sorted(keys):
        t1 = build_group_fs(panel, factor, prof)
        fn = t1.fn
        rows = [("cell", _dec(a), _dec(b), _dec(v), _frac(v)) for a, b, v in fn.cells()]
        rows += [("point", _dec(x), _dec(x), _dec(g), _frac(g)) for x, g in fn.point_overrides]
        stem = f"{_safe(factor)}__{_safe(prof)}"
        (out_dir / f"{stem}.fs.csv").write_text(
            f"# factor={factor} profession={prof} n={t1.source_count}\n"
            + _table(("kind", "x_lo", "x_hi", "grade", "grade_exact"), rows),
            encoding="utf-8",
        )
        grid = [(_dec(x), _dec(g)) for x, g in sample(fn, args.step)]
        (out_dir / f"{stem}.grid.csv").write_text(_table(("x", "grade"), grid), encoding="utf-8")
        log.info("wrote %s.{fs,grid}.csv", stem)
    return EXIT_OK


def cmd_similarity(args) -> int:
    panel = _read_panel(args)
    rows, status = [], EXIT_OK
    for factor in sorted(panel.factors):
        try:
            mat = similarity_matrix(panel, factor)
        except ValidationError as e:
            log.warning("skipping %s: %s", factor, e)
            status = EXIT_DOMAIN
            continue
        rows += [(factor, a, b, _dec(v)) for a, b, v in mat.pairs()]
    _emit(_table(("factor", "profession_a", "profession_b", "similarity"), rows), args.out)
    return status


def cmd_defuzzify(args) -> int:
    panel = _read_panel(args)
    cfg = ModerationConfig(scale=panel.scale)
    scores, status = {}, EXIT_OK
    for factor in sorted(panel.factors):
        try:
            scores[factor] = defuzzify_factor(build_factor_zgt2(panel, factor), cfg)
        except DegenerateSetError as e:
            log.error("factor %s skipped: %s", factor, e)
            status = EXIT_DOMAIN
    _emit(write_registry(scores, cfg.round_impacts_dp), args.out)
    return status


def _moderation_config(args) -> ModerationConfig:
    ensemble = {"weighted": "weighted_mean"}.get(args.ensemble, args.ensemble)
    weights = None
    if args.weights:
        weights = {}
        for item in args.weights.split(","):
            label, _, w = item.partition("=")
            if not w:
                raise ValidationError(f"--weights expects label=weight pairs, got {item!r}")
            weights[label.strip()] = float(w)
    return ModerationConfig(
        ensemble=ensemble,
        weights=weights,
        norm_lo=args.norm_lo,
        norm_hi=args.norm_hi,
        round_joint_dp=args.round_joint_dp,
        scale=_scale(args),
    )


def cmd_moderate(args) -> int:
    cfg = _moderation_config(args)
    with open(args.registry, encoding="utf-8") as fh:
        registry = read_registry(fh, cfg.scale)
    with open(args.batch, encoding="utf-8") as fh:
        rows = read_batch(fh)
    results = moderate_batch(rows, registry, cfg)
    _emit(write_batch_results(results, cfg), args.out)
    audit_path = args.audit or (f"{args.out}.audit.txt" if args.out else None)
    if audit_path:
        text = "\n\n".join(
            "\n".join([f"driver {row.driver_id}"] + [f"  {line}" for line in res.audit]) for row, res in results
        )
        Path(audit_path).write_text(text + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_export_plot(args) -> int:
    panel = _read_panel(args)
    z = build_factor_zgt2(panel, args.factor)
    rows = [(_dec(x), _dec(y), _dec(zv)) for x, y, zv in sample(z, args.step, args.y_step)]
    _emit(_table(("x", "y", "z"), rows), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------


def _positive(text: str) -> Fraction:
    try:
        q = to_fraction(text)
    except ValidationError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    if q <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return q


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scale-min", type=float, default=1.0)
    common.add_argument("--scale-max", type=float, default=9.0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="iaarisk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-fs", parents=[common], help="IAA type-1 set per (factor, profession)")
    p.add_argument("responses")
    p.add_argument("--factor")
    p.add_argument("--profession")
    p.add_argument("--step", type=_positive, default=Fraction(1, 10))
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_build_fs)

    p = sub.add_parser("similarity", parents=[common], help="Jaccard similarity between professions per factor")
    p.add_argument("responses")
    p.add_argument("--out")
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("defuzzify", parents=[common], help="impact registry from per-factor type-2 centroids")
    p.add_argument("responses")
    p.add_argument("--out")
    p.set_defaults(func=cmd_defuzzify)

    p = sub.add_parser("moderate", parents=[common], help="moderate base risk scores")
    p.add_argument("registry")
    p.add_argument("batch")
    p.add_argument("--norm-lo", type=float, default=0.5)
    p.add_argument("--norm-hi", type=float, default=1.5)
    p.add_argument("--ensemble", choices=("mean", "min", "weighted"), default="mean")
    p.add_argument("--weights", help="label=weight pairs, comma separated (weighted ensemble)")
    p.add_argument("--round-joint-dp", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--audit", help="audit trail path (default: <out>.audit.txt)")
    p.set_defaults(func=cmd_moderate)

    p = sub.add_parser("export-plot", parents=[common], help="(x, y, z) grid of a factor's type-2 set")
    p.add_argument("responses")
    p.add_argument("--factor", required=True)
    p.add_argument("--step", type=_positive, default=Fraction(1, 10))
    p.add_argument("--y-step", type=_positive, default=Fraction(1, 20))
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("iaarisk: %(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except EmptyPanelError as e:
        log.error("%s", e)
        return EXIT_EMPTY
    except (NotFoundError, DomainError) as e:
        log.error("%s", e)
        return EXIT_DOMAIN
    except ValidationError as e:
        log.error("%s", e)
        return EXIT_VALIDATION
    except OSError as e:
        log.error("%s", e)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
