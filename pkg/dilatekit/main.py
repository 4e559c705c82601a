# dilatekit/main.py
"""Command-line entry point: `python -m dilatekit <command> ...`.

stdout carries only the machine-readable result; logs, progress bars and
echoed seeds go to stderr. Exit status: 0 ok, 1 violations found, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, List, Literal, Optional, Sequence

from pydantic import BaseModel, Field, ValidationError, model_validator

from .core.intset import IntSet, LinearForm, evaluate_form, normalize_set
from .core.kernels import METHODS
from .core.setfile import read_set
from .errors import ConfigError, DilateKitError, PreconditionError
from .services.bounds import BOUND_NAMES, SET_BOUNDS, build_context, class_profile, evaluate_bound, require_known
from .services.reports import BoundReport, SweepSummary
from .services.residues import decompose
from .services.sampling import resolve_seed
from .services.search import FAMILIES, SearchSpec, extremal_min, hunt_counterexamples, margin_profile
from .services.sweeps import verify_chowla, verify_graph, verify_l6, verify_l8, verify_lemmas, verify_thm
from .settings import get_settings

logger = logging.getLogger("dilatekit")

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
TABULAR = ("profile", "verify", "hunt")

# =========================
# Run configuration
# =========================
class RunConfig(BaseModel):
    command: str
    threads: int = Field(ge=1)
    format: Literal["json", "csv", "text"] = "json"
    out: Optional[Path] = None
    full: bool = False
    progress: bool = False
    log_level: str = "WARNING"
    echo_limit: int = Field(ge=0)

    @model_validator(mode="after")
    def _check(self):
        if self.format == "csv" and self.command not in TABULAR:
            raise ValueError(f"csv output is only available for {', '.join(TABULAR)}")
        if not isinstance(logging.getLevelName(self.log_level.upper()), int):
            raise ValueError(f"unknown log level '{self.log_level}'")
        return self


def _run_config(args: argparse.Namespace) -> RunConfig:
    settings = get_settings()
    try:
        return RunConfig(
            command=args.command,
            threads=args.threads if args.threads is not None else settings.threads,
            format=args.format,
            out=args.out,
            full=args.full,
            progress=args.progress,
            log_level=args.log_level or settings.log_level,
            echo_limit=settings.echo_limit,
        )
    except ValidationError as e:
        raise ConfigError(f"invalid flags: {e.errors()[0]['msg']}") from e


def _configure_logging(level: str) -> None:
    logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level.upper())


# =========================
# Flag parsing helpers
# =========================
def parse_int_list(text: str) -> List[int]:
    """'3,4,5', '217..230' (inclusive) or a mix: '1,4..6'."""
    out: List[int] = []
    try:
        for tok in text.split(","):
            tok = tok.strip()
            if not tok:
                continue
            if ".." in tok:
                lo, hi = tok.split("..", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(tok))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers or ranges like 217..230, got '{text}'")
    if not out:
        raise argparse.ArgumentTypeError("empty integer list")
    return out


def _spec(**fields: Any) -> SearchSpec:
    try:
        return SearchSpec(**fields)
    except ValidationError as e:
        raise ConfigError(f"invalid search flags: {e.errors()[0]['msg']}") from e


def _seed(seed: Optional[int]) -> int:
    resolved = resolve_seed(seed)
    if seed is None:
        print(f"seed: {resolved}", file=sys.stderr)
    return resolved


# =========================
# Output
# =========================
def _save_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out is not None:
        _save_text(cfg.out, text)
    else:
        sys.stdout.write(text)


def _dump(data: Any) -> str:
    return json.dumps(data, indent=2)


def _echo(cfg: RunConfig, A: IntSet) -> Optional[List[int]]:
    """Element list, or None when the set is above the echo limit and --full is off."""
    return A.to_list() if cfg.full or len(A) <= cfg.echo_limit else None


def _summary_rows(summaries: Sequence[SweepSummary]) -> str:
    lines = ["lemma,instances_checked,vacuous,violations,min_margin,seed"]
    for s in summaries:
        lines.append(",".join(str(v if v is not None else "") for v in (
            s.lemma, s.instances_checked, s.vacuous, len(s.violations), s.min_margin, s.seed)))
    return "\n".join(lines)


def _emit_summaries(cfg: RunConfig, summaries: Sequence[SweepSummary], single: bool = True) -> int:
    if cfg.format == "csv":
        _emit(cfg, _summary_rows(summaries))
    elif single and len(summaries) == 1:
        _emit(cfg, _dump(summaries[0].model_dump()))
    else:
        _emit(cfg, _dump([s.model_dump() for s in summaries]))
    return 1 if any(s.violations for s in summaries) else 0


# =========================
# Commands
# =========================
def cmd_sumset(args: argparse.Namespace, cfg: RunConfig) -> int:
    form = LinearForm.parse(args.form)
    A = read_set(args.set).values
    result = evaluate_form(form, A, args.method)
    if cfg.format == "text":
        elements = _echo(cfg, result)
        body = " ".join(map(str, elements)) if elements is not None else "(elements suppressed)"
        _emit(cfg, f"{body}\nsize: {len(result)}")
    else:
        _emit(cfg, _dump({"form": list(form.coefficients), "size": len(result), "elements": _echo(cfg, result)}))
    return 0


def cmd_normalize(args: argparse.Namespace, cfg: RunConfig) -> int:
    norm = normalize_set(read_set(args.set).values)
    data = {"shift": norm.shift, "scale": norm.scale, "size": len(norm.normalized),
            "elements": _echo(cfg, norm.normalized)}
    if cfg.format == "text":
        _emit(cfg, f"shift: {norm.shift}\nscale: {norm.scale}\n"
                   + " ".join(map(str, data["elements"] or ["(elements suppressed)"])))
    else:
        _emit(cfg, _dump(data))
    return 0


def cmd_decompose(args: argparse.Namespace, cfg: RunConfig) -> int:
    A = read_set(args.set).values
    d = decompose(A, args.k)
    data = d.to_dict(args.reading, None if cfg.full else cfg.echo_limit)
    if args.profile:
        data["profile"] = class_profile(build_context(A, args.k, n_jobs=cfg.threads))
    _emit(cfg, _dump(data))
    return 0


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    jobs, progress = cfg.threads, cfg.progress
    lemma = args.lemma
    if lemma == "chowla":
        summaries = [verify_chowla(args.max_n, jobs, progress)]
    elif lemma == "l6":
        summaries = [verify_l6(args.max_n, jobs, progress)]
    elif lemma == "l8":
        summaries = [verify_l8(args.moduli, jobs, progress)]
    elif lemma == "graph":
        summaries = [verify_graph(args.universe, args.k, jobs, progress)]
    elif lemma == "lemmas":
        return _emit_summaries(cfg, verify_lemmas(args.universe, args.k, args.names, jobs, progress),
                               single=False)
    else:
        summaries = [verify_thm(args.k, args.size, args.samples, args.universe, _seed(args.seed),
                                jobs, progress, args.ignore_hypotheses)]
    return _emit_summaries(cfg, summaries)


def cmd_check(args: argparse.Namespace, cfg: RunConfig) -> int:
    A = read_set(args.set).values
    reports = evaluate_bound(args.bound, A, args.k, cfg.threads)
    data = [r.model_dump() for r in reports]
    _emit(cfg, _dump(data[0] if len(data) == 1 and isinstance(reports[0], BoundReport) else data))
    return 1 if any(r.violated for r in reports) else 0


REPORT_FIELDS = ("bound_name", "k", "size", "actual", "bound", "margin", "hypotheses", "satisfied")


def cmd_report(args: argparse.Namespace, cfg: RunConfig) -> int:
    """One JSON line per (set, bound); bounds that reject the input are skipped with a log line."""
    lines, violated = [], False
    for path in args.set:
        A = read_set(path).values
        for name in args.bounds:
            if name not in SET_BOUNDS:
                raise ConfigError(f"report covers set bounds only ({', '.join(SET_BOUNDS)}), got '{name}'")
            try:
                report = SET_BOUNDS[name](A, args.k)
            except PreconditionError as e:
                logger.info("%s on %s skipped: %s", name, path, e)
                continue
            violated |= report.violated
            lines.append(json.dumps(report.model_dump(include=set(REPORT_FIELDS))))
    _emit(cfg, "\n".join(lines))
    return 1 if violated else 0


def cmd_extremal(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = _spec(k=args.k, set_size=args.size, universe_bound=args.universe, mode=args.mode,
                 samples=args.samples, seed=_seed(args.seed) if args.mode == "random" else args.seed,
                 budget=args.budget, normalize=not args.raw, families=args.families)
    result = extremal_min(spec, cfg.threads, cfg.progress)
    _emit(cfg, _dump(result.model_dump()))
    return 1 if any(r.violated for r in result.cross_checks) else 0


def cmd_hunt(args: argparse.Namespace, cfg: RunConfig) -> int:
    require_known(args.bound)
    sizes = args.sizes or [1]
    spec = _spec(k=args.k, set_size=max(sizes), universe_bound=args.universe, mode=args.mode,
                 samples=args.samples, seed=_seed(args.seed) if args.mode == "random" else args.seed,
                 budget=args.budget, families=args.families)
    summary = hunt_counterexamples(spec, args.bound, sizes, cfg.threads, cfg.progress, args.ignore_hypotheses)
    return _emit_summaries(cfg, [summary])


def cmd_profile(args: argparse.Namespace, cfg: RunConfig) -> int:
    df = margin_profile(args.k, args.sizes, args.family)
    if cfg.format == "csv":
        _emit(cfg, df.to_csv(index=False))
    elif cfg.format == "text":
        _emit(cfg, df.to_string(index=False))
    else:
        _emit(cfg, _dump([{c: int(v) for c, v in row.items()} for row in df.to_dict(orient="records")]))
    return 0


# =========================
# Parser
# =========================
def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--threads", type=int, default=None, help="Worker count (default: DILATEKIT_THREADS or CPU count).")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out", type=Path, default=None, help="Write the result here instead of stdout.")
    p.add_argument("--full", action="store_true", help="Echo sets of any size.")
    p.add_argument("--log-level", default=None)
    p.add_argument("--progress", action="store_true", help="Progress bars on stderr.")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="dilatekit", description="Dilated sumsets |m·A + k·A|: compute, check, search.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sumset", parents=[common], help="Evaluate a linear form on a set.")
    p.add_argument("--form", required=True, help="Comma-separated nonzero coefficients, e.g. 2,3.")
    p.add_argument("--set", required=True, type=Path)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.set_defaults(handler=cmd_sumset)

    p = sub.add_parser("normalize", parents=[common], help="Translate to 0 and divide by the gcd.")
    p.add_argument("--set", required=True, type=Path)
    p.set_defaults(handler=cmd_normalize)

    p = sub.add_parser("decompose", parents=[common], help="Residue classes of A modulo k.")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--set", required=True, type=Path)
    p.add_argument("--reading", choices=("projection", "literal"), default="projection")
    p.add_argument("--profile", action="store_true",
                   help="Add per-class |2·X_i + k·X_i| and |Δ_ii|; for odd k they sum to |2·A + k·A|.")
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("verify", help="Exhaustive and seeded verification sweeps.")
    vsub = p.add_subparsers(dest="lemma", required=True)
    v = vsub.add_parser("chowla", parents=[common])
    v.add_argument("--max-n", type=int, default=10)
    v = vsub.add_parser("l6", parents=[common])
    v.add_argument("--max-n", type=int, default=12)
    v = vsub.add_parser("l8", parents=[common])
    v.add_argument("--moduli", type=parse_int_list, default=[6, 9, 10])
    v = vsub.add_parser("graph", parents=[common])
    v.add_argument("--universe", type=int, default=13)
    v.add_argument("--k", type=parse_int_list, default=[3, 4, 5, 6])
    v = vsub.add_parser("lemmas", parents=[common])
    v.add_argument("--universe", type=int, default=12)
    v.add_argument("--k", type=parse_int_list, default=[3, 9])
    v.add_argument("--names", type=lambda s: [t for t in s.split(",") if t], default=["2full", "imp", "imp2", "da"])
    v = vsub.add_parser("thm", parents=[common])
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--size", type=int, required=True)
    v.add_argument("--samples", type=int, default=50)
    v.add_argument("--universe", type=int, required=True)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--ignore-hypotheses", action="store_true", help="Count failures even when hypotheses are unmet.")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("check", parents=[common], help="One named bound on one set.")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--set", required=True, type=Path)
    p.add_argument("--bound", choices=BOUND_NAMES, default="thm")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("report", parents=[common], help="JSON lines of bound reports over set files.")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--set", required=True, type=Path, action="append")
    p.add_argument("--bounds", type=lambda s: [t for t in s.split(",") if t], default=["thm"])
    p.set_defaults(handler=cmd_report)

    search_flags = argparse.ArgumentParser(add_help=False)
    search_flags.add_argument("--k", type=int, required=True)
    search_flags.add_argument("--universe", type=int, required=True)
    search_flags.add_argument("--samples", type=int, default=100)
    search_flags.add_argument("--seed", type=int, default=None)
    search_flags.add_argument("--budget", type=int, default=None)
    search_flags.add_argument("--families", type=lambda s: [t for t in s.split(",") if t], default=list(FAMILIES))

    p = sub.add_parser("extremal", parents=[common, search_flags], help="Minimum |2·A + k·A| at fixed |A|.")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "random", "structured"), default="exhaustive")
    p.add_argument("--raw", action="store_true", help="Enumerate raw subsets instead of normalized ones.")
    p.set_defaults(handler=cmd_extremal)

    p = sub.add_parser("hunt", parents=[common, search_flags], help="Search for sets where a bound fails.")
    p.add_argument("--bound", required=True)
    p.add_argument("--sizes", type=parse_int_list, default=None)
    p.add_argument("--mode", choices=("exhaustive", "random", "structured"), default="random")
    p.add_argument("--ignore-hypotheses", action="store_true")
    p.set_defaults(handler=cmd_hunt)

    p = sub.add_parser("profile", parents=[common], help="Margin over the theorem bound along a set family.")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--family", choices=FAMILIES, default="ap")
    p.add_argument("--sizes", type=parse_int_list, required=True)
    p.set_defaults(handler=cmd_profile)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = _run_config(args)
        _configure_logging(cfg.log_level)
        return args.handler(args, cfg)
    except DilateKitError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
