"""Batch command-line front end.

Subcommands: validate, profile, generate, evaluate, classify, sweep, stats.
Every run is reproducible from its flag set alone: the seed (flag
``--seed`` or environment variable ``REGBENCH_SEED``) is echoed in the
output header, output rows are canonically ordered, and no timestamps are
emitted.  Exit codes: 0 success, 1 content/validation failures (findings
are streamed), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .algorithms import parse_algorithm_spec, run_algorithm
from .analysis import (
    AnalysisConfig,
    classify,
    profile_rows,
    profiles_for_corpus,
    scene_profile,
    spec_count_table,
)
from .corpus import (
    Corpus,
    builtin_overlap_pairs,
    filter_trials,
    load_re_records,
    load_scenes,
    parse_overlap_table,
    parse_scene_file_collecting,
    validate_corpus,
)
from .errors import ConfigurationError, RegbenchError
from .evaluation import evaluate, sweep_type_probability
from .report import (
    FORMATS,
    atomic_write,
    render_evaluation_figure,
    render_sweep_figure,
    render_table,
)
from .stats import ContingencyTable2x2, chi_squared_independence, one_way_anova

DEFAULT_SWEEP_GRID = tuple(i / 10 for i in range(11))
DEFAULT_SWEEP_RUNS = 100


def _warn(message: str) -> None:
    print(f"regbench: {message}", file=sys.stderr)


def _resolve_seed(args: argparse.Namespace) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("REGBENCH_SEED", "0"))


def _analysis_config(args: argparse.Namespace) -> AnalysisConfig:
    overrides = tuple((name, True) for name in getattr(args, "use_attribute", []))
    return AnalysisConfig(
        usable_overrides=overrides,
        enumeration_bound=getattr(args, "bound", 20),
    )


def _emit(args: argparse.Namespace, columns, rows, title: str) -> None:
    text = render_table(columns, rows, args.format, title=title)
    if args.output is not None:
        atomic_write(args.output, text)
    else:
        sys.stdout.write(text)


def _load_corpus_args(args: argparse.Namespace) -> tuple[Corpus, list]:
    scenes = load_scenes(args.scenes)
    issues: list = []
    res = ()
    if getattr(args, "res", None) is not None:
        result = load_re_records(args.res, domain=getattr(args, "domain", None))
        res = result.records
        issues = [i for i in result.issues if i.severity == "error"]
        for issue in result.issues:
            _warn(f"{issue.severity} at {issue.location}: {issue.message}")
    return Corpus(args.name, tuple(scenes), tuple(res)), issues


def _apply_trial_filter(args: argparse.Namespace, corpus: Corpus) -> Corpus:
    if getattr(args, "trials", None) is None:
        return corpus
    if args.trials == "builtin":
        pairs = builtin_overlap_pairs()
    else:
        pairs = parse_overlap_table(Path(args.trials).read_text("utf-8"))
    column = 0 if args.trials_side == "left" else 1
    keep = [pair[column] for pair in pairs]
    result = filter_trials(corpus, keep)
    for trial in result.missing:
        _warn(f"trial filter id {trial!r} not present in the corpus")
    return result.corpus


def _cmd_validate(args: argparse.Namespace) -> int:
    rows = []
    scenes, scene_issues = parse_scene_file_collecting(Path(args.scenes).read_text("utf-8"))
    for issue in scene_issues:
        rows.append({"kind": "parse-error", "location": issue.location, "message": issue.message})
    res = ()
    if args.res is not None:
        result = load_re_records(args.res, domain=args.domain)
        res = result.records
        for issue in result.issues:
            kind = "parse-error" if issue.severity == "error" else "warning"
            rows.append({"kind": kind, "location": issue.location, "message": issue.message})
    report = validate_corpus(Corpus(args.name, tuple(scenes), tuple(res)))
    for finding in report:
        rows.append(
            {"kind": finding.kind, "location": finding.location, "message": finding.message}
        )
    _emit(args, ("kind", "location", "message"), rows, f"regbench validate {args.name}")
    return 1 if any(r["kind"] != "warning" for r in rows) else 0


def _cmd_profile(args: argparse.Namespace) -> int:
    cfg = _analysis_config(args)
    scenes = load_scenes(args.scenes)
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            profiles = {
                p.trial_id: p for p in pool.map(lambda s: scene_profile(s, cfg), scenes)
            }
    else:
        profiles = {s.trial_id: scene_profile(s, cfg) for s in scenes}
    _emit(
        args,
        ("trial_id", "m", "n_minimal", "n_numerical"),
        profile_rows(profiles),
        "regbench profile",
    )
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    cfg = _analysis_config(args)
    seed = _resolve_seed(args)
    scenes = load_scenes(args.scenes)
    rows = []
    for spec_text in args.algo:
        spec = parse_algorithm_spec(spec_text)
        result = run_algorithm(scenes, spec, seed=seed, cfg=cfg, jobs=args.jobs)
        for trial, message in sorted(result.errors.items()):
            _warn(f"{spec.label} on trial {trial!r}: {message}")
        for trial in sorted(result.outputs):
            out = result.outputs[trial]
            rows.append(
                {
                    "trial_id": trial,
                    "algorithm": out.algorithm,
                    "distinguishing": out.distinguishing,
                    "description": out.description.render(),
                }
            )
    rows.sort(key=lambda r: (r["trial_id"], r["algorithm"]))
    _emit(
        args,
        ("trial_id", "algorithm", "distinguishing", "description"),
        rows,
        f"regbench generate seed={seed}",
    )
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    cfg = _analysis_config(args)
    corpus, issues = _load_corpus_args(args)
    corpus = _apply_trial_filter(args, corpus)
    profiles = profiles_for_corpus(corpus, cfg)
    if args.summary:
        counts = spec_count_table(corpus, profiles, cfg)
        rows = [{"domain": domain, **c.as_dict()} for domain, c in counts.items()]
        columns = ("domain", "total", "mini", "real", "nom", "num", "wrong", "other", "under")
    else:
        rows = []
        for re in corpus.res:
            scene = corpus.scenes_by_trial.get(re.trial_id)
            if scene is None:
                _warn(f"RE for trial {re.trial_id!r} has no scene; skipped")
                continue
            report = classify(re, scene, profiles[scene.trial_id], cfg)
            rows.append(
                {
                    "trial_id": re.trial_id,
                    "participant": re.participant,
                    "position": re.position.value,
                    "category": report.category.value,
                    "superfluity": report.superfluity,
                    "deficit": report.deficit,
                    "removable": ";".join(p.render() for p in report.removable),
                }
            )
        rows.sort(key=lambda r: (r["trial_id"], r["participant"], r["position"]))
        columns = (
            "trial_id",
            "participant",
            "position",
            "category",
            "superfluity",
            "deficit",
            "removable",
        )
    _emit(args, columns, rows, f"regbench classify {corpus.name}")
    return 1 if issues else 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _analysis_config(args)
    seed = _resolve_seed(args)
    corpus, _ = _load_corpus_args(args)
    corpus = _apply_trial_filter(args, corpus)
    group_by = tuple(k for k in (args.group or "").split(",") if k)
    outputs = {}
    for spec_text in args.algo:
        spec = parse_algorithm_spec(spec_text)
        result = run_algorithm(corpus, spec, seed=seed, cfg=cfg, jobs=args.jobs)
        for trial, message in sorted(result.errors.items()):
            _warn(f"{spec.label} on trial {trial!r}: {message}")
        outputs[spec.label] = result
    evaluated = evaluate(
        corpus,
        outputs,
        group_by,
        include_other=not args.exclude_other,
        on_values=args.dice_on_values,
    )
    for trial in evaluated.dangling:
        _warn(f"REs for trial {trial!r} have no scene; excluded")
    for label, trial in evaluated.missing:
        _warn(f"no {label} output for trial {trial!r}; its REs were excluded")
    rows = [
        {
            "corpus": s.corpus,
            "domain": s.domain,
            "position": s.position,
            "algorithm": s.algorithm,
            "n": s.n,
            "mean_dice": s.mean_dice,
            "sd": s.sd,
            "prp": s.prp,
        }
        for s in evaluated.summaries
    ]
    _emit(
        args,
        ("corpus", "domain", "position", "algorithm", "n", "mean_dice", "sd", "prp"),
        rows,
        f"regbench evaluate {corpus.name} seed={seed}",
    )
    if args.plot is not None:
        render_evaluation_figure(evaluated.summaries, args.plot)
    return 0


def _parse_grid(text: str | None) -> tuple[float, ...]:
    if text is None:
        return DEFAULT_SWEEP_GRID
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigurationError(f"cannot parse probability grid {text!r}") from None


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _analysis_config(args)
    seed = _resolve_seed(args)
    corpus, _ = _load_corpus_args(args)
    corpus = _apply_trial_filter(args, corpus)
    sweep = sweep_type_probability(
        corpus,
        args.algo,
        _parse_grid(args.grid),
        args.runs,
        seed,
        cfg=cfg,
        include_other=not args.exclude_other,
        on_values=args.dice_on_values,
    )
    rows = [
        {"p": p, "mean_dice": mean, "runs": sweep.runs, "seed": sweep.seed}
        for p, mean in zip(sweep.probabilities, sweep.mean_dice)
    ]
    _emit(
        args,
        ("p", "mean_dice", "runs", "seed"),
        rows,
        f"regbench sweep {sweep.algorithm} seed={seed}",
    )
    if args.plot is not None:
        render_sweep_figure(sweep, args.plot)
    return 0


def _parse_cells(text: str) -> ContingencyTable2x2:
    flat = [part for chunk in text.split(";") for part in chunk.split(",") if part.strip()]
    if len(flat) != 4:
        raise ConfigurationError(f"expected four cell counts, got {text!r}")
    try:
        a, b, c, d = (int(v) for v in flat)
    except ValueError:
        raise ConfigurationError(f"cell counts must be integers: {text!r}") from None
    return ContingencyTable2x2(a, b, c, d)


def _stats_rows(result) -> list[dict]:
    df1 = result.df[0]
    df2 = result.df[1] if len(result.df) > 1 else None
    return [
        {
            "test": result.test,
            "statistic": result.statistic,
            "df1": df1,
            "df2": df2,
            "p": result.p_value,
        }
    ]


def _cmd_stats(args: argparse.Namespace) -> int:
    if args.test == "tukey":
        _warn(
            "Tukey HSD is not implemented (it needs the studentized range "
            "distribution); run chi2 or anova instead"
        )
        return 2
    if args.test == "chi2":
        if args.table_file is not None:
            rows = json.loads(Path(args.table_file).read_text("utf-8"))
            table = ContingencyTable2x2.from_rows(rows)
        elif args.table is not None:
            table = _parse_cells(args.table)
        else:
            raise ConfigurationError("chi2 needs --table or --table-file")
        result = chi_squared_independence(table, yates=args.yates)
    else:
        if args.groups_file is not None:
            groups = json.loads(Path(args.groups_file).read_text("utf-8"))
        elif args.group:
            groups = [
                [float(v) for v in chunk.split(",") if v.strip()] for chunk in args.group
            ]
        else:
            raise ConfigurationError("anova needs --group (twice or more) or --groups-file")
        result = one_way_anova(groups)
    _emit(
        args,
        ("test", "statistic", "df1", "df2", "p"),
        _stats_rows(result),
        f"regbench stats {args.test}",
    )
    return 0


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=FORMATS, default="csv", help="output format")
    parser.add_argument("--output", type=Path, default=None, help="write here instead of stdout")


def _add_corpus_options(parser: argparse.ArgumentParser, *, res_required: bool) -> None:
    parser.add_argument("--scenes", required=True, help="scene file (JSON)")
    parser.add_argument(
        "--res", required=res_required, default=None, help="RE-record file (JSON)"
    )
    parser.add_argument("--name", default="corpus", help="corpus name used in outputs")
    parser.add_argument(
        "--domain",
        choices=("furniture", "people"),
        default=None,
        help="restrict RE attribute-name resolution to one domain",
    )


def _add_trial_filter_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--trials",
        default=None,
        help="overlap table file restricting trials ('builtin' = shipped MTUNA/ETUNA table)",
    )
    parser.add_argument(
        "--trials-side",
        choices=("left", "right"),
        default="left",
        help="which overlap column holds this corpus's trial ids",
    )


def _add_analysis_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--use-attribute",
        action="append",
        default=[],
        metavar="NAME",
        help="treat this attribute as usable by the algorithms (repeatable)",
    )
    parser.add_argument(
        "--bound", type=int, default=20, help="candidate-universe enumeration bound"
    )


def _add_dice_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--exclude-other",
        action="store_true",
        help="drop OTHER from human attribute sets before DICE",
    )
    parser.add_argument(
        "--dice-on-values",
        action="store_true",
        help="compare (attribute, value) pairs instead of attribute names",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regbench",
        description="Referring-expression content-selection workbench",
        epilog="The default seed comes from REGBENCH_SEED (0 when unset).",
    )
    parser.add_argument("--version", action="version", version=f"regbench {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("validate", help="check corpus files and report findings")
    _add_corpus_options(p, res_required=False)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_validate)

    p = commands.add_parser("profile", help="minimal-description profile per scene")
    p.add_argument("--scenes", required=True)
    p.add_argument("--jobs", type=int, default=1)
    _add_analysis_options(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_profile)

    p = commands.add_parser("generate", help="run selection algorithms over scenes")
    p.add_argument("--scenes", required=True)
    p.add_argument("--algo", action="append", required=True, help="algorithm spec (repeatable)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    _add_analysis_options(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_generate)

    p = commands.add_parser("classify", help="specification taxonomy per RE or summary")
    _add_corpus_options(p, res_required=True)
    _add_trial_filter_options(p)
    p.add_argument("--summary", action="store_true", help="emit per-domain counts")
    _add_analysis_options(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_classify)

    p = commands.add_parser("evaluate", help="DICE/PRP tables for algorithms vs humans")
    _add_corpus_options(p, res_required=True)
    _add_trial_filter_options(p)
    p.add_argument("--algo", action="append", required=True, help="algorithm spec (repeatable)")
    p.add_argument(
        "--group",
        default="domain",
        help="comma list of grouping keys from {domain,position} (empty for one row)",
    )
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--plot", type=Path, default=None, help="also render a bar chart here")
    _add_dice_options(p)
    _add_analysis_options(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_evaluate)

    p = commands.add_parser("sweep", help="mean DICE over TYPE-insertion probabilities")
    _add_corpus_options(p, res_required=True)
    _add_trial_filter_options(p)
    p.add_argument("--algo", required=True, help="base algorithm spec")
    p.add_argument("--grid", default=None, help="comma list of probabilities (default 0..1 by 0.1)")
    p.add_argument("--runs", type=int, default=DEFAULT_SWEEP_RUNS)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--plot", type=Path, default=None, help="also render the curve here")
    _add_dice_options(p)
    _add_analysis_options(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_sweep)

    p = commands.add_parser("stats", help="significance tests on counts or score lists")
    p.add_argument("test", choices=("chi2", "anova", "tukey"))
    p.add_argument("--table", default=None, help="2x2 cell counts, e.g. '30,70;50,50'")
    p.add_argument("--table-file", default=None, help="JSON file with [[a,b],[c,d]]")
    p.add_argument("--yates", action="store_true", help="apply the continuity correction")
    p.add_argument("--group", action="append", default=[], help="comma list of scores (repeatable)")
    p.add_argument("--groups-file", default=None, help="JSON file with a list of score lists")
    _add_output_options(p)
    p.set_defaults(handler=_cmd_stats)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigurationError as exc:
        _warn(str(exc))
        return 2
    except FileNotFoundError as exc:
        _warn(f"input file not found: {exc.filename}")
        return 2
    except RegbenchError as exc:
        _warn(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
