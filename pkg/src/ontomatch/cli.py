"""Command-line entry point.

Subcommands: ``match`` (run the pipeline on one ontology pair),
``evaluate`` (score system alignments against a track), ``train-data``
(emit a labeled training CSV), ``sweep`` (re-run match+evaluate across
reference sampling fractions). Reports are written as CSV with a rendered
PNG figure next to each.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .alignment import Alignment, AlignmentFormatError, parse_alignment_xml, serialize_alignment_xml
from .bridge import ScorerEndpoint, write_training_csv
from .candidates import high_recall_match
from .evaluation import Track, evaluate_track, load_track
from .extract import ExtractorKind
from .negatives import (
    SamplingConfig,
    add_negatives_one_one,
    add_negatives_random_absolute,
    add_negatives_random_share,
    add_negatives_via_matcher,
    sample_reference,
)
from .bridge import SerializationMode
from .pipeline import FixedThreshold, PipelineConfig, SearchThreshold, run_match
from .rdf import Ontology, ParseError, parse_ntriples, parse_turtle
from . import report

ENDPOINT_ENV_VAR = "ONTOMATCH_ENDPOINT"

_EXTRACTORS = {kind.value: kind for kind in ExtractorKind}
_MODES = {mode.value: mode for mode in SerializationMode}


class StageError(Exception):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"error in stage {stage}: {cause}")

    @property
    def exit_code(self) -> int:
        return 2 if self.stage == "load" else 1


def load_ontology_file(path: Path) -> Ontology:
    data = path.read_bytes()
    if path.suffix == ".nt":
        return parse_ntriples(data)
    return parse_turtle(data)


def _load(path: Path, loader) :
    try:
        return loader(path)
    except (ParseError, AlignmentFormatError, OSError, UnicodeDecodeError) as exc:
        raise StageError("load", exc) from exc


def read_config_file(path: Path) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment. Known keys:
    extractor, mode, scorer, endpoint, threshold, search_threshold,
    fraction, one_to_one, seed, jobs."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def build_pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    """Defaults, overridden by the config file, overridden by flags."""
    cfg = read_config_file(Path(args.config)) if getattr(args, "config", None) else {}

    def pick(flag_value, key: str, convert, default):
        if flag_value is not None:
            return flag_value
        if key in cfg:
            return convert(cfg[key])
        return default

    extractor = pick(args.extractor, "extractor", lambda v: v, "set")
    mode = pick(args.mode, "mode", lambda v: v, "multi")
    scorer = pick(args.scorer, "scorer", lambda v: v, "lexical")
    endpoint_url = pick(args.endpoint, "endpoint", lambda v: v, os.environ.get(ENDPOINT_ENV_VAR))
    seed = pick(args.seed, "seed", int, 42)
    one_to_one = pick(args.one_to_one, "one_to_one", _parse_bool, False)

    threshold_value = pick(getattr(args, "threshold", None), "threshold", float, None)
    search = pick(
        getattr(args, "search_threshold", None) or None, "search_threshold", _parse_bool, False
    )
    fraction = pick(getattr(args, "fraction", None), "fraction", float, 1.0)
    if search:
        threshold = SearchThreshold(fraction=fraction, seed=seed, incomplete=fraction < 1.0)
    elif threshold_value is not None:
        threshold = FixedThreshold(threshold_value)
    else:
        threshold = FixedThreshold(0.0)

    endpoint = ScorerEndpoint(endpoint_url) if endpoint_url else None
    if scorer == "remote" and endpoint is None:
        raise StageError("config", ValueError(f"remote scorer needs --endpoint or ${ENDPOINT_ENV_VAR}"))
    return PipelineConfig(
        extractor=_EXTRACTORS[extractor],
        mode=_MODES[mode],
        scorer=scorer,
        endpoint=endpoint,
        threshold=threshold,
        one_to_one=one_to_one,
        seed=seed,
    )


def _add_pipeline_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="key=value config file; flags win over it")
    parser.add_argument("--extractor", choices=sorted(_EXTRACTORS), default=None)
    parser.add_argument("--mode", choices=sorted(_MODES), default=None)
    parser.add_argument("--scorer", choices=["lexical", "remote"], default=None)
    parser.add_argument("--endpoint", default=None, help=f"scorer base URL (default ${ENDPOINT_ENV_VAR})")
    parser.add_argument("--threshold", type=float, default=None, help="fixed confidence cut")
    parser.add_argument("--search-threshold", action="store_true", default=None,
                        help="search the best threshold on a (sampled) reference")
    parser.add_argument("--fraction", type=float, default=None,
                        help="reference sampling fraction for the threshold search")
    parser.add_argument("--one-to-one", action=argparse.BooleanOptionalAction, default=None,
                        help="extract the max-weight one-to-one sub-alignment")
    parser.add_argument("--seed", type=int, default=None)


def cmd_match(args: argparse.Namespace) -> int:
    config = build_pipeline_config(args)
    source = _load(Path(args.source), load_ontology_file)
    target = _load(Path(args.target), load_ontology_file)
    reference = None
    if args.reference:
        reference = _load(Path(args.reference), lambda p: parse_alignment_xml(p.read_bytes()))
    try:
        result = run_match(source, target, config, reference)
    except Exception as exc:  # noqa: BLE001 - stage attribution at the boundary
        raise StageError("pipeline", exc) from exc

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(serialize_alignment_xml(result.alignment))
    report_dir = Path(args.report_dir) if args.report_dir else out.parent
    report_dir.mkdir(parents=True, exist_ok=True)
    report.write_stages_csv(report_dir / "stages.csv", result.stages, result.threshold, result.training_f1)
    report.plot_stages(report_dir / "stages.png", result.stages)
    for stage, size in result.stages:
        print(f"{stage}: {size}")
    print(f"chosen_threshold: {result.threshold}")
    if result.training_f1 is not None:
        print(f"training_f1: {result.training_f1:.4f}")
    print(f"wrote {out}")
    return 0


def _system_alignments(track: Track, directory: Path, jobs: int = 1) -> dict[str, Alignment]:
    def read_one(case):
        path = directory / f"{case.name}.xml"
        if not path.is_file():
            return case.name, None
        return case.name, parse_alignment_xml(path.read_bytes())

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            loaded = list(pool.map(read_one, track))
    else:
        loaded = [read_one(case) for case in track]
    return {name: alignment for name, alignment in loaded if alignment is not None}


def cmd_evaluate(args: argparse.Namespace) -> int:
    track, errors = load_track(Path(args.track))
    for problem in errors:
        print(f"track problem: {problem}", file=sys.stderr)
    if len(track) == 0:
        print("no usable test cases in track", file=sys.stderr)
        return 1
    systems = _load(Path(args.system), lambda p: _system_alignments(track, p, args.jobs))
    results, aggregate = evaluate_track(track, systems, args.aggregation)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    report.write_results_csv(out, results, aggregate, args.aggregation)
    report.plot_results(out.with_suffix(".png"), results, aggregate, args.aggregation)
    for r in results:
        print(f"{r.name}: P={r.metrics.precision:.4f} R={r.metrics.recall:.4f} F1={r.metrics.f1:.4f}")
    print(f"{args.aggregation.upper()}: P={aggregate.precision:.4f} R={aggregate.recall:.4f} F1={aggregate.f1:.4f}")
    print(f"wrote {out}")
    return 1 if errors else 0


def cmd_train_data(args: argparse.Namespace) -> int:
    config = build_pipeline_config(args)
    source = _load(Path(args.source), load_ontology_file)
    target = _load(Path(args.target), load_ontology_file)
    reference = _load(Path(args.reference), lambda p: parse_alignment_xml(p.read_bytes()))
    seed = args.seed if args.seed is not None else 42
    fraction = args.fraction if args.fraction is not None else 1.0
    positives = sample_reference(reference, SamplingConfig(fraction=fraction, seed=seed))
    try:
        if args.strategy == "absolute":
            examples = add_negatives_random_absolute(positives, source, target, args.count, seed)
        elif args.strategy == "share":
            examples = add_negatives_random_share(positives, source, target, args.share, seed)
        elif args.strategy == "one_one":
            examples = add_negatives_one_one(positives, source, target, seed)
        else:
            candidates = high_recall_match(source, target, config.extractor)
            examples = add_negatives_via_matcher(candidates, positives)
    except ValueError as exc:
        raise StageError("negatives", exc) from exc
    data, skipped = write_training_csv(examples, source, target, config.extractor)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(data)
    positives_count = sum(1 for line in data.decode("utf-8").splitlines()[1:] if line.endswith(",1"))
    print(f"wrote {out}: {len(examples)} examples ({positives_count} positive rows), {len(skipped)} skipped")
    return 0


def _sweep_fraction(track: Track, config: PipelineConfig, fraction: float, aggregation: str, jobs: int):
    def one_case(case):
        source = load_ontology_file(case.source_path)
        target = load_ontology_file(case.target_path)
        reference = case.load_reference()
        cfg = PipelineConfig(
            extractor=config.extractor,
            mode=config.mode,
            scorer=config.scorer,
            endpoint=config.endpoint,
            threshold=SearchThreshold(fraction=fraction, seed=config.seed, incomplete=fraction < 1.0),
            one_to_one=config.one_to_one,
            seed=config.seed,
        )
        return case.name, run_match(source, target, cfg, reference).alignment

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            systems = dict(pool.map(one_case, track))
    else:
        systems = dict(one_case(case) for case in track)
    _, aggregate = evaluate_track(track, systems, aggregation)
    return aggregate


def cmd_sweep(args: argparse.Namespace) -> int:
    config = build_pipeline_config(args)
    fractions = [float(f) for f in args.fractions.split(",") if f]
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise StageError("config", ValueError("fractions must lie in (0, 1]"))
    track, errors = load_track(Path(args.track))
    for problem in errors:
        print(f"track problem: {problem}", file=sys.stderr)
    rows = []
    for fraction in fractions:
        try:
            aggregate = _sweep_fraction(track, config, fraction, args.aggregation, args.jobs)
        except Exception as exc:  # noqa: BLE001
            raise StageError("pipeline", exc) from exc
        rows.append((fraction, aggregate))
        print(f"fraction {fraction}: P={aggregate.precision:.4f} R={aggregate.recall:.4f} F1={aggregate.f1:.4f}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report.write_sweep_csv(out_dir / "sweep.csv", rows)
    report.plot_sweep(out_dir / "sweep.png", rows)
    print(f"wrote {out_dir / 'sweep.csv'}")
    return 1 if errors else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ontomatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_match = sub.add_parser("match", help="run the match pipeline on two ontologies")
    p_match.add_argument("source")
    p_match.add_argument("target")
    p_match.add_argument("--reference", help="reference alignment (required for --search-threshold)")
    p_match.add_argument("-o", "--out", required=True, help="output alignment XML path")
    p_match.add_argument("--report-dir", default=None)
    _add_pipeline_flags(p_match)
    p_match.set_defaults(func=cmd_match)

    p_eval = sub.add_parser("evaluate", help="score system alignments against a track")
    p_eval.add_argument("track", help="track directory")
    p_eval.add_argument("system", help="directory of <testcase>.xml system alignments")
    p_eval.add_argument("--aggregation", choices=["micro", "macro"], default="micro")
    p_eval.add_argument("-o", "--out", default="results.csv")
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.set_defaults(func=cmd_evaluate)

    p_train = sub.add_parser("train-data", help="emit a labeled training CSV")
    p_train.add_argument("source")
    p_train.add_argument("target")
    p_train.add_argument("reference")
    p_train.add_argument("--strategy", choices=["absolute", "share", "one_one", "via_matcher"], required=True)
    p_train.add_argument("--count", type=int, default=0, help="negatives for --strategy absolute")
    p_train.add_argument("--share", type=float, default=1.0, help="negatives share for --strategy share")
    p_train.add_argument("-o", "--out", required=True)
    _add_pipeline_flags(p_train)
    p_train.set_defaults(func=cmd_train_data)

    p_sweep = sub.add_parser("sweep", help="match+evaluate across sampling fractions")
    p_sweep.add_argument("track")
    p_sweep.add_argument("--fractions", default="0.1,0.2,0.3,0.4,0.5,0.6")
    p_sweep.add_argument("--aggregation", choices=["micro", "macro"], default="micro")
    p_sweep.add_argument("-o", "--out", default="sweep-report")
    p_sweep.add_argument("--jobs", type=int, default=1)
    _add_pipeline_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(str(exc), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
