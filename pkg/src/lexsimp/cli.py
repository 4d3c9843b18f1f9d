"""Command-line interface.

Subcommands:
  simplify    rewrite sentences line by line
  candidates  show the ranked substitute table for one word
  eval-ls     score substitute generation / the full pipeline on a
              benchmark with gold substitutions
  eval-ts     score a system output file with SARI and FRES

Options can come from a JSON config file (--config); explicit flags win.
Every run writes a resolved-config echo so results are reproducible.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .core import PipelineConfig, tokenize, tokenize_whitespace
from .evaluation import (
    eval_pipeline_corpus,
    eval_sg_corpus,
    fres,
    load_ls_dataset,
    sari,
)
from .generation import generate_candidates
from .mlm_backend import MockMlmBackend
from .pipeline import Resources, simplify_batch, simplify_word
from .ranking import FEATURES
from .resources import load_embeddings, load_frequencies, load_paraphrases

logger = logging.getLogger(__name__)

_CONFIG_KEYS = (
    "backend", "model", "mock_config", "embeddings", "frequency", "ppdb",
    "threshold", "top_k", "zipf_min", "lm_window", "mask_prob", "seed",
    "mode", "disable_feature", "workers", "out", "device", "max_length",
)
_DEFAULTS = {
    "backend": "mock", "model": None, "mock_config": None,
    "embeddings": None, "frequency": None, "ppdb": None,
    "threshold": 0.5, "top_k": 10, "zipf_min": 3.0, "lm_window": 5,
    "mask_prob": 0.0, "seed": 42, "mode": "sentence_pair",
    "disable_feature": [], "workers": 1, "out": None,
    "device": "cpu", "max_length": 512,
}


class CliError(Exception):
    pass


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--backend", choices=["transformer", "mock"])
    parser.add_argument("--model", help="model id or path (transformer backend)")
    parser.add_argument("--mock-config", dest="mock_config",
                        help="JSON prediction table (mock backend)")
    parser.add_argument("--embeddings", help="word vector file")
    parser.add_argument("--frequency", help="word frequency file")
    parser.add_argument("--ppdb", help="paraphrase pair file")
    parser.add_argument("--threshold", type=float, help="complexity threshold")
    parser.add_argument("--top-k", dest="top_k", type=int,
                        help="substitute candidates per word")
    parser.add_argument("--zipf-min", dest="zipf_min", type=float,
                        help="frequency filter floor")
    parser.add_argument("--lm-window", dest="lm_window", type=int,
                        help="context tokens per side for the LM loss")
    parser.add_argument("--mask-prob", dest="mask_prob", type=float,
                        help="random masking rate for the unmasked copy")
    parser.add_argument("--seed", type=int, help="RNG seed")
    parser.add_argument("--mode", choices=["sentence_pair", "single_masked",
                                           "single_unmasked"])
    parser.add_argument("--disable-feature", dest="disable_feature",
                        action="append", choices=list(FEATURES),
                        help="drop a ranking feature (repeatable)")
    parser.add_argument("--workers", type=int, help="parallel sentences")
    parser.add_argument("--out", help="write results here instead of stdout")
    parser.add_argument("--device", help="torch device for the transformer")
    parser.add_argument("--max-length", dest="max_length", type=int,
                        help="encoder length limit")


@dataclasses.dataclass
class RunConfig:
    pipeline: PipelineConfig
    backend: str
    model: str | None
    mock_config: str | None
    embeddings: str | None
    frequency: str | None
    ppdb: str | None
    features: tuple[str, ...]
    workers: int
    out: str | None
    device: str
    max_length: int

    def echo_dict(self) -> dict:
        return {
            "pipeline": {
                "complexity_threshold": self.pipeline.complexity_threshold,
                "top_k": self.pipeline.top_k,
                "zipf_filter_min": self.pipeline.zipf_filter_min,
                "lm_window": self.pipeline.lm_window,
                "context_mask_prob": self.pipeline.context_mask_prob,
                "rng_seed": self.pipeline.rng_seed,
                "generation_mode": self.pipeline.generation_mode.value,
            },
            "backend": self.backend,
            "model": self.model,
            "mock_config": self.mock_config,
            "embeddings": self.embeddings,
            "frequency": self.frequency,
            "ppdb": self.ppdb,
            "features": list(self.features),
            "workers": self.workers,
            "out": self.out,
            "device": self.device,
            "max_length": self.max_length,
        }


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional config file, and explicit flags."""
    merged = dict(_DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as handle:
                file_values = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(file_values) - set(_CONFIG_KEYS)
        if unknown:
            raise CliError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_values)
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    disabled = set(merged["disable_feature"] or [])
    unknown = disabled - set(FEATURES)
    if unknown:
        raise CliError(f"unknown features: {sorted(unknown)}")
    features = tuple(name for name in FEATURES if name not in disabled)
    if not features:
        raise CliError("all ranking features are disabled")
    if merged["backend"] == "transformer" and not merged["model"]:
        raise CliError("--backend transformer requires --model")
    for key in ("embeddings", "frequency", "ppdb", "mock_config"):
        path = merged[key]
        if path is not None and not Path(path).exists():
            raise CliError(f"--{key.replace('_', '-')} path not found: {path}")
    pipeline = PipelineConfig(
        complexity_threshold=merged["threshold"],
        top_k=merged["top_k"],
        zipf_filter_min=merged["zipf_min"],
        lm_window=merged["lm_window"],
        context_mask_prob=merged["mask_prob"],
        rng_seed=merged["seed"],
        generation_mode=merged["mode"],
    )
    return RunConfig(
        pipeline=pipeline,
        backend=merged["backend"],
        model=merged["model"],
        mock_config=merged["mock_config"],
        embeddings=merged["embeddings"],
        frequency=merged["frequency"],
        ppdb=merged["ppdb"],
        features=features,
        workers=merged["workers"],
        out=merged["out"],
        device=merged["device"],
        max_length=merged["max_length"],
    )


def build_resources(run: RunConfig) -> Resources:
    for key in ("embeddings", "frequency", "ppdb"):
        if getattr(run, key) is None:
            raise CliError(f"this command needs --{key}")
    return Resources(
        embeddings=load_embeddings(run.embeddings),
        frequency=load_frequencies(run.frequency),
        paraphrases=load_paraphrases(run.ppdb),
    )


def build_backend(run: RunConfig):
    if run.backend == "mock":
        if run.mock_config:
            return MockMlmBackend.from_json(run.mock_config)
        return MockMlmBackend()
    from .mlm_backend import TransformerMlmBackend

    return TransformerMlmBackend(
        run.model, max_length=run.max_length, device=run.device
    )


def write_config_echo(run: RunConfig) -> None:
    payload = json.dumps(run.echo_dict(), indent=2, sort_keys=True)
    if run.out:
        echo_path = Path(str(run.out) + ".config.json")
        echo_path.write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload, file=sys.stderr)


def _open_out(run: RunConfig):
    if run.out:
        return open(run.out, "w", encoding="utf-8")
    return None


def cmd_simplify(args: argparse.Namespace) -> int:
    run = resolve_config(args)
    resources = build_resources(run)
    backend = build_backend(run)
    write_config_echo(run)
    if args.input:
        with open(args.input, encoding="utf-8") as handle:
            lines = [line.rstrip("\n") for line in handle]
    else:
        lines = [line.rstrip("\n") for line in sys.stdin]
    errors: list = []
    results = simplify_batch(
        lines, run.pipeline, resources, backend,
        features=run.features, workers=run.workers, errors=errors,
    )
    sink = _open_out(run)
    try:
        for result in results:
            print(result.simplified.text, file=sink or sys.stdout)
    finally:
        if sink:
            sink.close()
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as handle:
            for result in results:
                handle.write(json.dumps(result.to_dict()) + "\n")
    if errors:
        print(f"{len(errors)} line(s) failed; kept unchanged", file=sys.stderr)
    return 0


def cmd_candidates(args: argparse.Namespace) -> int:
    run = resolve_config(args)
    resources = build_resources(run)
    backend = build_backend(run)
    write_config_echo(run)
    sentence = tokenize(args.sentence)
    if not 0 <= args.index < len(sentence.tokens):
        raise CliError(f"token index {args.index} out of range "
                       f"(sentence has {len(sentence.tokens)} tokens)")
    chosen, step = simplify_word(
        sentence, args.index, run.pipeline, resources, backend,
        features=run.features,
    )
    report = step.to_dict()
    table = step.ranking
    lines = [f"word: {step.original}"]
    if table is None:
        lines.append("no candidates")
    else:
        names = list(table.features)
        header = ["candidate"] + [f"{n}(rank)" for n in names] + ["avg", ""]
        rows = [header]
        for i, cand in enumerate(table.candidates):
            row = [cand]
            for name in names:
                raw, ranks = table.features[name]
                row.append(f"{raw[i]:.3f}({ranks[i]:.1f})")
            row.append(f"{table.average_rank[i]:.3f}")
            row.append("<- best" if i == table.best else "")
            rows.append(row)
        widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
        for r in rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
        lines.append(f"decision: {step.reason.value}"
                     + (f" ({chosen})" if chosen else ""))
    print("\n".join(lines))
    if run.out:
        Path(run.out).write_text(json.dumps(report, indent=2) + "\n",
                                 encoding="utf-8")
    return 0


def _eval_ls_once(run: RunConfig, resources, backend, instances, mode: str) -> dict:
    def sg_one(instance):
        sentence = tokenize_whitespace(instance.sentence)
        cands = generate_candidates(
            sentence, instance.target_index, run.pipeline, backend
        )
        return cands.surfaces(), instance.gold_words()

    def full_one(instance):
        sentence = tokenize_whitespace(instance.sentence)
        chosen, _ = simplify_word(
            sentence, instance.target_index, run.pipeline, resources, backend,
            features=run.features,
        )
        replacement = chosen if chosen is not None else instance.target
        return replacement, instance.target, instance.gold_words()

    worker = sg_one if mode == "sg" else full_one
    if run.workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=run.workers) as pool:
            rows = list(pool.map(worker, instances))
    else:
        rows = [worker(inst) for inst in instances]
    if mode == "sg":
        pre, re_, f1 = eval_sg_corpus(rows)
        return {"mode": "sg", "top_k": run.pipeline.top_k,
                "instances": len(instances),
                "precision": pre, "recall": re_, "f1": f1}
    pre, acc = eval_pipeline_corpus(rows)
    return {"mode": "full", "top_k": run.pipeline.top_k,
            "instances": len(instances), "precision": pre, "accuracy": acc}


def _print_report(report: dict) -> None:
    leading = [k for k in ("mode", "instances") if k in report]
    rest = [k for k in report if k not in ("mode", "instances")]
    width = max(len(k) for k in report)
    for key in leading + rest:
        value = report[key]
        text = f"{value:.4f}" if isinstance(value, float) else str(value)
        print(f"{key.ljust(width)}  {text}")


def cmd_eval_ls(args: argparse.Namespace) -> int:
    run = resolve_config(args)
    instances = load_ls_dataset(args.dataset)
    if not instances:
        raise CliError(f"dataset {args.dataset} is empty")
    resources = build_resources(run)
    backend = build_backend(run)
    write_config_echo(run)
    if args.sweep_top_k:
        try:
            ks = [int(part) for part in args.sweep_top_k.split(",")]
        except ValueError:
            raise CliError("--sweep-top-k wants comma-separated integers") from None
        reports = []
        for k in ks:
            sweep_run = dataclasses.replace(
                run, pipeline=dataclasses.replace(run.pipeline, top_k=k)
            )
            report = _eval_ls_once(sweep_run, resources, backend, instances,
                                   args.eval_mode)
            reports.append(report)
            _print_report(report)
            print()
        payload = reports
    else:
        report = _eval_ls_once(run, resources, backend, instances,
                               args.eval_mode)
        _print_report(report)
        payload = report
    if run.out:
        Path(run.out).write_text(json.dumps(payload, indent=2) + "\n",
                                 encoding="utf-8")
    return 0


def cmd_eval_ts(args: argparse.Namespace) -> int:
    run = resolve_config(args)
    write_config_echo(run)
    source_lines = Path(args.source).read_text(encoding="utf-8").splitlines()
    output_lines = Path(args.output).read_text(encoding="utf-8").splitlines()
    reference_files = [
        Path(p).read_text(encoding="utf-8").splitlines() for p in args.refs
    ]
    if not reference_files:
        raise CliError("at least one --refs file is required")
    lengths = {len(source_lines), len(output_lines)}
    lengths.update(len(lines) for lines in reference_files)
    if len(lengths) != 1:
        raise CliError("source, output, and reference files must have "
                       "matching line counts")
    if not source_lines:
        raise CliError("input files are empty")
    sari_values = []
    fres_out = []
    fres_src = []
    for i, (src, out) in enumerate(zip(source_lines, output_lines)):
        refs = [lines[i] for lines in reference_files]
        sari_values.append(sari(src, out, refs))
        fres_out.append(fres(out))
        fres_src.append(fres(src))
    count = len(source_lines)
    report = {
        "instances": count,
        "sari": sum(sari_values) / count,
        "fres_output": sum(fres_out) / count,
        "fres_source": sum(fres_src) / count,
    }
    _print_report(report)
    if run.out:
        Path(run.out).write_text(json.dumps(report, indent=2) + "\n",
                                 encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexsimp",
        description="Lexical simplification: replace complex words with "
                    "simpler substitutes a masked language model suggests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_simplify = sub.add_parser("simplify", help="rewrite sentences")
    p_simplify.add_argument("--input", help="input file (default: stdin)")
    p_simplify.add_argument("--trace-out", dest="trace_out",
                            help="write JSONL decision traces here")
    _add_common_flags(p_simplify)
    p_simplify.set_defaults(func=cmd_simplify)

    p_cand = sub.add_parser("candidates",
                            help="rank substitutes for one token")
    p_cand.add_argument("sentence", help="the sentence text")
    p_cand.add_argument("index", type=int, help="token index to simplify")
    _add_common_flags(p_cand)
    p_cand.set_defaults(func=cmd_candidates)

    p_ls = sub.add_parser("eval-ls", help="benchmark with gold substitutions")
    p_ls.add_argument("dataset", help="TSV benchmark file")
    p_ls.add_argument("--eval-mode", dest="eval_mode", choices=["sg", "full"],
                      default="sg", help="score generation only, or the "
                      "final replacement")
    p_ls.add_argument("--sweep-top-k", dest="sweep_top_k",
                      help="comma-separated k values; one report per k")
    _add_common_flags(p_ls)
    p_ls.set_defaults(func=cmd_eval_ls)

    p_ts = sub.add_parser("eval-ts", help="SARI/FRES on parallel files")
    p_ts.add_argument("source", help="original sentences, one per line")
    p_ts.add_argument("output", help="system output, aligned to source")
    p_ts.add_argument("--refs", action="append", default=[],
                      help="reference file (repeatable)")
    _add_common_flags(p_ts)
    p_ts.set_defaults(func=cmd_eval_ts)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # resource/parse failures
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
