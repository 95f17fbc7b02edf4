"""Command-line surface for the data construction and evaluation pipeline.

Subcommands:

    build-data   construct masked auxiliary examples from a corpus
    mix          assemble a multi-task training file
    eval         run the inference protocol over a benchmark
    score        score an outcome file into an accuracy report
    compare      error-sample gain between two outcome files
    sweep        emit the ratio x mask grid of mix configs

Exit codes: 0 success, 1 usage, 2 data validation, 3 transport or
executor launch failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import inference, masker
from .config import Config, ConfigError, load_config, mix_spec_toml
from .corpus import CorpusFormatError, load_benchmark, load_corpus
from .evalreport import ScoringError, compare_error_gain, render_gain_report, render_report, score_run
from .inference import (
    ENDPOINT_ENV,
    ExecutorLaunchError,
    InProcessExecutor,
    SandboxExecutor,
    TransportError,
    make_client,
    read_outcomes,
    run_item,
)
from .masker import MaskingError, MaskPolicy, RecordSkipped, TaskKind
from .mixer import MixSpec, MixtureError, assemble_mixture, sweep_grid, write_training_file

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_TRANSPORT = 3

ENV_HELP = f"Environment: {inference.API_KEY_ENV} (endpoint auth), {ENDPOINT_ENV} (default endpoint)."


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for data
    # validation, so remap.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> _Parser:
    parser = _Parser(prog="dualforge", description=__doc__, epilog=ENV_HELP,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-data", help="construct masked auxiliary examples", epilog=ENV_HELP)
    p.add_argument("corpus", help="corpus JSONL path")
    p.add_argument("--task", choices=["irsp", "ir"], required=True)
    p.add_argument("--config", help="TOML config path")
    p.add_argument("--r-mask", type=float, help="fraction of segments to mask")
    p.add_argument("--seed", type=int, help="mask selection seed")
    p.add_argument("--out", required=True, help="output masked-example JSONL")
    p.set_defaults(handler=cmd_build_data)

    p = sub.add_parser("mix", help="assemble a multi-task training file", epilog=ENV_HELP)
    p.add_argument("corpus", help="base corpus JSONL path")
    p.add_argument("--config", help="TOML config path")
    p.add_argument("--irsp-file", help="prebuilt masked-example JSONL to sample from")
    p.add_argument("--ir-file", help="prebuilt masked-example JSONL to sample from")
    p.add_argument("--r-task-irsp", type=float, help="auxiliary ratio for the forward task")
    p.add_argument("--r-task-ir", type=float, help="auxiliary ratio for the reverse task")
    p.add_argument("--seed", type=int, help="shuffle seed")
    p.add_argument("--out", required=True, help="output training JSONL")
    p.set_defaults(handler=cmd_mix)

    p = sub.add_parser("eval", help="run the inference protocol over a benchmark", epilog=ENV_HELP)
    p.add_argument("benchmark", help="benchmark JSONL path")
    p.add_argument("--benchmark-name", help="benchmark name (default: file stem)")
    p.add_argument("--config", help="TOML config path")
    p.add_argument("--endpoint", help=f"model endpoint URL (or {ENDPOINT_ENV}); mock://rules.jsonl for offline runs")
    p.add_argument("--executor", choices=["sandbox", "mock"], help="program executor")
    p.add_argument("--resume", action="store_true", help="skip item ids already in the outcome file")
    p.add_argument("--concurrency", type=int, help="parallel items (default from config)")
    p.add_argument("--limit", type=int, help="evaluate at most N items")
    p.add_argument("--out", required=True, help="output outcome JSONL")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("score", help="score an outcome file", epilog=ENV_HELP)
    p.add_argument("outcomes", help="outcome JSONL path")
    p.add_argument("benchmark", help="benchmark JSONL path")
    p.add_argument("--benchmark-name", help="benchmark name (default: file stem)")
    p.add_argument("--run-id", default="run", help="run label for the report")
    p.add_argument("--config", help="TOML config path")
    p.add_argument("--format", choices=["markdown", "csv"], default="markdown")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--figure", help="also render an accuracy figure (PNG) to this path")
    p.set_defaults(handler=cmd_score)

    p = sub.add_parser("compare", help="error-sample gain between two runs", epilog=ENV_HELP)
    p.add_argument("baseline", help="baseline outcome JSONL")
    p.add_argument("treatment", help="treatment outcome JSONL")
    p.add_argument("benchmark", help="benchmark JSONL path")
    p.add_argument("--benchmark-name", help="benchmark name (default: file stem)")
    p.add_argument("--config", help="TOML config path")
    p.add_argument("--gain-mode", choices=["fixed_fraction", "net_reduction"])
    p.add_argument("--format", choices=["markdown", "csv"], default="markdown")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--figure", help="also render an accuracy figure (PNG) to this path")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("sweep", help="emit the ratio x mask grid of mix configs", epilog=ENV_HELP)
    p.add_argument("--task", choices=["irsp", "ir"], default="irsp")
    p.add_argument("--r-task", type=_parse_float_list, help="comma-separated task ratios")
    p.add_argument("--r-mask", type=_parse_float_list, help="comma-separated mask ratios")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory for config files")
    p.set_defaults(handler=cmd_sweep)

    return parser


def _load_config(args) -> Config:
    return load_config(getattr(args, "config", None))


def _policy_with_overrides(policy: MaskPolicy, r_mask, seed) -> MaskPolicy:
    if r_mask is not None:
        policy = MaskPolicy(
            r_mask=r_mask, min_masked=policy.min_masked,
            min_revealed=policy.min_revealed, seed=policy.seed,
        )
    if seed is not None:
        policy = MaskPolicy(
            r_mask=policy.r_mask, min_masked=policy.min_masked,
            min_revealed=policy.min_revealed, seed=seed,
        )
    return policy


def cmd_build_data(args) -> int:
    config = _load_config(args)
    records, manifest = load_corpus(args.corpus)
    task = TaskKind(args.task)
    base_policy = config.mix.irsp_policy if task is TaskKind.IRSP else config.mix.ir_policy
    policy = _policy_with_overrides(base_policy, args.r_mask, args.seed)

    examples = []
    skipped: dict[str, int] = {}
    for record in records:
        try:
            if task is TaskKind.IRSP:
                example = masker.build_irsp_example(record, policy, config.templates.irsp_wrapper)
            else:
                example = masker.build_ir_example(
                    record, policy, config.templates.ir_wrapper,
                    config.ir_include_plain_questions,
                )
        except RecordSkipped as skip:
            skipped[skip.reason] = skipped.get(skip.reason, 0) + 1
            continue
        examples.append(example)

    if records and not examples:
        raise MaskingError(f"zero maskable records for task {task.value!r} in {manifest.name}")
    masker.write_masked_examples(examples, args.out)
    print(f"task={task.value} r_mask={policy.r_mask} seed={policy.seed}")
    print(f"built={len(examples)} skipped={sum(skipped.values())}")
    for reason in sorted(skipped):
        print(f"  skipped[{reason}]={skipped[reason]}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _mix_spec_with_overrides(spec: MixSpec, args) -> MixSpec:
    return MixSpec(
        r_task_irsp=spec.r_task_irsp if args.r_task_irsp is None else args.r_task_irsp,
        r_task_ir=spec.r_task_ir if args.r_task_ir is None else args.r_task_ir,
        irsp_policy=spec.irsp_policy,
        ir_policy=spec.ir_policy,
        shuffle_seed=spec.shuffle_seed if args.seed is None else args.seed,
    )


def cmd_mix(args) -> int:
    config = _load_config(args)
    records, _ = load_corpus(args.corpus)
    spec = _mix_spec_with_overrides(config.mix, args)
    irsp_pool = masker.read_masked_examples(args.irsp_file) if args.irsp_file else None
    ir_pool = masker.read_masked_examples(args.ir_file) if args.ir_file else None

    examples, report = assemble_mixture(
        records,
        spec,
        irsp_pool=irsp_pool,
        ir_pool=ir_pool,
        template=config.templates.serialization,
        irsp_wrapper=config.templates.irsp_wrapper,
        ir_wrapper=config.templates.ir_wrapper,
        include_plain_questions=config.ir_include_plain_questions,
        ratio_semantics=config.ratio_semantics,
    )
    manifest = write_training_file(examples, args.out, spec=spec)
    print(f"counts={json.dumps(manifest.counts)}")
    if report.skipped:
        print(f"skipped={json.dumps(report.skipped)}")
    print(f"wrote {args.out} ({manifest.total} examples)")
    return EXIT_OK


def _build_executor(config: Config, kind: str | None):
    kind = kind or config.executor.kind
    if kind == "sandbox":
        return SandboxExecutor(config.executor.command, config.executor.timeout_s)
    return InProcessExecutor(config.executor.timeout_s)


def cmd_eval(args) -> int:
    config = _load_config(args)
    endpoint = args.endpoint or os.environ.get(ENDPOINT_ENV) or config.endpoint.url
    if not endpoint:
        raise TransportError(
            f"no endpoint configured: pass --endpoint, set {ENDPOINT_ENV}, or set endpoint.url"
        )
    name = args.benchmark_name or Path(args.benchmark).stem
    items = load_benchmark(args.benchmark, name)
    if args.limit is not None:
        items = items[: args.limit]

    done_ids: set[str] = set()
    out_path = Path(args.out)
    if args.resume and out_path.exists():
        done_ids = {outcome.item_id for outcome in read_outcomes(out_path)}
    todo = [item for item in items if item.id not in done_ids]

    client = make_client(
        endpoint,
        adapter=config.endpoint.adapter,
        model=config.endpoint.model,
        timeout_s=config.endpoint.timeout_s,
    )
    executor = _build_executor(config, args.executor)
    concurrency = max(1, args.concurrency or config.concurrency)

    def _run(item):
        return run_item(
            item,
            client,
            executor,
            max_new=config.endpoint.max_new,
            temperature=config.endpoint.temperature,
            template=config.templates.serialization,
            closest_prompt_template=config.templates.closest_option_prompt,
            model_mediated_closest=config.model_mediated_closest,
        )

    # Futures are drained in submission order so the output file order is
    # stable regardless of completion order; each outcome is flushed as it
    # resolves so an interrupted run can be resumed.
    mode = "a" if args.resume and done_ids else "w"
    written = 0
    with out_path.open(mode, encoding="utf-8", newline="") as sink:

        def _emit_outcome(outcome) -> None:
            nonlocal written
            sink.write(json.dumps(inference.outcome_to_json(outcome), ensure_ascii=False))
            sink.write("\n")
            sink.flush()
            written += 1

        if concurrency == 1:
            for item in todo:
                _emit_outcome(_run(item))
        else:
            with ThreadPoolExecutor(max_workers=concurrency) as pool:
                for future in [pool.submit(_run, item) for item in todo]:
                    _emit_outcome(future.result())

    print(f"evaluated={written} resumed={len(done_ids)} total={len(items)}")
    print(f"wrote {out_path}")
    return EXIT_OK


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        print(f"wrote {out}")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def cmd_score(args) -> int:
    name = args.benchmark_name or Path(args.benchmark).stem
    items = load_benchmark(args.benchmark, name)
    outcomes = read_outcomes(args.outcomes)
    record = score_run(outcomes, items, run_id=args.run_id)
    _emit(render_report([record], args.format), args.out)
    print(f"accuracy={record.accuracy_percent:.1f} n={record.n}")
    if args.figure:
        from .figures import render_accuracy_figure

        render_accuracy_figure([record], args.figure)
        print(f"wrote {args.figure}")
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _load_config(args)
    name = args.benchmark_name or Path(args.benchmark).stem
    items = load_benchmark(args.benchmark, name)
    baseline = score_run(read_outcomes(args.baseline), items, run_id="baseline")
    treatment = score_run(read_outcomes(args.treatment), items, run_id="treatment")
    report = compare_error_gain(baseline, treatment, args.gain_mode or config.gain_mode)
    _emit(render_gain_report(report, args.format), args.out)
    print(
        f"baseline_errors={report.baseline_error_count} fixed={report.fixed_count} "
        f"gain={report.gain:.3f}"
    )
    if args.figure:
        from .figures import render_accuracy_figure

        render_accuracy_figure([baseline, treatment], args.figure)
        print(f"wrote {args.figure}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    task = TaskKind(args.task)
    specs = sweep_grid(args.r_task, args.r_mask, task, seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for spec in specs:
        ratio = spec.r_task_irsp if task is TaskKind.IRSP else spec.r_task_ir
        mask = (
            spec.irsp_policy.r_mask if task is TaskKind.IRSP else spec.ir_policy.r_mask
        )
        path = out_dir / f"mix-{task.value}-rtask{ratio}-rmask{mask}.toml"
        path.write_text(mix_spec_toml(spec), encoding="utf-8")
    print(f"wrote {len(specs)} configs to {out_dir}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (CorpusFormatError, MaskingError, MixtureError, ScoringError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (TransportError, ExecutorLaunchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
