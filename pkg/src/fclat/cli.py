"""Command-line entry point wiring tensors to lattices and reports.

Subcommands: build-context, lattice, eval, synth, gibbs. Option precedence
is flags > config file > defaults, and every run echoes its resolved
configuration into the output directory. Exit codes: 0 ok, 2 validation
error, 3 provider/protocol error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field

from . import fileio
from .concepts import enumerate_concepts
from .errors import ProviderError, ValidationError
from .evaluate import eval_concept_classification, eval_reconstruction
from .lattice import build_lattice, export_dot
from .pipeline import (
    DEFAULT_ALPHA,
    PooledContext,
    binarize,
    normalize_minmax_log,
    normalize_sigmoid,
    pool,
)
from .synth import (
    HttpProvider,
    JointTableProvider,
    convergence_experiment,
    generate_corpus,
    gibbs_generate,
    learn_context,
)

NORM_TAGS = {"minmax": "minmax-log", "sigmoid": "sigmoid", "none": "none"}


@dataclass
class RunConfig:
    """Resolved options for one invocation, echoed into the output dir."""

    subcommand: str
    inputs: dict = field(default_factory=dict)
    out: str = ""
    pooling: str | None = None
    norm: str | None = None
    alpha: float | None = None
    direction: str | None = None
    ks: list[int] | None = None
    seed: int | None = None
    filtered: bool | None = None
    provider: str | None = None
    extras: dict = field(default_factory=dict)

    def echo(self) -> None:
        path = os.path.join(self.out, "config.json")
        fileio.atomic_write_text(path, json.dumps(asdict(self), indent=2) + "\n")


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"config file {path} must hold a JSON object")
    return data


def _resolve(args: argparse.Namespace, cfg: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in cfg:
        return cfg[key]
    return default


def _parse_ks(raw) -> list[int]:
    if isinstance(raw, (list, tuple)):
        ks = [int(k) for k in raw]
    else:
        try:
            ks = [int(part) for part in str(raw).split(",") if part.strip()]
        except ValueError:
            raise ValidationError(f"--k expects comma-separated integers, got {raw!r}") from None
    if not ks or min(ks) < 1:
        raise ValidationError("--k cutoffs must be positive integers")
    return ks


def cmd_build_context(args: argparse.Namespace) -> int:
    cfg = _load_config_file(args.config)
    pooling = _resolve(args, cfg, "pooling", "avg")
    norm = _resolve(args, cfg, "norm", "minmax")
    if norm not in NORM_TAGS:
        raise ValidationError(f"--norm must be one of {sorted(NORM_TAGS)}, got {norm!r}")
    norm_tag = NORM_TAGS[norm]
    alpha = _resolve(args, cfg, "alpha", DEFAULT_ALPHA[norm_tag])
    alpha = float(alpha)
    scale = float(_resolve(args, cfg, "sigmoid_scale", 1.0))
    shift = _resolve(args, cfg, "sigmoid_shift", None)
    per_row = bool(_resolve(args, cfg, "per_row", False))

    tensor = fileio.load_tensor(args.tensor)
    pooled = pool(tensor, pooling)
    if norm_tag == "minmax-log":
        pooled = normalize_minmax_log(pooled, per_row=per_row)
    elif norm_tag == "sigmoid":
        pooled = normalize_sigmoid(pooled, scale=scale, shift=None if shift is None else float(shift))
    # re-wrap with the effective threshold so the written file records it
    pooled = PooledContext(
        pooled.objects, pooled.attributes, pooled.scores, pooled.pooling, pooled.normalization, alpha
    )
    ctx = binarize(pooled, alpha)

    run = RunConfig(
        subcommand="build-context",
        inputs={"tensor": args.tensor},
        out=args.out,
        pooling=pooling,
        norm=norm,
        alpha=alpha,
        extras={"sigmoid_scale": scale, "sigmoid_shift": shift, "per_row": per_row},
    )
    fileio.save_pooled(pooled, os.path.join(args.out, "pooled.json"))
    fileio.save_context(ctx, os.path.join(args.out, "context.json"))
    run.echo()
    print(f"density {ctx.density:.6f} ({len(ctx.objects)} objects, {len(ctx.attributes)} attributes)")
    return 0


def cmd_lattice(args: argparse.Namespace) -> int:
    cfg = _load_config_file(args.config)
    labeling = _resolve(args, cfg, "labeling", "reduced")
    ctx = fileio.load_context(args.context)
    concepts = enumerate_concepts(ctx)
    lattice = build_lattice(concepts)
    dot = export_dot(lattice, ctx, labeling=labeling)

    run = RunConfig(
        subcommand="lattice",
        inputs={"context": args.context},
        out=args.out,
        extras={"labeling": labeling},
    )
    fileio.save_lattice_json(lattice, os.path.join(args.out, "lattice.json"))
    fileio.atomic_write_text(os.path.join(args.out, "lattice.dot"), dot)
    run.echo()
    print(f"{len(lattice.concepts)} concepts, {len(lattice.covers)} cover edges")
    return 0


def _load_scores(path: str):
    """Accept either a pooled-score file or a binary context file."""
    data = fileio._load_json(path)
    if "values" in data:
        return fileio.load_pooled(path)
    if "incidence" in data:
        ctx = fileio.load_context(path)
        return PooledContext(ctx.objects, ctx.attributes, ctx.incidence.astype(float))
    raise ValidationError(
        f"missing field 'values' or 'incidence' in {path}; not a scores or context file"
    )


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _load_config_file(args.config)
    task = _resolve(args, cfg, "task", "reconstruction")
    direction = _resolve(args, cfg, "direction", "attr")
    ks = _parse_ks(_resolve(args, cfg, "k", "1,5,10"))
    filtered = bool(_resolve(args, cfg, "filtered", False))
    alpha = _resolve(args, cfg, "alpha", None)

    scores = _load_scores(args.scores)
    gold = fileio.load_gold_context(args.gold)

    run = RunConfig(
        subcommand="eval",
        inputs={"scores": args.scores, "gold": args.gold},
        out=args.out,
        alpha=None if alpha is None else float(alpha),
        direction=direction,
        ks=ks,
        filtered=filtered,
        extras={"task": task},
    )

    if task == "reconstruction":
        if direction not in ("obj", "attr"):
            raise ValidationError(f"--direction must be 'obj' or 'attr', got {direction!r}")
        rank_dir = "rank-objects" if direction == "obj" else "rank-attributes"
        report = eval_reconstruction(scores, gold, rank_dir, ks=ks, filtered=filtered)
        fileio.save_report(report, os.path.join(args.out, "report.json"))
        fileio.save_report_csv(report, os.path.join(args.out, "report.csv"))
        run.echo()
        for name, value in report.aggregate.items():
            print(f"{name}={value:.6f}")
        return 0

    if task != "classification":
        raise ValidationError(f"--task must be 'reconstruction' or 'classification', got {task!r}")
    if alpha is not None:
        report = eval_concept_classification(scores, gold, float(alpha))
        fileio.save_report(report, os.path.join(args.out, "report.json"))
        fileio.save_report_csv(report, os.path.join(args.out, "report.csv"))
        run.echo()
        for name, value in report.aggregate.items():
            print(f"{name}={value:.6f}")
        return 0

    # no alpha given: sweep the threshold and keep the best micro-F1 report
    rows = []
    best = None
    best_alpha = None
    for step in range(1, 10):
        a = step / 10.0
        rep = eval_concept_classification(scores, gold, a)
        rows.append((a, rep.aggregate["micro_f1"], rep.aggregate["map"]))
        if best is None or rep.aggregate["micro_f1"] > best.aggregate["micro_f1"]:
            best, best_alpha = rep, a
    curve = "alpha,micro_f1,map\n" + "\n".join(
        f"{a},{f1!r},{m!r}" for a, f1, m in rows
    ) + "\n"
    fileio.atomic_write_text(os.path.join(args.out, "curve.csv"), curve)
    fileio.save_report(best, os.path.join(args.out, "report.json"))
    fileio.save_report_csv(best, os.path.join(args.out, "report.csv"))
    run.alpha = best_alpha
    run.echo()
    print(f"best alpha {best_alpha}")
    for name, value in best.aggregate.items():
        print(f"{name}={value:.6f}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _load_config_file(args.config)
    n = int(_resolve(args, cfg, "n", 1000))
    seed = int(_resolve(args, cfg, "seed", 0))
    noise = float(_resolve(args, cfg, "noise", 0.0))
    trials = int(_resolve(args, cfg, "trials", 3))
    schedule_raw = _resolve(args, cfg, "schedule", None)

    ctx = fileio.load_context(args.context)
    patterns = fileio.load_patterns(args.patterns)

    corpus = generate_corpus(ctx, patterns, n, seed, noise_rate=noise, context_id=args.context)
    learned = learn_context(corpus, ctx.objects, ctx.attributes)

    run = RunConfig(
        subcommand="synth",
        inputs={"context": args.context, "patterns": args.patterns},
        out=args.out,
        seed=seed,
        extras={"n": n, "noise": noise, "trials": trials, "schedule": schedule_raw},
    )
    fileio.save_corpus(corpus, os.path.join(args.out, "corpus.jsonl"))
    fileio.save_pooled(learned, os.path.join(args.out, "learned.json"))
    if schedule_raw:
        schedule = _parse_ks(schedule_raw)
        table = convergence_experiment(ctx, patterns, schedule, trials, seed, noise_rate=noise)
        fileio.save_convergence_csv(table, os.path.join(args.out, "convergence.csv"))
        for size, mean, std in table.summary():
            print(f"n={size} distance {mean:.6f} +- {std:.6f}")
    run.echo()
    print(f"{len(corpus)} sentences, learned density proxy {float(learned.scores.mean()):.6f}")
    return 0


def cmd_gibbs(args: argparse.Namespace) -> int:
    cfg = _load_config_file(args.config)
    steps = int(_resolve(args, cfg, "steps", 1000))
    burn_in = int(_resolve(args, cfg, "burn_in", 100))
    seed = int(_resolve(args, cfg, "seed", 0))
    provider_url = _resolve(args, cfg, "provider", None)
    joint_path = _resolve(args, cfg, "joint", None)

    patterns = fileio.load_patterns(args.patterns)
    if len(patterns) != 1:
        raise ValidationError("gibbs runs on exactly one pattern; pass a single-pattern file")
    pattern = patterns[0]

    if (provider_url is None) == (joint_path is None):
        raise ValidationError("pass exactly one of --provider URL or --joint FILE")
    if provider_url is not None:
        provider = HttpProvider(str(provider_url))
    else:
        pooled = fileio.load_pooled(str(joint_path))
        provider = JointTableProvider(pattern, pooled.objects, pooled.attributes, pooled.scores)

    result = gibbs_generate(provider, pattern, steps, burn_in, seed)

    run = RunConfig(
        subcommand="gibbs",
        inputs={"patterns": args.patterns, "joint": joint_path},
        out=args.out,
        seed=seed,
        provider=provider_url,
        extras={"steps": steps, "burn_in": burn_in},
    )
    fileio.save_chain_jsonl(result, os.path.join(args.out, "chain.jsonl"))
    fileio.save_pooled(result.empirical, os.path.join(args.out, "empirical.json"))
    run.echo()
    print(
        f"{len(result.chain)} steps, {len(result.empirical.objects)} objects and "
        f"{len(result.empirical.attributes)} attributes sampled"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fclat",
        description="Concept lattice reconstruction from probabilistic incidence tensors",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("build-context", help="pool, normalize, and binarize a score tensor")
    p.add_argument("tensor", help="triadic tensor JSON file")
    p.add_argument("--pooling", choices=["avg", "max"], default=None)
    p.add_argument("--norm", choices=["minmax", "sigmoid", "none"], default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--sigmoid-scale", dest="sigmoid_scale", type=float, default=None)
    p.add_argument("--sigmoid-shift", dest="sigmoid_shift", type=float, default=None)
    p.add_argument("--per-row", dest="per_row", action="store_const", const=True, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_context)

    p = sub.add_parser("lattice", help="enumerate concepts and emit the lattice")
    p.add_argument("context", help="binary context JSON file")
    p.add_argument("--labeling", choices=["full", "reduced"], default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("eval", help="score a reconstruction against a gold context")
    p.add_argument("scores", help="pooled-score or binary context JSON file")
    p.add_argument("gold", help="gold context JSON file")
    p.add_argument("--task", choices=["reconstruction", "classification"], default=None)
    p.add_argument("--direction", choices=["obj", "attr"], default=None)
    p.add_argument("--k", default=None, help="comma-separated cutoffs, e.g. 1,5,10")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--filtered", action="store_const", const=True, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a corpus and learn the context back")
    p.add_argument("context", help="ground-truth context JSON file")
    p.add_argument("patterns", help="pattern JSON file")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--schedule", default=None, help="comma-separated corpus sizes for convergence")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("gibbs", help="sample object-attribute pairs from a provider")
    p.add_argument("patterns", help="single-pattern JSON file")
    p.add_argument("--provider", default=None, help="HTTP provider base URL")
    p.add_argument("--joint", default=None, help="joint-table JSON file for the builtin provider")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gibbs)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
