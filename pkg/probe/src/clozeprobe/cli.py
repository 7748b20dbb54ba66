"""Command line entry points: probe, baseline, serve."""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import fileio
from .errors import ModelError, SpecError
from .spec import DIRECTIONS, ProbeSpec, load_probe_spec


def _spec_with_overrides(args: argparse.Namespace) -> ProbeSpec:
    spec = load_probe_spec(args.spec)
    overrides = {}
    if getattr(args, "model", None) is not None:
        overrides["model"] = args.model
    if getattr(args, "direction", None) is not None:
        overrides["direction"] = args.direction
    if getattr(args, "batch", None) is not None:
        overrides["batch_size"] = args.batch
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
    return spec


def _load_model(spec: ProbeSpec):
    # imported lazily so spec validation errors never wait on torch
    from .model import MaskedModel

    return MaskedModel(spec.model, spec.device)


def cmd_probe(args: argparse.Namespace) -> int:
    from .probing import probe_tensor

    spec = _spec_with_overrides(args)
    model = _load_model(spec)
    payload = probe_tensor(spec, model)
    out = os.path.join(args.out, "tensor.json")
    fileio.write_json(out, payload)
    print(
        f"tensor {len(payload['objects'])} x {len(payload['attributes'])} x "
        f"{len(payload['patterns'])} ({spec.direction}) -> {out}"
    )
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    from .baseline import embedding_scores

    spec = _spec_with_overrides(args)
    model = _load_model(spec)
    payload = embedding_scores(spec, model)
    out = os.path.join(args.out, "baseline.json")
    fileio.write_json(out, payload)
    print(
        f"scores {len(payload['objects'])} x {len(payload['attributes'])} -> {out}"
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import make_server

    spec = _spec_with_overrides(args)
    model = _load_model(spec)
    httpd = make_server(model, args.port, args.top_k)
    host, port = httpd.server_address[:2]
    print(
        f"serving {spec.model} on http://{host}:{port}/fill "
        f"(default top_k {args.top_k})",
        flush=True,
    )
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clozeprobe",
        description="Cloze probing of masked language models",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("probe", help="score every identifier pair under every pattern")
    p.add_argument("spec", help="probe spec JSON file")
    p.add_argument("--model", default=None, help="override the spec's model name")
    p.add_argument("--direction", choices=list(DIRECTIONS), default=None)
    p.add_argument("--batch", type=int, default=None, help="fillings per forward pass")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("baseline", help="embedding-similarity scores for the same pairs")
    p.add_argument("spec", help="probe spec JSON file")
    p.add_argument("--model", default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("serve", help="answer POST /fill queries over HTTP")
    p.add_argument("spec", help="probe spec JSON file (model and device)")
    p.add_argument("--model", default=None)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--top-k", dest="top_k", type=int, default=50,
                   help="candidates returned when a request leaves top_k unset")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
