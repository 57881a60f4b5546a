"""Adapter executable speaking the harness plugin wire contract.

    dl-adapter <model> --train <csv> --n <count> --out <csv> --seed <u64>
               [--hparams <json file>]

Models: ctgan, tvae, wgan, findiff. Every hyperparameter has a default
(printed by --help); unknown keys in the hparams file are rejected. On any
failure the process exits nonzero with a one-line stderr diagnostic.
"""

from __future__ import annotations

import argparse
import json
import sys

from .data import AdapterError, load_csv, write_csv
from .models import ctgan, diffusion, tvae, wgan

MODELS = {
    "ctgan": ctgan,
    "tvae": tvae,
    "wgan": wgan,
    "findiff": diffusion,
}


def resolve_hyperparams(model_name: str, raw: dict) -> dict:
    """Defaults overlaid with the file's values, coerced to the default's type."""
    defaults = MODELS[model_name].DEFAULTS
    unknown = set(raw) - set(defaults)
    if unknown:
        raise AdapterError(f"unknown hyperparameters for {model_name}: {sorted(unknown)}")
    resolved = dict(defaults)
    for key, value in raw.items():
        target = type(defaults[key])
        try:
            resolved[key] = target(value)
        except (TypeError, ValueError):
            raise AdapterError(f"hyperparameter {key} expects {target.__name__}, got {value!r}")
    return resolved


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dl-adapter",
                                     description="Deep generative tabular models over the plugin protocol.")
    parser.add_argument("model", choices=sorted(MODELS),
                        help="which architecture to train")
    parser.add_argument("--train", required=True, help="training CSV (header row)")
    parser.add_argument("--n", type=int, required=True, help="rows to generate")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--seed", type=int, required=True, help="RNG seed")
    parser.add_argument("--hparams", default=None, help="JSON file of hyperparameter overrides")
    defaults = {name: module.DEFAULTS for name, module in sorted(MODELS.items())}
    parser.epilog = "hyperparameter defaults: " + json.dumps(defaults)
    return parser


def adapter_main(args) -> int:
    if args.n < 1:
        raise AdapterError("--n must be >= 1")
    raw_hparams: dict = {}
    if args.hparams:
        try:
            with open(args.hparams, encoding="utf-8") as handle:
                raw_hparams = json.load(handle)
        except OSError as exc:
            raise AdapterError(f"cannot read hparams file: {exc}")
        except json.JSONDecodeError as exc:
            raise AdapterError(f"hparams file is not valid JSON: {exc}")
        if not isinstance(raw_hparams, dict):
            raise AdapterError("hparams file must hold a JSON object")
    hp = resolve_hyperparams(args.model, raw_hparams)
    data = load_csv(args.train)
    numeric, codes = MODELS[args.model].train_and_sample(data, args.n, args.seed, hp)
    write_csv(args.out, data, numeric, codes)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return adapter_main(args)
    except AdapterError as exc:
        print(f"dl-adapter {args.model}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # anything unexpected still honors the contract
        print(f"dl-adapter {args.model}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
