"""Command-line pipeline: embed, prepare, train, calibrate, score, report.

Every command takes its options from flags, optionally backed by a JSON
config file (``--config``); flags override file values. All randomness
flows from the single ``--seed``, so repeated runs with the same inputs
produce byte-identical artifacts.

On any module error the command exits nonzero, removes the outputs it
declared (no partial artifacts are left behind), and prints one
machine-readable JSON line to stderr: ``{"error": code, "message": text}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import calibration, dataio, report, scoring, training
from .distances import DistanceKind
from .errors import SimcalError, ThresholdMismatchError, UnresolvedIdError
from .model import ProjectionModel, forward_batch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simcal",
        description="Similarity threshold calibration over precomputed sentence embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file mirroring the flags; flags override it")
        p.add_argument("--seed", type=int, help="seed for every random choice (default 0)")
        return p

    p = add("embed-toy", "embed an id<TAB>text file with the hashing toy embedder")
    p.add_argument("--texts", help="input id<TAB>text file")
    p.add_argument("--out", help="output embedding JSONL file")
    p.add_argument("--dim", type=int, help="embedding dimension (default 512)")
    p.add_argument("--boilerplate", help="comma-separated tokens to drop during cleaning")

    p = add("sick-prep", "convert a SICK TSV into a pair CSV plus an id<TAB>text file")
    p.add_argument("--sick", help="path to the SICK distribution TSV")
    p.add_argument("--out", help="output directory (pairs.csv, texts.tsv)")
    p.add_argument(
        "--drop-midrange",
        action="store_true",
        default=None,
        help="drop pairs with relatedness in (2, 3]",
    )

    p = add("train", "fit the tied-weight projection head")
    p.add_argument("--embeddings", help="embedding JSONL file")
    p.add_argument("--pairs", help="pair CSV file")
    p.add_argument("--model", help="output model JSON file")
    p.add_argument("--distance", choices=["manhattan", "euclidean", "minkowski"])
    p.add_argument("--p", type=int, help="minkowski order (default 3)")
    p.add_argument("--lr", type=float, help="learning rate (default 0.005)")
    p.add_argument("--clip-norm", type=float, help="global gradient norm limit (default 2.0)")
    p.add_argument("--batch-size", type=int, help="mini-batch size (default 512)")
    p.add_argument("--max-epochs", type=int, help="epoch cap (default 100)")
    p.add_argument("--patience", type=int, help="early-stopping patience (default 10)")
    p.add_argument("--out-dim", type=int, help="projection width (default 50)")

    p = add("calibrate", "derive the threshold, mislabel rates, and accuracy tables")
    p.add_argument("--embeddings", help="embedding JSONL file")
    p.add_argument("--pairs", help="pair CSV file")
    p.add_argument("--model", help="trained model JSON file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--bins", type=int, help="histogram bins for the threshold (default 200)")

    p = add("score", "score pairs against a calibration")
    p.add_argument("--embeddings", help="embedding JSONL file")
    p.add_argument("--pairs", help="pair CSV file")
    p.add_argument("--model", help="trained model JSON file")
    p.add_argument("--calibration", help="directory written by `calibrate`")
    p.add_argument("--out", help="output CSV (distance,label,accuracy_score)")

    p = add("report", "render the density CSV to an SVG overlay")
    p.add_argument("--densities", help="density CSV from `calibrate`")
    p.add_argument("--calibration", help="calibration.json or the directory holding it")
    p.add_argument("--out", help="output SVG file")

    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    """Overlay CLI flags on the optional JSON config; flags win."""
    merged: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise SimcalError(f"{args.config}: config must be a JSON object")
        merged.update({str(k).replace("-", "_"): v for k, v in loaded.items()})
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            merged[key] = value
    return merged


class _Options:
    """Merged options with typed accessors and required-flag checking."""

    def __init__(self, values: dict):
        self.values = values

    def require(self, key: str) -> str:
        value = self.values.get(key)
        if value is None:
            raise SimcalError(f"missing required option --{key.replace('_', '-')}")
        return str(value)

    def get(self, key: str, default):
        value = self.values.get(key)
        if value is None:
            return default
        if isinstance(default, bool):
            return bool(value)
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
        return value


class _Outputs:
    """Declared output paths, removed as a group when a command fails."""

    def __init__(self) -> None:
        self.paths: list[Path] = []

    def declare(self, *paths: str | Path) -> None:
        self.paths.extend(Path(p) for p in paths)

    def cleanup(self) -> None:
        for path in self.paths:
            try:
                path.unlink(missing_ok=True)
            except OSError:
                pass


def _distance_kind(opts: _Options) -> DistanceKind:
    return DistanceKind.from_name(opts.get("distance", "minkowski"), opts.get("p", 3))


def _pair_distances(
    model: ProjectionModel, pairs, embeddings: dict[str, np.ndarray]
) -> np.ndarray:
    ids = {p.driver_id for p in pairs} | {p.target_id for p in pairs}
    missing = sorted(ids - set(embeddings))
    if missing:
        raise UnresolvedIdError(f"{len(missing)} pair id(s) have no embedding: {missing[:5]}")
    a = np.ascontiguousarray([embeddings[p.driver_id] for p in pairs])
    b = np.ascontiguousarray([embeddings[p.target_id] for p in pairs])
    yhat, _ = forward_batch(model, a, b)
    return yhat


def _cmd_embed_toy(opts: _Options, outputs: _Outputs) -> None:
    texts = dataio.read_texts(opts.require("texts"))
    out = opts.require("out")
    outputs.declare(out)
    boilerplate = [t for t in opts.get("boilerplate", "").split(",") if t.strip()]
    config = dataio.CleaningConfig(boilerplate_terms=frozenset(t.strip() for t in boilerplate))
    dim = opts.get("dim", 512)
    seed = opts.get("seed", 0)
    records = [
        dataio.EmbeddingRecord(text_id, dataio.toy_embed(text, dim, seed, config))
        for text_id, text in texts
    ]
    dataio.write_embeddings(records, out)
    print(f"wrote {len(records)} embeddings of dimension {dim} to {out}")


def _cmd_sick_prep(opts: _Options, outputs: _Outputs) -> None:
    rows = dataio.read_sick(opts.require("sick"))
    out_dir = Path(opts.require("out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    pairs_path = out_dir / "pairs.csv"
    texts_path = out_dir / "texts.tsv"
    outputs.declare(pairs_path, texts_path)
    pairs, texts = dataio.sick_to_pairs(rows, drop_midrange=opts.get("drop_midrange", False))
    dataio.write_pairs(pairs, pairs_path)
    dataio.write_texts(texts, texts_path)
    kept = len(pairs)
    print(f"kept {kept}/{len(rows)} pairs ({len(texts)} unique sentences) in {out_dir}")


def _cmd_train(opts: _Options, outputs: _Outputs) -> None:
    embeddings = dataio.embeddings_by_id(dataio.read_embeddings(opts.require("embeddings")))
    pairs = dataio.read_pairs(opts.require("pairs"))
    model_path = opts.require("model")
    outputs.declare(model_path)
    config = training.TrainConfig(
        learning_rate=opts.get("lr", 0.005),
        clip_norm=opts.get("clip_norm", 2.0),
        batch_size=opts.get("batch_size", 512),
        max_epochs=opts.get("max_epochs", 100),
        patience=opts.get("patience", 10),
        validation_fraction=opts.get("validation_fraction", 0.2),
        seed=opts.get("seed", 0),
        out_dim=opts.get("out_dim", 50),
    )
    model, history = training.fit(pairs, embeddings, config, _distance_kind(opts))
    training.save_model(model, model_path, seed=config.seed, history=history)
    best = history.best_epoch
    print(
        f"trained {history.epochs_run} epochs (best {best}): "
        f"val_loss={history.val_loss[best]:.6f} val_accuracy={history.val_accuracy[best]:.4f}"
    )


def _cmd_calibrate(opts: _Options, outputs: _Outputs) -> None:
    embeddings = dataio.embeddings_by_id(dataio.read_embeddings(opts.require("embeddings")))
    pairs = dataio.read_pairs(opts.require("pairs"))
    model, _, _ = training.load_model(opts.require("model"))
    out_dir = Path(opts.require("out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = out_dir / "calibration.json"
    density_path = out_dir / "densities.csv"
    right_path = out_dir / "accuracy_right.json"
    wrong_path = out_dir / "accuracy_wrong.json"
    outputs.declare(summary_path, density_path, right_path, wrong_path)

    yhat = _pair_distances(model, pairs, embeddings)
    labels = np.array([p.label for p in pairs])
    n_bins = opts.get("bins", 200)
    result, dp = calibration.calibrate(yhat, labels, model.distance_kind, n_bins=n_bins)

    right_table = scoring.build_accuracy_table(
        yhat[yhat < result.threshold], scoring.Side.RIGHT, result.threshold
    )
    wrong_table = scoring.build_accuracy_table(
        yhat[yhat >= result.threshold], scoring.Side.WRONG, result.threshold
    )

    calibration.write_density_csv(dp, density_path)
    scoring.save_accuracy_table(right_table, right_path)
    scoring.save_accuracy_table(wrong_table, wrong_path)
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "threshold": result.threshold,
                "mislabeled_wrong_fraction": result.mislabeled_wrong_fraction,
                "mislabeled_right_fraction": result.mislabeled_right_fraction,
                "n_bins": n_bins,
                "distance_kind": str(result.distance_kind),
            },
            fh,
        )
        fh.write("\n")
    print(
        f"threshold={result.threshold:.6f} "
        f"mislabeled_wrong={result.mislabeled_wrong_fraction:.4f} "
        f"mislabeled_right={result.mislabeled_right_fraction:.4f} -> {out_dir}"
    )


def _calibration_dir(path_str: str) -> Path:
    path = Path(path_str)
    return path.parent if path.is_file() else path


def _cmd_score(opts: _Options, outputs: _Outputs) -> None:
    embeddings = dataio.embeddings_by_id(dataio.read_embeddings(opts.require("embeddings")))
    pairs = dataio.read_pairs(opts.require("pairs"))
    model, _, _ = training.load_model(opts.require("model"))
    cal_dir = _calibration_dir(opts.require("calibration"))
    out = opts.require("out")
    outputs.declare(out)
    with open(cal_dir / "calibration.json", encoding="utf-8") as fh:
        threshold = float(json.load(fh)["threshold"])
    right_table = scoring.load_accuracy_table(cal_dir / "accuracy_right.json")
    wrong_table = scoring.load_accuracy_table(cal_dir / "accuracy_wrong.json")
    if right_table.threshold != threshold or wrong_table.threshold != threshold:
        raise ThresholdMismatchError(
            "accuracy tables and calibration.json disagree on the threshold"
        )
    yhat = _pair_distances(model, pairs, embeddings)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        fh.write("distance,label,accuracy_score\n")
        for value in yhat:
            scored = scoring.score_prediction(float(value), threshold, right_table, wrong_table)
            fh.write(f"{scored.distance!r},{scored.label},{scored.accuracy_score!r}\n")
    print(f"scored {yhat.size} pairs -> {out}")


def _cmd_report(opts: _Options, outputs: _Outputs) -> None:
    rows = report.read_density_csv(opts.require("densities"))
    cal_path = Path(opts.require("calibration"))
    if cal_path.is_dir():
        cal_path = cal_path / "calibration.json"
    with open(cal_path, encoding="utf-8") as fh:
        threshold = float(json.load(fh)["threshold"])
    out = opts.require("out")
    outputs.declare(out)
    svg = report.emit_report(rows, threshold)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"report -> {out}")


_COMMANDS = {
    "embed-toy": _cmd_embed_toy,
    "sick-prep": _cmd_sick_prep,
    "train": _cmd_train,
    "calibrate": _cmd_calibrate,
    "score": _cmd_score,
    "report": _cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    outputs = _Outputs()
    try:
        opts = _Options(_merge_config(args))
        _COMMANDS[args.command](opts, outputs)
    except (SimcalError, OSError, ValueError) as exc:
        outputs.cleanup()
        code = exc.code if isinstance(exc, SimcalError) else type(exc).__name__
        print(json.dumps({"error": code, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
