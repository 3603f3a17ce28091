"""Command-line entry point: ``hanso <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data or schema error, 3 numeric failure.
Diagnostics go to stderr; results go to files or stdout.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .annotation import LABEL_CLASSES, AnnotationError, DocumentLabels, LabelClass, parse_standoff
from .checkpoint import load_checkpoint, save_checkpoint
from .corpusgen import GenConfig, generate_with_truth
from .data import encode_corpus, load_corpus, write_corpus
from .embeddings import HashEmbedder, PrecomputedEmbedder, embedder_from_description
from .evaluate import auc, binarize, mean_std_compare, roc_curve, youden_j
from .labelmap import SENTENCE_TASKS, relations_to_sentence_labels
from .model import TOWERS, HansoConfig, make_batch, softmax
from .scoring import MatchCounts, prf, score_corpus, score_document_labels
from .textproc import segment
from .train import RECIPES, TrainConfig, evaluate_f1, train

log = logging.getLogger("hanso")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HANSO_THREADS", "1")))
    except ValueError:
        raise UsageError("HANSO_THREADS must be an integer") from None


def _load_json(path) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file {p} does not exist")
    return json.loads(p.read_text())


def _require_dir(path) -> Path:
    p = Path(path)
    if not p.is_dir():
        raise UsageError(f"{p} is not a directory")
    return p


def _row(c: MatchCounts) -> dict:
    s = prf(c)
    return {"tp": c.tp, "fp": c.fp, "fn": c.fn, "precision": s.precision, "recall": s.recall, "f1": s.f1}


def _emit(text: str, out: str | None):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    directory = _require_dir(args.corpus)
    n_docs = n_ent = n_rel = n_err = 0
    for txt_path in sorted(directory.glob("*.txt")):
        ann_path = txt_path.with_suffix(".ann")
        try:
            doc = parse_standoff(
                txt_path.read_text(encoding="utf-8"),
                ann_path.read_text(encoding="utf-8") if ann_path.exists() else "",
                doc_id=txt_path.stem,
            )
        except AnnotationError as exc:
            n_err += 1
            print(f"{txt_path.stem}: {exc}", file=sys.stderr)
            continue
        n_docs += 1
        n_ent += len(doc.entities)
        n_rel += len(doc.relations)
    print(f"{n_docs + n_err} documents, {n_ent} entities, {n_rel} relations, {n_err} invalid")
    return EXIT_DATA if n_err else EXIT_OK


def _aligned(dir_a: Path, dir_b: Path):
    a = {d.doc_id: d for d in load_corpus(dir_a)}
    b = {d.doc_id: d for d in load_corpus(dir_b)}
    common = sorted(set(a) & set(b))
    for only, where in ((set(a) - set(b), dir_a), (set(b) - set(a), dir_b)):
        if only:
            log.warning("%d documents only in %s are skipped", len(only), where)
    if not common:
        raise AnnotationError("the two annotation directories share no documents")
    return [a[k] for k in common], [b[k] for k in common]


def cmd_agree(args) -> int:
    gold, pred = _aligned(_require_dir(args.dir_a), _require_dir(args.dir_b))
    report = score_corpus(gold, pred)
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.to_table())
    return EXIT_OK


def cmd_map(args) -> int:
    docs = load_corpus(_require_dir(args.corpus))
    lines = []
    for d in docs:
        sents = segment(d.text)
        targets = relations_to_sentence_labels(d, sents)
        lines.append(
            json.dumps(
                {
                    "doc_id": d.doc_id,
                    "tasks": [t.value for t in SENTENCE_TASKS],
                    "sentences": [[s.start, s.end] for s in sents],
                    "flags": targets.flags.tolist(),
                }
            )
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    cfg = _load_json(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.n_docs is not None:
        cfg["n_docs"] = args.n_docs
    try:
        config = GenConfig.from_dict(cfg)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad generator config: {exc}") from None
    docs, truths = generate_with_truth(config)
    out = Path(args.out)
    write_corpus(docs, out)
    (out / "ground_truth.json").write_text(json.dumps([t.to_json() for t in truths]) + "\n")
    print(f"wrote {len(docs)} documents to {out}")
    return EXIT_OK


def _model_and_train_configs(args, cfg: dict) -> tuple[HansoConfig, TrainConfig]:
    variant = args.variant or cfg.get("model", {}).get("variant", "full")
    recipe = RECIPES[variant]
    mcfg = {"dropout": recipe["dropout"], **cfg.get("model", {}), "variant": variant}
    tcfg = {"epochs": recipe["epochs"], "batch_size": recipe["batch_size"], **cfg.get("train", {})}
    if args.seed is not None:
        mcfg["seed"] = tcfg["seed"] = args.seed
    if args.epochs is not None:
        tcfg["epochs"] = args.epochs
    if cfg.get("binary"):
        mcfg["l_d"] = 2
    try:
        return HansoConfig(**mcfg), TrainConfig(**tcfg)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad model/train config: {exc}") from None


def _embedder(args, cfg: dict, dim: int):
    if getattr(args, "embeddings", None):
        if not Path(args.embeddings).is_file():
            raise UsageError(f"embedding file {args.embeddings} does not exist")
        return PrecomputedEmbedder(args.embeddings)
    e = cfg.get("embedder", {})
    return HashEmbedder(e.get("dim", dim), e.get("seed", 0))


def cmd_train(args) -> int:
    cfg = _load_json(args.config)
    corpus = _require_dir(args.corpus)
    val_dir = _require_dir(args.val) if args.val else None
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    mc, tc = _model_and_train_configs(args, cfg)
    embedder = _embedder(args, cfg, mc.embed_dim)
    if embedder.dim != mc.embed_dim:
        mc = dataclasses.replace(mc, embed_dim=embedder.dim)
    binary = bool(cfg.get("binary"))
    encoded = encode_corpus(load_corpus(corpus), embedder, mc, binary=binary)
    val = encode_corpus(load_corpus(val_dir), embedder, mc, binary=binary) if val_dir else None
    out = Path(args.out)

    def one(run: int):
        seed = tc.seed + run
        mc_r = dataclasses.replace(mc, seed=seed)
        tc_r = dataclasses.replace(tc, seed=seed)
        model, hist = train(encoded, mc_r, tc_r, validation=val)
        run_dir = out if args.runs == 1 else out / f"run{run}"
        save_checkpoint(model, run_dir, embedder=embedder.describe(), extra={"binary": binary, "train": dataclasses.asdict(tc_r)})
        with open(run_dir / "history.csv", "w", newline="") as fh:
            rows = hist.to_rows()
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        summary = {"seed": seed, "final_loss": hist.loss[-1], "train_micro_f1": evaluate_f1(model, encoded)["mean"]}
        if val:
            summary["val_micro_f1"] = evaluate_f1(model, val)["mean"]
        return summary

    with ThreadPoolExecutor(max_workers=min(_threads(), args.runs)) as pool:
        runs = list(pool.map(one, range(args.runs)))
    summary = {"variant": mc.variant, "runs": runs}
    for key in ("final_loss", "train_micro_f1", "val_micro_f1"):
        vals = [r[key] for r in runs if key in r]
        if vals:
            summary[key] = {"mean": float(np.mean(vals)), "std": float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0}
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps({k: v for k, v in summary.items() if k != "runs"}))
    return EXIT_OK


def cmd_predict(args) -> int:
    ckpt = _require_dir(args.checkpoint)
    corpus = _require_dir(args.corpus)
    model, manifest = load_checkpoint(ckpt)
    if args.embeddings:
        embedder = PrecomputedEmbedder(args.embeddings)
    else:
        desc = manifest.get("embedder") or {"kind": "hash", "dim": model.config.embed_dim, "seed": 0}
        embedder = embedder_from_description(desc)
    binary = bool(manifest.get("extra", {}).get("binary"))
    docs = load_corpus(corpus)
    encoded = encode_corpus(docs, embedder, model.config, binary=binary)
    classes = ["not_bilateral", "bilateral"] if binary else [c.value for c in LABEL_CLASSES]
    records = []
    for i in range(0, len(encoded), 64):
        chunk = encoded[i : i + 64]
        out, _ = model.forward(make_batch(chunk))
        for b, d in enumerate(chunk):
            rec = {"doc_id": d.doc_id}
            for t in TOWERS:
                probs = softmax(out[t].doc_logits[b])
                rec[t] = {"label": classes[int(np.argmax(out[t].doc_logits[b]))], "probs": probs.tolist()}
            records.append(rec)
    payload = {"format": "hanso-predictions", "version": 1, "binary": binary, "classes": classes, "documents": records}
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    pred_path = Path(args.predictions)
    if not pred_path.is_file():
        raise UsageError(f"{pred_path} does not exist")
    preds = json.loads(pred_path.read_text())
    gold = {d.doc_id: d for d in load_corpus(_require_dir(args.gold))}
    records = [r for r in preds["documents"] if r["doc_id"] in gold]
    missing = [r["doc_id"] for r in preds["documents"] if r["doc_id"] not in gold]
    if missing:
        raise AnnotationError(f"{len(missing)} predicted documents have no gold annotation, e.g. {missing[0]}")
    binary = bool(preds.get("binary"))
    metrics: dict = {"n_docs": len(records), "binary": binary}
    if binary:
        metrics["documents"] = {}
        for t in TOWERS:
            g = [int(binarize(gold[r["doc_id"]].labels[t])) for r in records]
            p = [int(r[t]["label"] == "bilateral") for r in records]
            c = MatchCounts(
                sum(1 for a, b in zip(g, p) if a == b == 1),
                sum(1 for a, b in zip(g, p) if a == 0 and b == 1),
                sum(1 for a, b in zip(g, p) if a == 1 and b == 0),
            )
            metrics["documents"][t] = {"bilateral": _row(c)}
    else:
        g = [gold[r["doc_id"]].labels for r in records]
        p = [DocumentLabels(**{t: LabelClass(r[t]["label"]) for t in TOWERS}) for r in records]
        scored = score_document_labels(g, p)
        metrics["documents"] = {
            h: {"per_class": {k: _row(v) for k, v in d["per_class"].items()}, "micro": _row(d["micro"])}
            for h, d in scored.items()
        }
    scores = [r["infiltrates"]["probs"][-1] for r in records]
    targets = [int(binarize(gold[r["doc_id"]].labels.infiltrates)) for r in records]
    if 0 < sum(targets) < len(targets):
        curve = roc_curve(scores, targets)
        yj = youden_j(curve)
        metrics["roc"] = {
            "target": "infiltrates bilateral vs not bilateral",
            "auc": auc(curve),
            "youden": dataclasses.asdict(yj),
        }
        if args.roc:
            with open(args.roc, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["threshold", "fpr", "tpr"])
                for pt in curve:
                    w.writerow([pt.threshold, pt.fpr, pt.tpr])
    else:
        log.warning("gold labels contain a single binary class; ROC skipped")
    text = json.dumps(metrics, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    def load(p):
        data = json.loads(Path(p).read_text())
        return [r[args.metric] for r in data["runs"]]

    res = mean_std_compare(load(args.summary_a), load(args.summary_b))
    print(json.dumps(dataclasses.asdict(res)))
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hanso", description="Radiograph report labeling toolkit")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("validate", help="check a standoff corpus directory")
    s.add_argument("corpus")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("agree", help="score two annotation directories against each other")
    s.add_argument("dir_a", help="reference annotations")
    s.add_argument("dir_b", help="compared annotations")
    s.add_argument("--out", help="write the JSON report here")
    s.add_argument("--format", choices=["table", "json"], default="table")
    s.set_defaults(func=cmd_agree)

    s = sub.add_parser("map", help="per-sentence relation targets as JSON lines")
    s.add_argument("corpus")
    s.add_argument("--out")
    s.set_defaults(func=cmd_map)

    s = sub.add_parser("gen", help="generate a synthetic annotated corpus")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.add_argument("--n-docs", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("train", help="train HANSO on a corpus directory")
    s.add_argument("corpus")
    s.add_argument("--out", required=True)
    s.add_argument("--config")
    s.add_argument("--variant", choices=["lite", "full"])
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--seed", type=int)
    s.add_argument("--epochs", type=int)
    s.add_argument("--val", help="validation corpus directory")
    s.add_argument("--embeddings", help=".npz of precomputed token vectors")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", help="label a corpus with a trained checkpoint")
    s.add_argument("checkpoint")
    s.add_argument("corpus")
    s.add_argument("--out")
    s.add_argument("--embeddings")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("eval", help="score predictions against gold annotations")
    s.add_argument("predictions")
    s.add_argument("gold")
    s.add_argument("--out")
    s.add_argument("--roc", help="write ROC points as CSV")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("compare", help="Welch t-test between two train summaries")
    s.add_argument("summary_a")
    s.add_argument("summary_b")
    s.add_argument("--metric", default="val_micro_f1")
    s.set_defaults(func=cmd_compare)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
        if not getattr(args, "func", None):
            raise UsageError(parser.format_usage())
        return args.func(args)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return EXIT_USAGE
    except FloatingPointError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (AnnotationError, OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run())
