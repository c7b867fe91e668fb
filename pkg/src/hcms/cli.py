"""Command-line entry point: preprocess | train | eval | predict | stats | ablate.

Configuration is a flat "key = value" text file; --set key=value flags
override file values, and --seed overrides the seed key. Every command
writes its resolved configuration next to its outputs so any reported
number is reproducible from the artifacts alone.

Exit codes: 0 success, 2 missing/unreadable file, 3 corpus parse error,
4 checkpoint error, 5 configuration error, 1 anything else.
"""

import argparse
import sys
from dataclasses import fields
from pathlib import Path

from .corpus import (CleaningConfig, ConllParseError, LABELS, build_vocab,
                     clean_corpus, corpus_stats, encode_corpus, format_stats,
                     format_stats_kv, read_conll_file, serialize_conll)
from .layers import HCMSModel, ModelConfig
from .metrics import format_report, format_report_kv, score
from .train import (CheckpointError, OptimizerConfig, TrainConfig, evaluate,
                    format_epoch, load_checkpoint, save_checkpoint, train)

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_MISSING_FILE = 2
EXIT_PARSE = 3
EXIT_CHECKPOINT = 4
EXIT_CONFIG = 5


class ConfigError(ValueError):
    pass


def _default_config():
    cfg = {"seed": 0}
    for dc in (CleaningConfig, TrainConfig, OptimizerConfig):
        for f in fields(dc):
            cfg[f.name] = f.default
    for f in fields(ModelConfig):
        if f.name == "vocab_size":
            continue
        cfg[f.name] = f.default
    return cfg


def _coerce(key, raw, template):
    if key not in template:
        raise ConfigError(f"unknown configuration key: {key}")
    current = template[key]
    raw = raw.strip()
    try:
        if isinstance(current, bool):
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def load_run_config(config_path=None, overrides=(), seed=None):
    cfg = _default_config()
    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            cfg[key] = _coerce(key, value, cfg)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        cfg[key.strip()] = _coerce(key.strip(), value, cfg)
    if seed is not None:
        cfg["seed"] = seed
    return cfg


def _write_config(cfg, out_dir):
    text = "\n".join(f"{k} = {cfg[k]}" for k in sorted(cfg)) + "\n"
    (Path(out_dir) / "config.txt").write_text(text, encoding="utf-8")


def _split_configs(cfg):
    cleaning = CleaningConfig.from_dict(cfg)
    tcfg = TrainConfig(epochs=cfg["epochs"], batch_size=cfg["batch_size"],
                       seed=cfg["seed"], shuffle=cfg["shuffle"])
    ocfg = OptimizerConfig(lr=cfg["lr"], beta1=cfg["beta1"],
                           beta2=cfg["beta2"], epsilon=cfg["epsilon"])
    return cleaning, tcfg, ocfg


def _model_config(cfg, vocab_size):
    kwargs = {f.name: cfg[f.name] for f in fields(ModelConfig)
              if f.name != "vocab_size"}
    kwargs["lang_features"] = cfg["append_lang_onehot"]
    return ModelConfig(vocab_size=vocab_size, **kwargs)


def _load_corpus(path, strict=False):
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"corpus file not found: {p}")
    return read_conll_file(p, strict=strict)


def _prepare(path, cleaning):
    records, skipped = _load_corpus(path)
    cleaned, dropped = clean_corpus(records, cleaning)
    return cleaned, skipped, dropped


# ---------------------------------------------------------------------------
# commands

def cmd_preprocess(args):
    cfg = load_run_config(args.config, args.set, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cleaning = CleaningConfig.from_dict(cfg)
    records, skipped = _load_corpus(args.input, strict=args.strict)
    cleaned, dropped = clean_corpus(records, cleaning)
    (out / "cleaned.conll").write_text(serialize_conll(cleaned), encoding="utf-8")
    report = [f"parsed_records = {len(records)}",
              f"skipped_blocks = {len(skipped)}",
              f"dropped_empty_after_cleaning = {dropped}"]
    report += [f"skipped_line_{s['line']} = {s['reason']}" for s in skipped]
    (out / "skip_report.txt").write_text("\n".join(report) + "\n", encoding="utf-8")
    _write_config(cfg, out)
    return EXIT_OK


def _train_once(cfg, train_path, val_path, out_dir=None):
    cleaning, tcfg, ocfg = _split_configs(cfg)
    train_recs, _, _ = _prepare(train_path, cleaning)
    val_recs, _, _ = _prepare(val_path, cleaning) if val_path else ([], None, 0)
    vocab = build_vocab(train_recs, min_count=1)
    train_data = encode_corpus(train_recs, vocab, cleaning)
    val_data = encode_corpus(val_recs, vocab, cleaning)
    model = HCMSModel(_model_config(cfg, len(vocab)), seed=cfg["seed"])
    log = train(model, train_data, val_data, tcfg, ocfg)
    if out_dir:
        out = Path(out_dir)
        (out / "epochs.log").write_text(
            "\n".join(format_epoch(e) for e in log) + "\n", encoding="utf-8")
        save_checkpoint(model, vocab.index_to_token, out / "model.ckpt",
                        extra_config={"cleaning": cleaning.to_dict(),
                                      "labels": list(LABELS)})
    return model, vocab, cleaning, log


def cmd_train(args):
    cfg = load_run_config(args.config, args.set, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _train_once(cfg, args.train, args.val, out_dir=out)
    _write_config(cfg, out)
    return EXIT_OK


def _load_for_inference(checkpoint):
    p = Path(checkpoint)
    if not p.exists():
        raise FileNotFoundError(f"checkpoint not found: {p}")
    model, vocab_tokens, extra = load_checkpoint(p)
    from .corpus import Vocabulary
    vocab = Vocabulary.from_tokens(vocab_tokens)
    cleaning = CleaningConfig.from_dict(extra.get("cleaning", {}))
    return model, vocab, cleaning


def cmd_eval(args):
    cfg = load_run_config(args.config, args.set, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model, vocab, cleaning = _load_for_inference(args.checkpoint)
    records, _ = _load_corpus(args.input)
    cleaned, _ = clean_corpus([r for r in records if r.label is not None], cleaning)
    data = encode_corpus(cleaned, vocab, cleaning)
    trues, preds = evaluate(model, data)
    report = score(trues, preds, model.config.n_classes)
    (out / "report.txt").write_text(format_report(report) + "\n", encoding="utf-8")
    (out / "report.kv").write_text(format_report_kv(report) + "\n", encoding="utf-8")
    _write_config(cfg, out)
    return EXIT_OK


def cmd_predict(args):
    cfg = load_run_config(args.config, args.set, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model, vocab, cleaning = _load_for_inference(args.checkpoint)
    records, _ = _load_corpus(args.input)
    lines = []
    from .corpus import clean, encode
    for rec in records:
        cleaned = clean(rec, cleaning)
        if cleaned is None:
            ids, onehot = [1], None  # all tokens cleaned away: predict on UNK
        else:
            ids, onehot = encode(cleaned, vocab, cleaning)
        lines.append(f"{rec.id}\t{LABELS[model.predict(ids, onehot)]}")
    (out / "predictions.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_config(cfg, out)
    return EXIT_OK


def cmd_stats(args):
    cfg = load_run_config(args.config, args.set, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records, _ = _load_corpus(args.input)
    stats = corpus_stats(records)
    (out / "stats.txt").write_text(format_stats(stats) + "\n", encoding="utf-8")
    (out / "stats.kv").write_text(format_stats_kv(stats) + "\n", encoding="utf-8")
    _write_config(cfg, out)
    return EXIT_OK


def train_and_test_f1(cfg, train_path, val_path, test_path):
    """Train one configuration and return its test weighted F1."""
    model, vocab, cleaning, _ = _train_once(cfg, train_path, val_path)
    test_recs, _, _ = _prepare(test_path, cleaning)
    data = encode_corpus(test_recs, vocab, cleaning)
    trues, preds = evaluate(model, data)
    return score(trues, preds, model.config.n_classes).weighted_f1


def run_ablation(cfg, train_path, val_path, test_path):
    """Preprocessing grid (emoji x contractions) plus attention on/off.

    Returns a list of (row_name, test_f1) in a fixed order.
    """
    rows = []

    def test_f1(variant_cfg):
        return train_and_test_f1(variant_cfg, train_path, val_path, test_path)

    for emoji in (True, False):
        for contr in (True, False):
            variant = dict(cfg, replace_emoji=emoji, expand_contractions=contr)
            name = (f"preprocess_emoji_{'on' if emoji else 'off'}"
                    f"_contractions_{'on' if contr else 'off'}")
            rows.append((name, test_f1(variant)))
    for attn in (True, False):
        variant = dict(cfg, attention_enabled=attn)
        rows.append((f"attention_{'on' if attn else 'off'}", test_f1(variant)))
    return rows


def cmd_ablate(args):
    cfg = load_run_config(args.config, args.set, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_ablation(cfg, args.train, args.val, args.test)
    text = "\n".join(f"{name}\t{f1:.6f}" for name, f1 in rows) + "\n"
    (out / "ablation.tsv").write_text(text, encoding="utf-8")
    _write_config(cfg, out)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="hcms",
        description="Conv1D + additive self-attention sentiment classifier "
                    "for code-mixed tweets")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--seed", type=int, help="override the seed key")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a single configuration key")
        p.add_argument("--out-dir", required=True)

    p = sub.add_parser("preprocess", help="clean a CONLL corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--strict", action="store_true",
                   help="abort on the first malformed block")
    common(p)
    p.set_defaults(fn=cmd_preprocess)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--train", required=True)
    p.add_argument("--val")
    common(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="score a checkpoint on labeled data")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("predict", help="label an unlabeled corpus")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("stats", help="corpus distribution report")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("ablate", help="preprocessing and attention ablation grid")
    p.add_argument("--train", required=True)
    p.add_argument("--val", required=True)
    p.add_argument("--test", required=True)
    common(p)
    p.set_defaults(fn=cmd_ablate)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except ConllParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CheckpointError as exc:
        print(f"checkpoint error: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
