"""CONLL ingestion, tweet cleaning, vocabulary, encoding, corpus stats.

The CONLL dialect: records separated by blank lines; the first line of a
block is "meta<TAB><id>[<TAB><label>]"; every following line is
"<token><TAB><lang_tag>" with lang_tag in {Hin, Eng, O, EMT} (any case).
"""

import json
import re
from collections import Counter
from dataclasses import dataclass, asdict, fields
from importlib import resources

LANG_TAGS = ("HIN", "ENG", "O", "EMT")
LABELS = ("positive", "negative", "neutral")
PAD, UNK = 0, 1

_REPEAT_RE = re.compile(r"(.)\1{2,}")


class ConllParseError(ValueError):
    """Malformed block in strict mode; message carries the line number."""


def _load_table(name):
    with resources.files("hcms.data").joinpath(name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


EMOJI_MAP = _load_table("emoji_map.json")
CONTRACTIONS = _load_table("contractions.json")


@dataclass
class TweetRecord:
    id: str
    tokens: list
    lang_tags: list
    label: str = None


@dataclass
class CleaningConfig:
    lowercase: bool = True
    expand_contractions: bool = True
    replace_emoji: bool = True
    collapse_repeats: bool = True
    strip_hashtags: bool = True
    strip_usernames: bool = True
    strip_links: bool = True
    hashtag_keep_word: bool = True
    append_lang_onehot: bool = False

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


# ---------------------------------------------------------------------------
# parsing / serialization

def _parse_block(block_lines, start_line, lenient):
    first = block_lines[0].split("\t")
    if len(first) < 2 or len(first) > 3 or first[0].strip().lower() != "meta":
        raise ConllParseError(f"line {start_line}: expected meta line, got {block_lines[0]!r}")
    tweet_id, label = first[1].strip(), None
    if len(first) == 3:
        label = first[2].strip().lower()
        if label not in LABELS:
            # lenient mode tolerates swapped id/label fields
            if lenient and tweet_id.lower() in LABELS:
                tweet_id, label = label, tweet_id.lower()
            else:
                raise ConllParseError(
                    f"line {start_line}: unknown sentiment label {first[2]!r}")
    tokens, tags = [], []
    for off, line in enumerate(block_lines[1:], start=1):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ConllParseError(
                f"line {start_line + off}: expected token<TAB>tag, got {line!r}")
        tag = parts[1].strip().upper()
        if tag not in LANG_TAGS:
            raise ConllParseError(f"line {start_line + off}: unknown language tag {parts[1]!r}")
        tokens.append(parts[0])
        tags.append(tag)
    if not tokens:
        raise ConllParseError(f"line {start_line}: block has no token lines")
    return TweetRecord(id=tweet_id, tokens=tokens, lang_tags=tags, label=label)


def parse_conll(text, strict=False, lenient_meta=True):
    """Parse CONLL text into records.

    Returns (records, skipped) where skipped is a list of
    {"line": int, "reason": str} entries for malformed blocks. In strict
    mode the first malformed block raises ConllParseError instead.
    """
    if hasattr(text, "read"):
        text = text.read()
    records, skipped = [], []
    block, block_start = [], None
    lines = text.split("\n")
    for lineno, raw in enumerate(lines + [""], start=1):
        line = raw.rstrip("\r")
        if line.strip() == "":
            if block:
                try:
                    records.append(_parse_block(block, block_start, lenient_meta))
                except ConllParseError as exc:
                    if strict:
                        raise
                    skipped.append({"line": block_start, "reason": str(exc)})
                block, block_start = [], None
            continue
        if block_start is None:
            block_start = lineno
        block.append(line)
    return records, skipped


def serialize_conll(records):
    out = []
    for rec in records:
        meta = f"meta\t{rec.id}"
        if rec.label is not None:
            meta += f"\t{rec.label}"
        out.append(meta)
        out.extend(f"{tok}\t{tag}" for tok, tag in zip(rec.tokens, rec.lang_tags))
        out.append("")
    return "\n".join(out) + "\n" if out else ""


def read_conll_file(path, strict=False):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_conll(fh, strict=strict)


# ---------------------------------------------------------------------------
# cleaning

def _strip_token(token, cfg):
    """Apply link/username/hashtag strips until the token is stable.

    Iterating to a fixpoint keeps cleaning idempotent for pathological
    tokens like "#@user".
    """
    while True:
        if cfg.strip_links and token.startswith(("http://", "https://", "www.")):
            return None
        if cfg.strip_usernames and token.startswith("@"):
            return None
        if cfg.strip_hashtags and token.startswith("#"):
            if not cfg.hashtag_keep_word:
                return None
            stripped = token.lstrip("#")
            if stripped == token:
                return token
            token = stripped
            if not token:
                return None
            continue
        return token


def _lookup(table, token):
    if token in table:
        return table[token]
    return table.get(token.lower())


def clean(record, cfg: CleaningConfig):
    """Apply the enabled cleaning steps in their fixed order.

    Order: lowercase, link strip, username strip, hashtag strip, emoji
    replace, contraction expand, repeat collapse. Returns a new record,
    or None when no tokens survive.
    """
    tokens, tags = [], []
    for tok, tag in zip(record.tokens, record.lang_tags):
        if cfg.lowercase:
            tok = tok.lower()
        tok = _strip_token(tok, cfg)
        if tok is None:
            continue
        pieces = [tok]
        if cfg.replace_emoji:
            repl = _lookup(EMOJI_MAP, tok)
            if repl is not None:
                pieces = list(repl)
        if cfg.expand_contractions:
            expanded = []
            for piece in pieces:
                repl = _lookup(CONTRACTIONS, piece)
                expanded.extend(repl if repl is not None else [piece])
            pieces = expanded
        if cfg.collapse_repeats:
            pieces = [_REPEAT_RE.sub(r"\1\1", p) for p in pieces]
        tokens.extend(pieces)
        tags.extend([tag] * len(pieces))
    if not tokens:
        return None
    return TweetRecord(id=record.id, tokens=tokens, lang_tags=tags, label=record.label)


def clean_corpus(records, cfg: CleaningConfig):
    """Clean every record; returns (cleaned_records, dropped_count)."""
    cleaned, dropped = [], 0
    for rec in records:
        out = clean(rec, cfg)
        if out is None:
            dropped += 1
        else:
            cleaned.append(out)
    return cleaned, dropped


# ---------------------------------------------------------------------------
# vocabulary / encoding

class Vocabulary:
    """token <-> index map; index 0 is PAD, 1 is UNK."""

    def __init__(self, tokens):
        self.index_to_token = ["<pad>", "<unk>"] + list(tokens)
        self.token_to_index = {t: i for i, t in enumerate(self.index_to_token)}

    def __len__(self):
        return len(self.index_to_token)

    def lookup(self, token):
        return self.token_to_index.get(token, UNK)

    @classmethod
    def from_tokens(cls, tokens):
        """Rebuild from a serialized index->token list (reserved rows included)."""
        vocab = cls.__new__(cls)
        vocab.index_to_token = list(tokens)
        vocab.token_to_index = {t: i for i, t in enumerate(tokens)}
        return vocab


def build_vocab(records, min_count=1):
    counts = Counter(tok for rec in records for tok in rec.tokens)
    kept = [t for t, c in counts.items() if c >= min_count]
    # descending frequency, lexicographic tie-break
    kept.sort(key=lambda t: (-counts[t], t))
    return Vocabulary(kept)


def encode(record, vocab, cfg: CleaningConfig):
    """Returns (ids, lang_onehot or None) for an already-cleaned record."""
    ids = [vocab.lookup(t) for t in record.tokens]
    onehot = None
    if cfg.append_lang_onehot:
        onehot = [[1.0 if tag == lt else 0.0 for lt in LANG_TAGS]
                  for tag in record.lang_tags]
    return ids, onehot


def encode_corpus(records, vocab, cfg, label_map=None):
    """Encode records into (ids, lang, label_index) triples for training."""
    label_map = label_map or {lbl: i for i, lbl in enumerate(LABELS)}
    out = []
    for rec in records:
        ids, onehot = encode(rec, vocab, cfg)
        label = label_map[rec.label] if rec.label is not None else None
        out.append((ids, onehot, label))
    return out


# ---------------------------------------------------------------------------
# corpus statistics

def corpus_stats(records):
    sentiment = Counter(rec.label for rec in records if rec.label is not None)
    language = Counter(tag for rec in records for tag in rec.lang_tags)
    n_labeled = sum(sentiment.values())
    n_tokens = sum(language.values())
    return {
        "n_records": len(records),
        "n_tokens": n_tokens,
        "sentiment": {
            lbl: {"count": sentiment.get(lbl, 0),
                  "percent": 100.0 * sentiment.get(lbl, 0) / n_labeled if n_labeled else 0.0}
            for lbl in LABELS},
        "language": {
            tag: {"count": language.get(tag, 0),
                  "percent": 100.0 * language.get(tag, 0) / n_tokens if n_tokens else 0.0}
            for tag in LANG_TAGS},
    }


def format_stats(stats):
    lines = [f"records: {stats['n_records']}", f"tokens: {stats['n_tokens']}",
             "", "sentiment distribution:"]
    for lbl, d in stats["sentiment"].items():
        lines.append(f"  {lbl:<10} {d['count']:>7} ({d['percent']:6.2f}%)")
    lines.append("")
    lines.append("language distribution:")
    for tag, d in stats["language"].items():
        lines.append(f"  {tag:<10} {d['count']:>7} ({d['percent']:6.2f}%)")
    return "\n".join(lines)


def format_stats_kv(stats):
    pairs = [("n_records", stats["n_records"]), ("n_tokens", stats["n_tokens"])]
    for lbl, d in stats["sentiment"].items():
        pairs.append((f"sentiment_{lbl}_count", d["count"]))
        pairs.append((f"sentiment_{lbl}_percent", d["percent"]))
    for tag, d in stats["language"].items():
        pairs.append((f"language_{tag}_count", d["count"]))
        pairs.append((f"language_{tag}_percent", d["percent"]))
    return "\n".join(f"{k} = {v}" for k, v in pairs)
