"""Map external tokens (words, characters or bytes) to dense integer codes."""
import csv
import io
import json
from pathlib import Path

SCHEMA = "altmark/1"
TOKEN_MODES = ("auto", "tokens", "chars", "bytes")


def split_tokens(data, mode="auto"):
    """Split raw input into tokens.

    ``tokens`` splits on whitespace; ``chars`` takes every non-whitespace
    character; ``bytes`` takes every byte; ``auto`` splits on whitespace and
    falls back to characters when that yields a single token, so a file
    holding ``committee`` reads as nine symbols.
    """
    if mode not in TOKEN_MODES:
        raise ValueError(f"unknown token mode {mode!r}")
    if mode == "bytes":
        if isinstance(data, str):
            data = data.encode("utf-8")
        return list(data)
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if mode == "chars":
        return [ch for ch in data if not ch.isspace()]
    words = data.split()
    if mode == "auto" and len(words) == 1:
        return list(words[0])
    return words


def read_tokens(path, mode="auto"):
    raw = Path(path).read_bytes()
    return split_tokens(raw if mode == "bytes" else raw.decode("utf-8"), mode)


class Codec:
    """Bijection between tokens and codes ``0..m-1`` in first-appearance order."""

    def __init__(self, symbols=()):
        self.symbols = []
        self.index = {}
        for s in symbols:
            self.add(s)

    def add(self, token):
        if token not in self.index:
            self.index[token] = len(self.symbols)
            self.symbols.append(token)
        return self.index[token]

    def encode(self, tokens):
        return [self.add(t) for t in tokens]

    def decode(self, codes):
        return [self.symbols[c] for c in codes]

    def __len__(self):
        return len(self.symbols)


def integer_codes(tokens):
    """Tokens as their own integer codes when all are non-negative ints, else None."""
    try:
        codes = [int(t) for t in tokens]
    except (TypeError, ValueError):
        return None
    if any(c < 0 for c in codes):
        return None
    return codes


def write_tokens(path, codes):
    Path(path).write_text(" ".join(str(int(c)) for c in codes) + "\n")


def json_line(obj):
    out = {"schema": SCHEMA}
    out.update(obj)
    return json.dumps(out, sort_keys=False, default=_default)


def _default(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    return str(obj)


def csv_text(rows, columns):
    """CSV with a leading ``# schema: ...`` comment line."""
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_value(row[k]) for k in columns})
    return buf.getvalue()


def _csv_value(x):
    if isinstance(x, float):
        return repr(x)
    return x
