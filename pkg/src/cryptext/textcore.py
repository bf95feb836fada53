"""Tokenization, visual canonicalization, phonetic encoding, and edit distance.

This is the kernel every other module builds on.  The customized encoding
fixes the first k+1 characters of a token verbatim (the "phonetic level"),
maps leetspeak/homoglyph symbols back to the letters they imitate before
encoding, and appends classical consonant digit codes.
"""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConfigError, EmptyTokenError

__all__ = [
    "EncoderConfig",
    "SoundexKey",
    "TokenSpan",
    "canonicalize",
    "config_hash",
    "default_config",
    "encode",
    "fnv1a64",
    "levenshtein",
    "load_encoder_config",
    "replace_spans",
    "tokenize",
    "within_distance",
]

# Symbol -> the letter it imitates.  Inverse of the substitutions people
# actually write ('a'->'@', 'l'->'1', ...).
DEFAULT_VISUAL_MAP: Mapping[str, str] = {
    "1": "l",
    "!": "i",
    "|": "l",
    "0": "o",
    "@": "a",
    "4": "a",
    "$": "s",
    "5": "s",
    "3": "e",
    "7": "t",
    "8": "b",
    "+": "t",
}

# Classical consonant grouping; letters absent here are separators.
DEFAULT_DIGIT_GROUPS: Mapping[str, str] = {
    "bfpv": "1",
    "cgjkqsxz": "2",
    "dt": "3",
    "l": "4",
    "mn": "5",
    "r": "6",
}

DEFAULT_SKIP_LETTERS = "aeiouhwy"
DEFAULT_STRIP_CHARS = "-'._"

_ASCII_LOWER = set("abcdefghijklmnopqrstuvwxyz")
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash, used for checksums and config fingerprints."""
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & _MASK64
    return h


@dataclass(frozen=True)
class EncoderConfig:
    """Immutable rule set for canonicalization and phonetic encoding.

    ``digit_groups`` maps each consonant letter to its digit code;
    ``skip_set`` letters encode as separators.  Together they must cover
    every lowercase ASCII letter exactly once.
    """

    visual_map: Mapping[str, str]
    digit_groups: Mapping[str, str]
    skip_set: frozenset[str]
    strip_chars: frozenset[str]
    min_digits: int = 3

    def __post_init__(self) -> None:
        if self.min_digits < 0:
            raise ConfigError("min_digits must be >= 0")
        for src, dst in self.visual_map.items():
            if len(src) != 1 or len(dst) != 1:
                raise ConfigError(f"visual_map entries must be single characters: {src!r}={dst!r}")
            if not (dst.isalpha() and dst == dst.lower()):
                raise ConfigError(f"visual_map target must be a lowercase letter: {src!r}={dst!r}")
            if dst in self.visual_map:
                raise ConfigError(f"visual_map target {dst!r} is also a source; map must be idempotent")
        grouped = set(self.digit_groups)
        if not grouped.isdisjoint(self.skip_set):
            both = sorted(grouped & self.skip_set)
            raise ConfigError(f"letters in both digit_groups and skip set: {''.join(both)}")
        covered = grouped | self.skip_set
        if covered != _ASCII_LOWER:
            missing = sorted(_ASCII_LOWER - covered)
            extra = sorted(covered - _ASCII_LOWER)
            raise ConfigError(
                "digit_groups and skip set must partition a-z"
                f" (missing: {''.join(missing) or '-'}, foreign: {''.join(extra) or '-'})"
            )
        for letter, digit in self.digit_groups.items():
            if digit not in "123456789":
                raise ConfigError(f"digit code for {letter!r} must be 1-9, got {digit!r}")


def _expand_groups(groups: Mapping[str, str]) -> dict[str, str]:
    expanded: dict[str, str] = {}
    for letters, digit in groups.items():
        for letter in letters:
            expanded[letter] = digit
    return expanded


_DEFAULT_CONFIG: EncoderConfig | None = None


def default_config() -> EncoderConfig:
    """The built-in encoder rules (shared immutable instance)."""
    global _DEFAULT_CONFIG
    if _DEFAULT_CONFIG is None:
        _DEFAULT_CONFIG = EncoderConfig(
            visual_map=dict(DEFAULT_VISUAL_MAP),
            digit_groups=_expand_groups(DEFAULT_DIGIT_GROUPS),
            skip_set=frozenset(DEFAULT_SKIP_LETTERS),
            strip_chars=frozenset(DEFAULT_STRIP_CHARS),
        )
    return _DEFAULT_CONFIG


def _canonical_config_text(config: EncoderConfig) -> str:
    lines = ["[visual_map]"]
    lines += [f"{src}={dst}" for src, dst in sorted(config.visual_map.items())]
    lines.append("[digit_groups]")
    lines += [f"{letter}={digit}" for letter, digit in sorted(config.digit_groups.items())]
    lines.append("[skip]")
    lines.append("".join(sorted(config.skip_set)))
    lines.append("[strip]")
    lines.append("".join(sorted(config.strip_chars)))
    lines.append(f"min_digits={config.min_digits}")
    return "\n".join(lines)


def config_hash(config: EncoderConfig) -> str:
    """16-hex fingerprint of an encoder config, stored in artifact headers."""
    return f"{fnv1a64(_canonical_config_text(config).encode('utf-8')):016x}"


def load_encoder_config(path: str | Path) -> EncoderConfig:
    """Parse an encoder config file.

    Plain UTF-8 text with '#' comments and four sections: ``[visual_map]``
    (lines ``src=dst``), ``[digit_groups]`` (lines ``letters=digit``),
    ``[skip]`` and ``[strip]`` (lines of characters).
    """
    visual_map: dict[str, str] = {}
    digit_groups: dict[str, str] = {}
    skip: set[str] = set()
    strip: set[str] = set()
    section = None
    for lineno, raw_line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("visual_map", "digit_groups", "skip", "strip"):
                raise ConfigError(f"{path}:{lineno}: unknown section [{section}]")
            continue
        if section == "visual_map":
            src, sep, dst = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected src=dst")
            visual_map[src.strip()] = dst.strip()
        elif section == "digit_groups":
            letters, sep, digit = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected letters=digit")
            for letter in letters.strip():
                digit_groups[letter] = digit.strip()
        elif section == "skip":
            skip.update(line)
        elif section == "strip":
            strip.update(line)
        else:
            raise ConfigError(f"{path}:{lineno}: content before any section header")
    return EncoderConfig(
        visual_map=visual_map,
        digit_groups=digit_groups,
        skip_set=frozenset(skip),
        strip_chars=frozenset(strip),
    )


@dataclass(frozen=True)
class TokenSpan:
    """One token of a source text, addressed by UTF-8 byte offsets."""

    raw: str
    start: int
    end: int
    is_word: bool


@dataclass(frozen=True)
class SoundexKey:
    """Phonetic encoding at level ``level``: k+1 literal prefix characters
    followed by at least ``min_digits`` digit codes."""

    level: int
    text: str


def _ascii_base(ch: str) -> str | None:
    # 'é' -> 'e'; returns None when no ASCII letter hides inside.
    for part in unicodedata.normalize("NFKD", ch):
        if part.isascii() and part.isalpha():
            return part.lower()
    return None


def canonicalize(raw: str, config: EncoderConfig | None = None) -> str:
    """Lowercase, undo visual substitutions, drop intra-token join characters.

    Accented letters reduce to their base ASCII letter when one exists.
    The result is a fixed point: re-applying never changes it.
    """
    config = config or default_config()
    out: list[str] = []
    for ch in raw.lower():
        if not ch.isascii() and ch.isalpha():
            base = _ascii_base(ch)
            if base is not None:
                ch = base
        ch = config.visual_map.get(ch, ch)
        if ch in config.strip_chars:
            continue
        out.append(ch)
    return "".join(out)


def _collapse_runs(s: str) -> str:
    out: list[str] = []
    for ch in s:
        if not out or out[-1] != ch:
            out.append(ch)
    return "".join(out)


def encode(raw: str, k: int, config: EncoderConfig | None = None) -> SoundexKey:
    """Encode a token at phonetic level ``k``.

    The first k+1 characters of the (repeat-collapsed) canonical form are
    kept verbatim, uppercased, zero-padded when the token is short.  The
    rest map to consonant digit codes: adjacent equal codes collapse,
    separators drop out, and the digit string is zero-padded to
    ``min_digits`` but never truncated.

    Raises EmptyTokenError when canonicalization leaves no letters.
    """
    if k < 0:
        raise ConfigError(f"phonetic level must be >= 0, got {k}")
    config = config or default_config()
    canon = canonicalize(raw, config)
    if not any(ch.isalpha() for ch in canon):
        raise EmptyTokenError(f"token {raw!r} has no letters after canonicalization")
    # Collapse repeated characters first so a repeat inside the literal
    # prefix ("tthe", "ddirty") cannot split a bucket.
    canon = _collapse_runs(canon)
    prefix = canon[: k + 1].upper().ljust(k + 1, "0")
    digits: list[str] = []
    for ch in canon[k + 1 :]:
        code = config.digit_groups.get(ch, "0")
        if not digits or digits[-1] != code:
            digits.append(code)
    digit_text = "".join(d for d in digits if d != "0").ljust(config.min_digits, "0")
    return SoundexKey(level=k, text=prefix + digit_text)


def _is_token_char(ch: str, config: EncoderConfig) -> bool:
    return ch.isalnum() or ch in config.visual_map or ch in "-'"


def tokenize(text: str, config: EncoderConfig | None = None) -> list[TokenSpan]:
    """Split text into token spans.

    A token is a maximal run of letters, digits, and perturbation symbols
    (visual-map sources plus hyphen and apostrophe); leading and trailing
    non-alphanumeric characters are shaved off each run.  Gaps plus raw
    spans reconstruct the input byte-for-byte.
    """
    config = config or default_config()
    spans: list[TokenSpan] = []
    run: list[tuple[str, int]] = []  # (char, byte offset)
    byte_pos = 0

    def flush() -> None:
        if not run:
            return
        lo, hi = 0, len(run)
        while lo < hi and not run[lo][0].isalnum():
            lo += 1
        while hi > lo and not run[hi - 1][0].isalnum():
            hi -= 1
        if lo == hi:
            run.clear()
            return
        raw = "".join(ch for ch, _ in run[lo:hi])
        start = run[lo][1]
        end = run[hi - 1][1] + len(run[hi - 1][0].encode("utf-8"))
        is_word = any(ch.isalpha() for ch in canonicalize(raw, config))
        spans.append(TokenSpan(raw=raw, start=start, end=end, is_word=is_word))
        run.clear()

    for ch in text:
        if _is_token_char(ch, config):
            run.append((ch, byte_pos))
        else:
            flush()
        byte_pos += len(ch.encode("utf-8"))
    flush()
    return spans


def replace_spans(text: str, edits: Iterable[tuple[TokenSpan, str]]) -> str:
    """Splice replacement strings over spans, leaving all other bytes intact."""
    data = bytearray(text.encode("utf-8"))
    for span, replacement in sorted(edits, key=lambda e: e[0].start, reverse=True):
        data[span.start : span.end] = replacement.encode("utf-8")
    return data.decode("utf-8")


def levenshtein(a: str, b: str) -> int:
    """Minimal number of single-character edits turning ``a`` into ``b``."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[-1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def within_distance(a: str, b: str, d: int) -> bool:
    """True iff levenshtein(a, b) <= d, computed on a width-(2d+1) band.

    Rows whose band minimum exceeds ``d`` terminate early; a length gap
    beyond ``d`` returns False without touching the table.
    """
    if d < 0:
        raise ConfigError(f"distance bound must be >= 0, got {d}")
    la, lb = len(a), len(b)
    if abs(la - lb) > d:
        return False
    if d == 0 or la == 0 or lb == 0:
        return a == b or max(la, lb) <= d
    cap = d + 1
    prev = [j if j <= d else cap for j in range(lb + 1)]
    for i in range(1, la + 1):
        cur = [cap] * (lb + 1)
        if i <= d:
            cur[0] = i
        lo = max(1, i - d)
        hi = min(lb, i + d)
        best = cur[0] if lo == 1 else cap
        for j in range(lo, hi + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            v = min(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1)
            if v > cap:
                v = cap
            cur[j] = v
            if v < best:
                best = v
        if best > d:
            return False
        prev = cur
    return prev[lb] <= d
