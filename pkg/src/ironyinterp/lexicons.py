"""Lexical resources: antonym pairs, sentiment strength, intensifiers, negation markers.

Formats (UTF-8, ``#`` starts a comment line):

* antonyms: ``lemma_a <TAB> lemma_b [<TAB> POS]``
* sentiment strength: ``lemma <TAB> raw_score``; scores are rescaled to [0, 1] per file
* intensifiers: ``lemma <TAB> POS`` with POS ``ADJ`` or ``ADV``
* negation markers: one surface form per line

A bundle is described by a TOML config with keys ``antonym_sources`` (list of
``{path, tag}`` tables or plain paths), ``sentiment_source``,
``intensifier_source``, ``negation_source`` and optional ``extra_intensifiers``.
"""
from __future__ import annotations

import logging
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import FormatError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

INTENSIFIER_POS = ("ADJ", "ADV")


def _data_lines(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read resource ({exc.strerror})", path) from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


@dataclass(frozen=True)
class AntonymLexicon:
    """Unordered lemma pairs; each pair remembers which sources listed it."""

    entries: dict = field(default_factory=dict)  # frozenset({a, b}) -> (frozenset(tags), pos or None)

    def __contains__(self, pair):
        return frozenset(pair) in self.entries

    def __len__(self):
        return len(self.entries)

    def sources(self, a, b) -> frozenset:
        hit = self.entries.get(frozenset((a, b)))
        return hit[0] if hit else frozenset()

    def pairs(self):
        for key in self.entries:
            a, b = sorted(key)
            yield a, b


@dataclass(frozen=True)
class SentimentStrengthLexicon:
    values: dict = field(default_factory=dict)

    def get(self, lemma) -> Optional[float]:
        return self.values.get(lemma)


@dataclass(frozen=True)
class LexiconBundle:
    antonyms: AntonymLexicon
    sentiment: SentimentStrengthLexicon
    intensifiers: frozenset  # of (lemma, POS)
    negation_markers: tuple
    source_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_neg_set", frozenset(self.negation_markers))
        index = {}
        for a, b in self.antonyms.pairs():
            index.setdefault(a, set()).add(b)
            index.setdefault(b, set()).add(a)
        object.__setattr__(self, "_ant_index", {k: frozenset(v) for k, v in index.items()})

    def antonyms_of(self, lemma) -> frozenset:
        return self._ant_index.get(lemma, frozenset())


def read_antonyms(path, tag, entries=None, counts=None):
    entries = {} if entries is None else entries
    n = 0
    for lineno, line in _data_lines(path):
        cells = line.split("\t")
        if len(cells) not in (2, 3):
            raise FormatError(f"expected 2 or 3 tab-separated fields, got {len(cells)}", path, lineno)
        a, b = cells[0].strip().lower(), cells[1].strip().lower()
        pos = cells[2].strip().upper() if len(cells) == 3 and cells[2].strip() else None
        if not a or not b:
            raise FormatError("empty lemma", path, lineno)
        if a == b:
            log.warning("%s:%d: self-pair %r skipped", path, lineno, a)
            continue
        key = frozenset((a, b))
        tags, old_pos = entries.get(key, (frozenset(), pos))
        if old_pos != pos:
            pos = None  # conflicting restrictions: keep the pair unrestricted
        entries[key] = (tags | {tag}, pos)
        n += 1
    if counts is not None:
        counts[tag] = counts.get(tag, 0) + n
    return entries


def read_sentiment(path) -> SentimentStrengthLexicon:
    raw = {}
    for lineno, line in _data_lines(path):
        cells = line.split("\t")
        if len(cells) != 2:
            raise FormatError(f"expected 2 tab-separated fields, got {len(cells)}", path, lineno)
        try:
            raw[cells[0].strip().lower()] = float(cells[1])
        except ValueError:
            raise FormatError(f"bad score {cells[1]!r}", path, lineno) from None
    return SentimentStrengthLexicon(normalize_scores(raw))


def normalize_scores(raw: dict) -> dict:
    """Affine rescaling of raw scores onto [0, 1]."""
    if not raw:
        return {}
    lo, hi = min(raw.values()), max(raw.values())
    if hi == lo:
        return {k: 0.5 for k in raw}
    return {k: (v - lo) / (hi - lo) for k, v in raw.items()}


def read_intensifiers(path) -> set:
    out = set()
    for lineno, line in _data_lines(path):
        cells = line.split("\t")
        if len(cells) != 2:
            raise FormatError(f"expected 2 tab-separated fields, got {len(cells)}", path, lineno)
        lemma, pos = cells[0].strip().lower(), cells[1].strip().upper()
        if pos not in INTENSIFIER_POS:
            log.warning("%s:%d: intensifier %r with POS %s skipped", path, lineno, lemma, pos)
            continue
        out.add((lemma, pos))
    return out


def read_negation_markers(path) -> tuple:
    out = []
    for lineno, line in _data_lines(path):
        form = line.lower()
        if form in out:
            log.warning("%s:%d: duplicate negation marker %r skipped", path, lineno, form)
            continue
        out.append(form)
    if not out:
        raise FormatError("negation marker list is empty", path)
    return tuple(out)


def default_config_path() -> Path:
    return Path(str(resources.files("ironyinterp") / "data" / "lexicons.toml"))


def load_lexicons(config=None) -> LexiconBundle:
    """Build a bundle from a TOML config path (or dict); bundled defaults when None."""
    base = Path(".")
    if config is None:
        config = default_config_path()
    if not isinstance(config, dict):
        path = Path(config)
        try:
            with open(path, "rb") as fh:
                config = tomllib.load(fh)
        except OSError as exc:
            raise FormatError(f"cannot read config ({exc.strerror})", path) from None
        except tomllib.TOMLDecodeError as exc:
            raise FormatError(f"invalid TOML ({exc})", path) from None
        base = path.parent

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    entries, counts = {}, {}
    for src in config.get("antonym_sources", []):
        if isinstance(src, str):
            path, tag = resolve(src), Path(src).stem
        else:
            path, tag = resolve(src["path"]), src.get("tag") or Path(src["path"]).stem
        read_antonyms(path, tag, entries, counts)

    sentiment = SentimentStrengthLexicon()
    if config.get("sentiment_source"):
        sentiment = read_sentiment(resolve(config["sentiment_source"]))
        counts["sentiment"] = len(sentiment.values)

    intens = set()
    if config.get("intensifier_source"):
        intens = read_intensifiers(resolve(config["intensifier_source"]))
    for lemma, pos in config.get("extra_intensifiers", []):
        if pos.upper() in INTENSIFIER_POS:
            intens.add((lemma.lower(), pos.upper()))
    counts["intensifiers"] = len(intens)

    if not config.get("negation_source"):
        raise FormatError("config has no negation_source")
    negs = read_negation_markers(resolve(config["negation_source"]))
    counts["negation"] = len(negs)

    return LexiconBundle(AntonymLexicon(entries), sentiment, frozenset(intens), negs, counts)


def is_antonym(a: str, b: str, bundle: LexiconBundle, pos: Optional[str] = None) -> bool:
    hit = bundle.antonyms.entries.get(frozenset((a, b)))
    if hit is None or a == b:
        return False
    restrict = hit[1]
    return restrict is None or pos is None or restrict == pos


def sentiment_strength(lemma: str, bundle: LexiconBundle) -> Optional[float]:
    return bundle.sentiment.get(lemma)


def is_intensifier(lemma: str, pos: str, bundle: LexiconBundle) -> bool:
    return (lemma.lower(), (pos or "").upper()) in bundle.intensifiers


def _strip_apostrophes(s):
    return s.replace("'", "").replace("’", "")


def is_negation_marker(surface: str, bundle: LexiconBundle) -> bool:
    s = surface.lower().replace("’", "'")
    if s in bundle._neg_set or _strip_apostrophes(s) in bundle._neg_set:
        return True
    # unsplit contractions ("hadn't") carry the clitic
    return len(s) > 3 and s.endswith("n't") and "n't" in bundle._neg_set
