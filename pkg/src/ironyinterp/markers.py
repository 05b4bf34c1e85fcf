"""Rule-based irony markers (typographic and morpho-syntactic) on ironic messages.

The inventory lives in a JSON rule file so it can be swapped without code
changes; the bundled one is a reconstruction of the usual typographic /
morpho-syntactic split.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

from .corpus import Incongruity, Utterance

TYPOGRAPHIC = ("Emoticon", "Emoji", "Hashtag", "MultiPunct", "AllCaps", "Quotation")
MORPHOSYNTACTIC = ("Interjection", "TagQuestion")


@dataclass(frozen=True)
class MarkerHit:
    kind: str
    start: int  # character offsets into the text
    end: int
    text: str


@dataclass(frozen=True)
class MarkerSet:
    utterance_id: str
    typographic: frozenset = frozenset()
    morphosyntactic: frozenset = frozenset()
    hits: tuple = ()
    report_only: frozenset = frozenset()

    @property
    def any_marker(self) -> bool:
        return bool(self.typographic or self.morphosyntactic)

    def to_dict(self) -> dict:
        return {
            "utterance_id": self.utterance_id,
            "typographic": sorted(self.typographic),
            "morphosyntactic": sorted(self.morphosyntactic),
            "report_only": sorted(self.report_only),
            "any_marker": self.any_marker,
            "hits": [{"kind": h.kind, "start": h.start, "end": h.end, "text": h.text} for h in self.hits],
        }

    @classmethod
    def from_dict(cls, d) -> "MarkerSet":
        hits = tuple(MarkerHit(h["kind"], h["start"], h["end"], h["text"]) for h in d.get("hits", []))
        return cls(d["utterance_id"], frozenset(d.get("typographic", ())),
                   frozenset(d.get("morphosyntactic", ())), hits, frozenset(d.get("report_only", ())))


@dataclass(frozen=True)
class MarkerRules:
    typographic: dict
    interjections: frozenset
    tag_questions: tuple
    excluded_hashtags: frozenset
    report_only: dict = field(default_factory=dict)


def load_marker_rules(path=None) -> MarkerRules:
    if path is None:
        path = Path(str(resources.files("ironyinterp") / "data" / "marker_rules.json"))
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    typo = {k: tuple(re.compile(p) for p in raw["typographic"].get(k, ())) for k in TYPOGRAPHIC}
    morpho = raw.get("morphosyntactic", {})
    return MarkerRules(
        typographic=typo,
        interjections=frozenset(w.lower() for w in morpho.get("Interjection", ())),
        tag_questions=tuple(re.compile(p, re.IGNORECASE) for p in morpho.get("TagQuestion", ())),
        excluded_hashtags=frozenset(h.lower() for h in raw.get("excluded_hashtags", ())),
        report_only={k: tuple(re.compile(p) for p in v) for k, v in raw.get("report_only", {}).items()},
    )


@lru_cache(maxsize=1)
def default_rules() -> MarkerRules:
    return load_marker_rules()


def _word_spans(text):
    for m in re.finditer(r"[A-Za-z']+", text):
        yield m.start(), m.end(), m.group(0)


def detect_markers(message: Utterance, tree=None, rules: Optional[MarkerRules] = None) -> MarkerSet:
    rules = rules or default_rules()
    text = message.text
    hits = []
    for kind, patterns in rules.typographic.items():
        for pat in patterns:
            for m in pat.finditer(text):
                if kind == "Hashtag" and m.group(0).lower() in rules.excluded_hashtags:
                    continue
                hits.append(MarkerHit(kind, m.start(), m.end(), m.group(0)))
    words = _word_spans(text)
    for start, end, w in words:
        if w.lower() in rules.interjections:
            hits.append(MarkerHit("Interjection", start, end, w))
    if tree is not None:
        covered = {h.text.lower() for h in hits if h.kind == "Interjection"}
        for tok in tree.tokens:
            if tok.upos == "INTJ" and tok.lemma in rules.interjections and tok.surface.lower() not in covered:
                pos = text.lower().find(tok.surface.lower())
                hits.append(MarkerHit("Interjection", max(pos, 0), max(pos, 0) + len(tok.surface), tok.surface))
    for pat in rules.tag_questions:
        for m in pat.finditer(text):
            hits.append(MarkerHit("TagQuestion", m.start(), m.end(), m.group(0)))
    other = set()
    for kind, patterns in rules.report_only.items():
        for pat in patterns:
            if pat.search(text):
                other.add(kind)
    hits.sort(key=lambda h: (h.start, h.kind))
    kinds = {h.kind for h in hits}
    return MarkerSet(
        message.id,
        frozenset(k for k in kinds if k in TYPOGRAPHIC),
        frozenset(k for k in kinds if k in MORPHOSYNTACTIC),
        tuple(hits),
        frozenset(other),
    )


@dataclass
class MarkerPrevalence:
    explicit: Optional[float]  # percent of explicit-incongruity pairs whose message has a marker
    implicit: Optional[float]
    n_explicit: int = 0
    n_implicit: int = 0
    n_unknown: int = 0

    def to_dict(self):
        return dict(self.__dict__)


def marker_prevalence(corpus, markers: Optional[Mapping] = None, include_invalid: bool = False) -> MarkerPrevalence:
    """Share of pairs carrying a marker in the ironic message, per gold incongruity type.

    ``markers`` maps utterance id to ``MarkerSet``; missing entries are detected on the fly.
    """
    hits = {Incongruity.Explicit: 0, Incongruity.Implicit: 0}
    totals = {Incongruity.Explicit: 0, Incongruity.Implicit: 0}
    unknown = 0
    for p in corpus:
        if not include_invalid and not p.valid:
            continue
        inc = p.gold.incongruity if p.gold else Incongruity.Unknown
        if inc == Incongruity.Unknown:
            unknown += 1
            continue
        ms = (markers or {}).get(p.s_im.id) or detect_markers(p.s_im)
        totals[inc] += 1
        hits[inc] += ms.any_marker

    def share(inc):
        return 100.0 * hits[inc] / totals[inc] if totals[inc] else None

    return MarkerPrevalence(share(Incongruity.Explicit), share(Incongruity.Implicit),
                            totals[Incongruity.Explicit], totals[Incongruity.Implicit], unknown)
