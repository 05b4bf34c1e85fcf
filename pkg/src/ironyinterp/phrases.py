"""Phrase-pair extraction from word alignments, relative-frequency scoring and
the filters that keep phrase pairs likely to be semantic opposites."""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import group_by_message, utterance_tokens


@dataclass(frozen=True)
class PhrasePair:
    e: str
    f: str
    count: float
    phi_f_given_e: float
    phi_e_given_f: float


def extract_phrases(src: Sequence[str], tgt: Sequence[str], alignment, max_phrase_len: int = 4) -> set:
    """Alignment-consistent phrase pairs as ``((i1, i2), (j1, j2))`` 1-based inclusive spans.

    A pair is emitted when it contains at least one link, no link leaves it, and
    the first and last word on each side is aligned (no unaligned-word padding).
    """
    links = sorted(alignment)
    by_src = defaultdict(list)
    for i, j in links:
        by_src[i].append(j)
    I = len(src)
    out = set()
    for i1 in range(1, I + 1):
        if i1 not in by_src:
            continue
        for i2 in range(i1, min(I, i1 + max_phrase_len - 1) + 1):
            if i2 not in by_src:
                continue
            js = [j for i in range(i1, i2 + 1) for j in by_src.get(i, ())]
            j1, j2 = min(js), max(js)
            if j2 - j1 + 1 > max_phrase_len:
                continue
            if any(j1 <= j <= j2 and not i1 <= i <= i2 for i, j in links):
                continue
            out.add(((i1, i2), (j1, j2)))
    return out


def phrase_strings(src, tgt, spans) -> list:
    return [(" ".join(src[i1 - 1:i2]), " ".join(tgt[j1 - 1:j2])) for (i1, i2), (j1, j2) in sorted(spans)]


class PhraseTable:
    """Phrase pairs with joint counts and relative-frequency scores in both directions."""

    def __init__(self, pairs: Iterable[PhrasePair] = ()):
        self.pairs = {(p.e, p.f): p for p in pairs}

    @classmethod
    def from_counts(cls, counts) -> "PhraseTable":
        counts = Counter(counts)
        c_e, c_f = Counter(), Counter()
        for (e, f), c in counts.items():
            c_e[e] += c
            c_f[f] += c
        return cls(PhrasePair(e, f, c, c / c_e[e], c / c_f[f]) for (e, f), c in counts.items())

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, key):
        return key in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs.values(), key=lambda p: (p.e, p.f)))

    def f_set(self, e) -> set:
        return {f for (e2, f) in self.pairs if e2 == e}

    def to_tsv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for p in self:
                fh.write(f"{p.e}\t{p.f}\t{p.count:g}\t{p.phi_f_given_e:.9f}\t{p.phi_e_given_f:.9f}\n")

    @classmethod
    def from_tsv(cls, path) -> "PhraseTable":
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                cells = line.rstrip("\n").split("\t")
                if len(cells) != 5:
                    raise ValueError(f"{path}:{lineno}: expected 5 tab-separated fields")
                pairs.append(PhrasePair(cells[0], cells[1], float(cells[2]), float(cells[3]), float(cells[4])))
        return cls(pairs)


def phrase_table(bitext, aligner, max_phrase_len: int = 4) -> PhraseTable:
    counts = Counter()
    for src, tgt in bitext:
        spans = extract_phrases(src, tgt, aligner.align(src, tgt), max_phrase_len)
        counts.update(phrase_strings(src, tgt, spans))
    return PhraseTable.from_counts(counts)


def score_and_filter(st_phrases: PhraseTable, hh_phrases: PhraseTable) -> PhraseTable:
    """Drop pairs also seen between interpretations, then pairs with ``phi(f|e) < 1/|f_set(e)|``.

    ``f_set(e)`` is taken over the pairs that survive the first step; ``phi`` keeps
    the scores of ``st_phrases``.
    """
    kept = [p for p in st_phrases if (p.e, p.f) not in hh_phrases]
    f_sets = defaultdict(set)
    for p in kept:
        f_sets[p.e].add(p.f)
    return PhraseTable(p for p in kept if not p.phi_f_given_e < 1.0 / len(f_sets[p.e]))


def hh_bitext(corpus, trees=None) -> list:
    """Every unordered pair of interpretations of the same message, in both directions."""
    out = []
    for members in group_by_message(p for p in corpus if p.valid).values():
        toks = [utterance_tokens(p.h_int, trees) for p in members]
        for a, b in itertools.combinations(range(len(toks)), 2):
            out.append((toks[a], toks[b]))
            out.append((toks[b], toks[a]))
    return out


def st_bitext(corpus, trees=None) -> list:
    return [(utterance_tokens(p.s_im, trees), utterance_tokens(p.h_int, trees))
            for p in corpus if p.valid]


def find_subsequence(tokens, phrase) -> int:
    """1-based start of the first occurrence of ``phrase`` in ``tokens``, or 0."""
    n = len(phrase)
    for k in range(len(tokens) - n + 1):
        if list(tokens[k:k + n]) == list(phrase):
            return k + 1
    return 0
