"""Detectors for the six interpretation strategies and the cascade combining them.

Every detector returns ``StrategyEvidence`` items.  Combined strategies
(weakening, interrogative-to-declarative, desiderative) consume the antonym or
negation evidence they build on, so a pair never reports both a combined label
and the base label drawn from the same evidence.
"""
from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from .corpus import LABEL_ORDER, DependencyTree, IronyPair, StrategyLabel, Token, fallback_tokens
from .lexicons import LexiconBundle, is_antonym, is_intensifier, is_negation_marker, sentiment_strength
from .phrases import PhraseTable

log = logging.getLogger(__name__)

L = StrategyLabel


class Method(enum.Enum):
    AlignedAntonym = "AlignedAntonym"
    DependencyAntonym = "DependencyAntonym"
    FallbackAntonym = "FallbackAntonym"
    NegationScope = "NegationScope"
    WeakenNeutralize = "WeakenNeutralize"
    WeakenDropIntensifier = "WeakenDropIntensifier"
    RqTransform = "RqTransform"
    DesiderativePattern = "DesiderativePattern"
    OppositePhrase = "OppositePhrase"


@dataclass(frozen=True)
class StrategyEvidence:
    label: StrategyLabel
    method: Method
    s_span: Optional[tuple] = None  # 1-based inclusive token range in the ironic message
    h_span: Optional[tuple] = None  # same, in the interpretation
    trigger: tuple = ()  # lemmas that fired the rule
    s_sentence: Optional[int] = None
    h_sentence: Optional[int] = None
    consumed: bool = False
    consumes: tuple = ()  # indices of the evidence items this one absorbed

    def to_dict(self) -> dict:
        return {
            "label": self.label.value,
            "method": self.method.value,
            "s_span": list(self.s_span) if self.s_span else None,
            "h_span": list(self.h_span) if self.h_span else None,
            "trigger": list(self.trigger),
            "s_sentence": self.s_sentence,
            "h_sentence": self.h_sentence,
            "consumed": self.consumed,
            "consumes": list(self.consumes),
        }

    @classmethod
    def from_dict(cls, d) -> "StrategyEvidence":
        return cls(L(d["label"]), Method(d["method"]),
                   tuple(d["s_span"]) if d.get("s_span") else None,
                   tuple(d["h_span"]) if d.get("h_span") else None,
                   tuple(d.get("trigger", ())), d.get("s_sentence"), d.get("h_sentence"),
                   bool(d.get("consumed", False)), tuple(d.get("consumes", ())))


@dataclass(frozen=True)
class StrategySet:
    pair_id: str
    labels: frozenset
    evidence: tuple = ()
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "labels": [l.value for l in LABEL_ORDER if l in self.labels],
            "evidence": [e.to_dict() for e in self.evidence],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d) -> "StrategySet":
        return cls(d["pair_id"], frozenset(L(x) for x in d.get("labels", ())),
                   tuple(StrategyEvidence.from_dict(e) for e in d.get("evidence", ())),
                   tuple(d.get("notes", ())))


# ---------------------------------------------------------------------------
# Utterance views


@dataclass(frozen=True)
class View:
    """Token sequence of one utterance; ``tree`` is None when only fallback tokens exist."""

    tokens: tuple
    tree: Optional[DependencyTree]

    @property
    def lemmas(self):
        return [t.lemma for t in self.tokens]

    def parent(self, index) -> Optional[Token]:
        return self.tree.parent(index) if self.tree else None

    def children(self, index) -> list:
        return self.tree.children(index) if self.tree else []

    def is_root(self, index) -> bool:
        return bool(self.tree) and index in self.tree.root_indices


def make_view(utt, trees: Optional[Mapping] = None) -> View:
    tree = trees.get(utt.id) if trees else None
    if tree is not None:
        return View(tree.tokens, tree)
    toks, sent = [], 0
    for k, s in enumerate(fallback_tokens(utt.text), start=1):
        toks.append(Token(k, s, s.lower(), "X", 0, "_", sent))
        if s in (".", "!", "?"):
            sent += 1
    return View(tuple(toks), None)


def _neg_positions(view: View, lexicons) -> list:
    return [t.index for t in view.tokens if is_negation_marker(t.surface, lexicons)]


def _negation_scopes(view: View, other: View, lexicons):
    """Negation markers of a side whose counterpart has none: ``(marker, negated token)`` pairs."""
    if not _neg_positions(view, lexicons) or _neg_positions(other, lexicons):
        return []
    out = []
    for m in _neg_positions(view, lexicons):
        head = view.parent(m)
        if head is not None:
            out.append((m, head))
    return out


_FUNCTION_DEPRELS = {"punct", "det", "case", "cc", "cop", "aux", "aux:pass", "mark", "expl"}


def _content_children(view, index):
    return {c.lemma for c in view.children(index) if c.deprel not in _FUNCTION_DEPRELS}


def _intensifiers_of(view, index, lexicons):
    return [c for c in view.children(index) if is_intensifier(c.lemma, c.upos, lexicons)]


# ---------------------------------------------------------------------------
# Detectors


def detect_lexical_antonym(pair: IronyPair, alignment, trees, lexicons: LexiconBundle,
                           s_view: View = None, h_view: View = None) -> list:
    """Lexicon antonyms across the pair, tried by alignment, then dependency role, then plain co-occurrence.

    The interpretation-side word must not already occur in the message, otherwise
    the pair is not a replacement (e.g. a copied sentence).
    """
    s = s_view or make_view(pair.s_im, trees)
    h = h_view or make_view(pair.h_int, trees)
    s_lemmas = set(s.lemmas)
    links = set(alignment or ())
    candidates = []
    for tj in h.tokens:
        if tj.lemma in s_lemmas:
            continue
        for ti in s.tokens:
            if is_antonym(ti.lemma, tj.lemma, lexicons):
                candidates.append((ti, tj))
    if not candidates:
        return []

    def dependency_match(ti, tj):
        if s.tree is None or h.tree is None:
            return False
        if s.is_root(ti.index) and h.is_root(tj.index):
            return True
        ps, ph = s.parent(ti.index), h.parent(tj.index)
        if ps is not None and ph is not None and ps.lemma == ph.lemma:
            return True
        return bool(_content_children(s, ti.index) & _content_children(h, tj.index))

    found = []
    for method, test in ((Method.AlignedAntonym, lambda ti, tj: (ti.index, tj.index) in links),
                         (Method.DependencyAntonym, dependency_match)):
        used_h = {e[2].index for e in found}
        for ti, tj in candidates:
            if tj.index not in used_h and test(ti, tj):
                found.append((method, ti, tj))
                used_h.add(tj.index)
    if not found:
        used_h = set()
        for ti, tj in sorted(candidates, key=lambda c: (c[1].index, abs(c[0].index - c[1].index))):
            if tj.index not in used_h:
                found.append((Method.FallbackAntonym, ti, tj))
                used_h.add(tj.index)
    return [StrategyEvidence(L.LexAnt, m, (ti.index, ti.index), (tj.index, tj.index),
                             (ti.lemma, tj.lemma), ti.sentence, tj.sentence)
            for m, ti, tj in found]


def detect_simple_negation(pair: IronyPair, trees, lexicons: LexiconBundle,
                           s_view: View = None, h_view: View = None, report: list = None) -> list:
    """A negation marker on exactly one side whose dependency parent also occurs on the other side."""
    s = s_view or make_view(pair.s_im, trees)
    h = h_view or make_view(pair.h_int, trees)
    out = []
    for neg, other, on_h in ((h, s, True), (s, h, False)):
        if not _neg_positions(neg, lexicons) or _neg_positions(other, lexicons):
            continue
        if neg.tree is None:
            if report is not None:
                report.append("negation: side with the marker has no parse; detector skipped")
            continue
        other_by_lemma = {}
        for t in other.tokens:
            other_by_lemma.setdefault(t.lemma, t)
        for m, head in _negation_scopes(neg, other, lexicons):
            match = other_by_lemma.get(head.lemma)
            if match is None:
                continue
            neg_span = (min(m, head.index), max(m, head.index))
            trig = (neg.tokens[m - 1].lemma, head.lemma)
            if on_h:
                out.append(StrategyEvidence(L.SimpleNeg, Method.NegationScope, (match.index, match.index),
                                            neg_span, trig, match.sentence, head.sentence))
            else:
                out.append(StrategyEvidence(L.SimpleNeg, Method.NegationScope, neg_span,
                                            (match.index, match.index), trig, head.sentence, match.sentence))
    return out


def _counterparts(j, s: View, h: View, links, lemma_hint=None, replaced_only=False):
    """Message tokens corresponding to interpretation token ``j``: aligned ones, else structural twins.

    With ``replaced_only`` a token whose lemma also occurs in the interpretation
    is not a counterpart (it was kept, not replaced).
    """
    h_lemmas = set(h.lemmas) if replaced_only else set()
    out = [s.tokens[i - 1] for i in sorted(i for i, jj in links if jj == j)
           if s.tokens[i - 1].lemma not in h_lemmas]
    if lemma_hint is not None:
        out += [t for t in s.tokens if t.lemma == lemma_hint and t not in out]
    if not out and h.is_root(j) and s.tree is not None:
        sent = h.tokens[j - 1].sentence
        out = [s.tokens[r - 1] for r in s.tree.root_indices
               if s.tokens[r - 1].sentence == sent and s.tokens[r - 1].lemma not in h_lemmas]
    return out


def detect_weaken_sentiment(pair: IronyPair, alignment, trees, lexicons: LexiconBundle, prior,
                            margin: float = 0.05, s_view: View = None, h_view: View = None):
    """Weakening of sentiment intensity.

    Returns ``(new_evidence, consumed_indices)`` where the indices point into ``prior``.
    """
    s = s_view or make_view(pair.s_im, trees)
    h = h_view or make_view(pair.h_int, trees)
    links = set(alignment or ())
    new, consumed = [], set()
    neg_ev = {ev.h_span: k for k, ev in enumerate(prior)
              if ev.label == L.SimpleNeg and not ev.consumed and ev.h_span}

    # 1: negated interpretation word aligned to a stronger, different message word
    for m, head in _negation_scopes(h, s, lexicons):
        h_strength = sentiment_strength(head.lemma, lexicons)
        if h_strength is None:
            continue
        for ti in _counterparts(head.index, s, h, links, replaced_only=True):
            if ti.lemma == head.lemma:
                continue
            s_strength = sentiment_strength(ti.lemma, lexicons)
            if s_strength is not None and s_strength - h_strength >= margin:
                span = (min(m, head.index), max(m, head.index))
                k = neg_ev.get(span)
                new.append(StrategyEvidence(L.AnWeakSent, Method.WeakenNeutralize, (ti.index, ti.index), span,
                                            (ti.lemma, head.lemma), ti.sentence, head.sentence,
                                            consumes=(k,) if k is not None else ()))
                if k is not None:
                    consumed.add(k)
                break

    # 2: an intensifier on the message side disappears
    if s.tree is not None and h.tree is not None:
        for k, ev in enumerate(prior):
            if ev.consumed or k in consumed:
                continue
            if ev.label == L.LexAnt:
                i, j = ev.s_span[0], ev.h_span[0]
                ints = _intensifiers_of(s, i, lexicons)
                if ints and not _intensifiers_of(h, j, lexicons):
                    new.append(StrategyEvidence(L.AnWeakSent, Method.WeakenDropIntensifier, ev.s_span, ev.h_span,
                                                (ints[0].lemma,) + ev.trigger, ev.s_sentence, ev.h_sentence,
                                                consumes=(k,)))
                    consumed.add(k)
            elif ev.label == L.SimpleNeg:
                # only interpretation-side negation; the negated word is the marker's parent
                negated = [t for t in h.tokens[ev.h_span[0] - 1:ev.h_span[1]]
                           if not is_negation_marker(t.surface, lexicons)]
                if not negated or not _neg_positions(h, lexicons):
                    continue
                head = negated[-1] if len(negated) == 1 else next(
                    (t for t in negated if t.lemma == ev.trigger[-1]), negated[-1])
                h_ints = {c.lemma for c in _intensifiers_of(h, head.index, lexicons)}
                for ti in _counterparts(head.index, s, h, links, lemma_hint=head.lemma):
                    ints = [c for c in _intensifiers_of(s, ti.index, lexicons) if c.lemma not in h_ints]
                    if ints:
                        new.append(StrategyEvidence(L.AnWeakSent, Method.WeakenDropIntensifier,
                                                    (min(ints[0].index, ti.index), max(ints[0].index, ti.index)),
                                                    ev.h_span, (ints[0].lemma,) + ev.trigger,
                                                    ti.sentence, ev.h_sentence, consumes=(k,)))
                        consumed.add(k)
                        break
    return new, consumed


def detect_interrog_to_decl(pair: IronyPair, rq_model, prior, lexicons: LexiconBundle = None,
                            embeddings=None, s_view: View = None):
    """Rhetorical question answered by a declarative antonym or negation.

    Returns ``(new_evidence, consumed_indices)``.
    """
    from .rq import RQ, predict_rq

    if "?" not in pair.s_im.text or "?" in pair.h_int.text or rq_model is None:
        return [], set()
    base = [k for k, ev in enumerate(prior) if not ev.consumed and ev.label in (L.LexAnt, L.SimpleNeg)]
    if not base:
        return [], set()
    label, _ = predict_rq(rq_model, pair.s_im, lexicons, embeddings)
    if label != RQ:
        return [], set()
    q_sentences = None
    if s_view is not None and s_view.tree is not None:
        q_sentences = {t.sentence for t in s_view.tokens if "?" in t.surface}
    new, consumed = [], set()
    for k in base:
        ev = prior[k]
        if q_sentences is not None and ev.s_sentence is not None and ev.s_sentence not in q_sentences:
            continue
        new.append(StrategyEvidence(L.AnInterrogToDecl, Method.RqTransform, ev.s_span, ev.h_span,
                                    ev.trigger, ev.s_sentence, ev.h_sentence, consumes=(k,)))
        consumed.add(k)
    return new, consumed


_WORD = re.compile(r"[^\W_](?:[\w'’-]*[^\W_])?|[^\w\s]+")


def desiderative_match(text: str, max_gap: int = 2):
    """Token offsets ``(i_index, wish_index)`` (0-based) of the first ``I ... wish`` match, or None."""
    toks = _WORD.findall(text)
    low = [t.lower() for t in toks]
    for a, t in enumerate(low):
        if t != "i":
            continue
        for gap in range(0, max_gap + 1):
            b = a + 1 + gap
            if b >= len(low):
                break
            between = low[a + 1:b]
            if any(not w[0].isalnum() for w in between):
                break
            if low[b] == "wish":
                return a, b
    return None


def detect_desiderative(pair: IronyPair, max_gap: int = 2) -> list:
    """``I`` followed by up to ``max_gap`` words and then ``wish`` in the interpretation."""
    hit = desiderative_match(pair.h_int.text, max_gap)
    if hit is None:
        return []
    return [StrategyEvidence(L.AnDesiderative, Method.DesiderativePattern, None, (hit[0] + 1, hit[1] + 1),
                             ("i", "wish"))]


def _ngrams(tokens, max_n):
    out = {}
    for n in range(1, max_n + 1):
        for k in range(len(tokens) - n + 1):
            out.setdefault(" ".join(tokens[k:k + n]), k + 1)
    return out


class OppositeIndex:
    """Phrase table indexed by source phrase for n-gram lookup."""

    def __init__(self, table: Optional[PhraseTable]):
        self.by_e = {}
        self.max_n = 0
        for p in (table or ()):
            if p.e == p.f:
                continue
            self.by_e.setdefault(p.e, []).append(p)
            self.max_n = max(self.max_n, len(p.e.split()), len(p.f.split()))

    def __bool__(self):
        return bool(self.by_e)


def detect_phrasal_pragmatic(pair: IronyPair, opposite_table, prior=(), trees=None,
                             s_view: View = None, h_view: View = None) -> list:
    """Last resort: an opposite phrase pair whose sides occur in message and interpretation."""
    if any(not ev.consumed for ev in prior):
        return []
    index = opposite_table if isinstance(opposite_table, OppositeIndex) else OppositeIndex(opposite_table)
    if not index:
        return []
    s = s_view or make_view(pair.s_im, trees)
    h = h_view or make_view(pair.h_int, trees)
    s_grams = _ngrams(s.lemmas, index.max_n)
    h_grams = _ngrams(h.lemmas, index.max_n)
    for e in sorted(s_grams):
        for p in index.by_e.get(e, ()):
            if p.f in h_grams and p.f not in s_grams:
                i, j = s_grams[e], h_grams[p.f]
                return [StrategyEvidence(L.AntPhrasePragInf, Method.OppositePhrase,
                                         (i, i + len(e.split()) - 1), (j, j + len(p.f.split()) - 1),
                                         (e, p.f), s.tokens[i - 1].sentence, h.tokens[j - 1].sentence)]
    return []


# ---------------------------------------------------------------------------
# Cascade


@dataclass
class Resources:
    lexicons: LexiconBundle
    trees: Mapping = field(default_factory=dict)
    aligner: object = None  # anything with .align(src_tokens, tgt_tokens)
    alignments: Mapping = field(default_factory=dict)  # pair_id -> links, overrides the aligner
    rq_model: object = None
    opposite_table: Optional[PhraseTable] = None
    embeddings: Optional[dict] = None
    weaken_margin: float = 0.05
    max_wish_gap: int = 2

    def __post_init__(self):
        self._opposite_index = OppositeIndex(self.opposite_table)

    def alignment_for(self, pair, s: View, h: View):
        if pair.pair_id in self.alignments:
            return self.alignments[pair.pair_id]
        if self.aligner is not None:
            return self.aligner.align(s.lemmas, h.lemmas)
        return None


def _apply_consumption(evidence, consumed):
    return [replace(ev, consumed=True) if k in consumed else ev for k, ev in enumerate(evidence)]


def _wish_complement_consumption(evidence, h: View):
    """Antonym/negation evidence inside the complement of ``I ... wish`` is part of the desiderative."""
    hit = None
    for k, t in enumerate(h.tokens):
        if t.lemma == "wish" or t.surface.lower() == "wish":
            before = [x.surface.lower() for x in h.tokens[max(0, k - 3):k]]
            if "i" in before:
                hit = t
                break
    if hit is None:
        return set()
    return {k for k, ev in enumerate(evidence)
            if not ev.consumed and ev.label in (L.LexAnt, L.SimpleNeg) and ev.h_span
            and ev.h_span[0] > hit.index and h.tokens[ev.h_span[0] - 1].sentence == hit.sentence}


def classify_pair(pair: IronyPair, resources: Resources) -> StrategySet:
    """Run the detectors in cascade order and keep labels backed by unconsumed evidence."""
    lex = resources.lexicons
    notes = []
    s = make_view(pair.s_im, resources.trees)
    h = make_view(pair.h_int, resources.trees)
    if s.tree is None or h.tree is None:
        notes.append("unparsed utterance: dependency-based sub-methods disabled")
    links = resources.alignment_for(pair, s, h)
    if links is None:
        notes.append("no alignment available")

    evidence = detect_lexical_antonym(pair, links, resources.trees, lex, s, h)
    evidence += detect_simple_negation(pair, resources.trees, lex, s, h, report=notes)

    new, consumed = detect_weaken_sentiment(pair, links, resources.trees, lex, evidence,
                                            resources.weaken_margin, s, h)
    evidence = _apply_consumption(evidence, consumed) + new

    if resources.rq_model is None and "?" in pair.s_im.text:
        notes.append("no rhetorical-question model")
    new, consumed = detect_interrog_to_decl(pair, resources.rq_model, evidence, lex, resources.embeddings, s)
    evidence = _apply_consumption(evidence, consumed) + new

    desid = detect_desiderative(pair, resources.max_wish_gap)
    if desid:
        consumed = _wish_complement_consumption(evidence, h)
        desid = [replace(desid[0], consumes=tuple(sorted(consumed)))]
        evidence = _apply_consumption(evidence, consumed) + desid

    if resources._opposite_index:
        evidence += detect_phrasal_pragmatic(pair, resources._opposite_index, evidence, None, s, h)

    labels = frozenset(ev.label for ev in evidence if not ev.consumed)
    return StrategySet(pair.pair_id, labels, tuple(evidence), tuple(notes))


def check_strategy_set(ss: StrategySet) -> None:
    """Raise ``InvariantError`` when a set breaks the double-counting or last-resort rules."""
    from .errors import InvariantError

    seen = set()
    for k, ev in enumerate(ss.evidence):
        for c in ev.consumes:
            if c in seen or c >= len(ss.evidence) or not ss.evidence[c].consumed:
                raise InvariantError(f"{ss.pair_id}: evidence {c} consumed inconsistently")
            seen.add(c)
    backed = {ev.label for ev in ss.evidence if not ev.consumed}
    if backed != set(ss.labels):
        raise InvariantError(f"{ss.pair_id}: labels not backed by unconsumed evidence")
    if L.AntPhrasePragInf in ss.labels and len(ss.labels) > 1:
        raise InvariantError(f"{ss.pair_id}: phrasal label co-reported with other labels")
