"""Aggregate strategy labels into distribution tables, cross-tabulations,
per-hearer views and agreement patterns; score predictions against gold."""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Optional, Sequence

import networkx as nx

from .corpus import LABEL_ORDER, Incongruity, StrategyLabel

PATTERNS = ((5,), (4, 1), (3, 2), (3, 1, 1), (2, 2, 1), (2, 1, 1, 1), (1, 1, 1, 1, 1))
NO_LABEL = "None"


def round_half_up(x: Optional[float], digits: int = 1) -> Optional[float]:
    if x is None:
        return None
    q = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


def _fmt(x):
    return "-" if x is None else f"{round_half_up(x):.1f}"


def _labels_of(ss):
    return ss.labels if hasattr(ss, "labels") else frozenset(ss)


def _by_id(strategy_sets):
    if isinstance(strategy_sets, Mapping):
        return dict(strategy_sets)
    return {ss.pair_id: ss for ss in strategy_sets}


@dataclass
class DistributionTable:
    counts: dict  # StrategyLabel -> int
    percentages: dict  # StrategyLabel -> float, or None when the denominator is zero
    total: int
    dataset_tag: str = ""
    denominator: str = "instances"
    n_pairs: int = 0

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset_tag,
            "denominator": self.denominator,
            "n_pairs": self.n_pairs,
            "total": self.total,
            "rows": [{"label": l.value, "count": self.counts[l],
                      "percent": round_half_up(self.percentages[l]),
                      "percent_exact": self.percentages[l]} for l in LABEL_ORDER],
        }

    def to_text(self) -> str:
        lines = [f"{'strategy':<18}{'count':>7}{'%':>7}   [{self.dataset_tag}]"]
        for l in LABEL_ORDER:
            lines.append(f"{l.value:<18}{self.counts[l]:>7}{_fmt(self.percentages[l]):>7}")
        lines.append(f"{'total':<18}{self.total:>7}")
        return "\n".join(lines)


def strategy_distribution(strategy_sets, dataset_tag: str = "", denominator: str = "instances") -> DistributionTable:
    """Strategy counts and shares; with ``denominator="pairs"`` shares are per labelled pair."""
    if denominator not in ("instances", "pairs"):
        raise ValueError(f"unknown denominator {denominator!r}")
    counts = Counter()
    n_pairs = labelled = 0
    for ss in strategy_sets:
        labels = _labels_of(ss)
        n_pairs += 1
        labelled += bool(labels)
        counts.update(labels)
    total = sum(counts.values()) if denominator == "instances" else labelled
    pct = {l: (100.0 * counts[l] / total if total else None) for l in LABEL_ORDER}
    return DistributionTable({l: counts[l] for l in LABEL_ORDER}, pct, sum(counts.values()),
                             dataset_tag, denominator, n_pairs)


@dataclass
class CrossTab:
    conditions: tuple
    counts: dict  # condition -> {label: int}
    percentages: dict  # condition -> {label: float}
    kind: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "conditions": list(self.conditions),
            "columns": {c: {"total": sum(self.counts[c].values()),
                            "rows": {l.value: {"count": self.counts[c][l],
                                               "percent": round_half_up(self.percentages[c][l]),
                                               "percent_exact": self.percentages[c][l]}
                                     for l in LABEL_ORDER}}
                        for c in self.conditions},
        }

    def to_text(self) -> str:
        if not self.conditions:
            return f"no pairs with a known {self.kind} condition"
        head = f"{'strategy':<18}" + "".join(f"{c:>10}" for c in self.conditions)
        lines = [head]
        for l in LABEL_ORDER:
            lines.append(f"{l.value:<18}" + "".join(f"{_fmt(self.percentages[c][l]):>10}" for c in self.conditions))
        return "\n".join(lines)


def _crosstab(items, order, kind) -> CrossTab:
    counts = defaultdict(Counter)
    for cond, labels in items:
        counts[cond].update(labels)
    conditions = tuple(c for c in order if sum(counts[c].values()) > 0)
    pct = {}
    for c in conditions:
        total = sum(counts[c].values())
        pct[c] = {l: 100.0 * counts[c][l] / total for l in LABEL_ORDER}
    return CrossTab(conditions, {c: {l: counts[c][l] for l in LABEL_ORDER} for c in conditions}, pct, kind)


def incongruity_crosstab(strategy_sets, corpus) -> CrossTab:
    """Shares of strategy instances per gold incongruity type; pairs without gold type are left out."""
    sets = _by_id(strategy_sets)
    items = []
    for p in corpus:
        ss = sets.get(p.pair_id)
        if ss is None or p.gold is None or p.gold.incongruity == Incongruity.Unknown:
            continue
        items.append((p.gold.incongruity.value, _labels_of(ss)))
    return _crosstab(items, ("Explicit", "Implicit"), "incongruity")


def marker_crosstab(strategy_sets, corpus, marker_sets: Mapping) -> CrossTab:
    """Shares of strategy instances split by whether the ironic message carries a marker.

    ``marker_sets`` maps utterance id to ``MarkerSet``.
    """
    sets = _by_id(strategy_sets)
    items = []
    for p in corpus:
        ss, ms = sets.get(p.pair_id), marker_sets.get(p.s_im.id)
        if ss is None or ms is None:
            continue
        items.append(("Marker+" if ms.any_marker else "Marker-", _labels_of(ss)))
    return _crosstab(items, ("Marker+", "Marker-"), "markers")


@dataclass
class PerHearerResult:
    hearers: tuple
    shared_messages: int
    tables: dict  # hearer_id -> DistributionTable
    note: str = ""

    def to_dict(self) -> dict:
        return {"hearers": list(self.hearers), "shared_messages": self.shared_messages,
                "note": self.note, "tables": {h: t.to_dict() for h, t in self.tables.items()}}

    def to_text(self) -> str:
        if not self.tables:
            return self.note
        return "\n\n".join(f"hearer {h} ({self.shared_messages} shared messages)\n{t.to_text()}"
                           for h, t in self.tables.items())


def per_hearer_distribution(strategy_sets, corpus, min_shared: int = 500) -> PerHearerResult:
    """Distributions for the largest hearer group whose message sets pairwise share ``min_shared`` messages.

    The distribution of each hearer is computed on the messages all group members rephrased.
    """
    sets = _by_id(strategy_sets)
    msgs = defaultdict(set)
    by_key = {}
    for p in corpus:
        if not p.hearer_id or p.pair_id not in sets:
            continue
        msgs[p.hearer_id].add(p.message_key)
        by_key.setdefault((p.hearer_id, p.message_key), sets[p.pair_id])
    g = nx.Graph()
    g.add_nodes_from(msgs)
    for a, b in itertools.combinations(sorted(msgs), 2):
        if len(msgs[a] & msgs[b]) >= min_shared:
            g.add_edge(a, b)
    cliques = [sorted(c) for c in nx.find_cliques(g) if len(c) >= 2]
    if not cliques:
        return PerHearerResult((), 0, {}, f"fewer than 2 hearers share at least {min_shared} messages pairwise")
    best = min(cliques, key=lambda c: (-len(c), c))
    shared = set.intersection(*(msgs[h] for h in best))
    tables = {h: strategy_distribution([by_key[(h, m)] for m in sorted(shared)], f"hearer {h}") for h in best}
    return PerHearerResult(tuple(best), len(shared), tables)


def primary_label(labels) -> Optional[StrategyLabel]:
    for l in LABEL_ORDER:
        if l in labels:
            return l
    return None


def agreement_pattern(labels: Sequence) -> tuple:
    return tuple(sorted(Counter(labels).values(), reverse=True))


@dataclass
class AgreementHistogram:
    counts: dict  # pattern tuple -> int
    shares: dict  # pattern tuple -> float or None
    n_messages: int
    n_excluded: int

    @staticmethod
    def key(pattern) -> str:
        return "{" + ",".join(str(x) for x in pattern) + "}"

    def to_dict(self) -> dict:
        return {"n_messages": self.n_messages, "n_excluded": self.n_excluded,
                "patterns": [{"pattern": self.key(p), "count": self.counts[p],
                              "percent": round_half_up(self.shares[p]),
                              "percent_exact": self.shares[p]} for p in PATTERNS]}

    def to_text(self) -> str:
        lines = [f"{'pattern':<14}{'count':>7}{'%':>7}"]
        for p in PATTERNS:
            lines.append(f"{self.key(p):<14}{self.counts[p]:>7}{_fmt(self.shares[p]):>7}")
        lines.append(f"{self.n_messages} messages with 5 interpretations, {self.n_excluded} excluded")
        return "\n".join(lines)


def agreement_histogram(strategy_sets, corpus, group_size: int = 5) -> AgreementHistogram:
    """How the five interpretations of each message split over primary strategies.

    Pairs without any label form their own group.
    """
    sets = _by_id(strategy_sets)
    groups = defaultdict(list)
    for p in corpus:
        if p.pair_id in sets:
            groups[p.message_key].append(primary_label(_labels_of(sets[p.pair_id])) or NO_LABEL)
    counts = Counter()
    excluded = 0
    for labels in groups.values():
        if len(labels) != group_size:
            excluded += 1
            continue
        counts[agreement_pattern(labels)] += 1
    n = sum(counts.values())
    return AgreementHistogram({p: counts[p] for p in PATTERNS},
                              {p: (100.0 * counts[p] / n if n else None) for p in PATTERNS}, n, excluded)


@dataclass(frozen=True)
class KappaResult:
    p_o: float
    p_e: float
    kappa: float
    n: int

    def to_dict(self):
        return {"p_o": self.p_o, "p_e": self.p_e, "kappa": self.kappa, "n": self.n}


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> KappaResult:
    a, b = list(labels_a), list(labels_b)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("need at least one rated item")
    n = len(a)
    p_o = sum(x == y for x, y in zip(a, b)) / n
    ca, cb = Counter(a), Counter(b)
    p_e = sum(ca[c] * cb[c] for c in ca) / (n * n)
    if p_o == 1.0:
        kappa = 1.0
    elif p_e == 1.0:
        kappa = 0.0  # unreachable unless p_o == 1
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)
    return KappaResult(p_o, p_e, kappa, n)


@dataclass
class LabelScore:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self):
        return 100.0 * self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self):
        return 100.0 * self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self):
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def to_dict(self):
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "precision": round_half_up(self.precision),
                "recall": round_half_up(self.recall), "f1": round_half_up(self.f1)}


@dataclass
class EvalReport:
    per_label: dict  # StrategyLabel -> LabelScore
    micro: LabelScore
    macro: dict = field(default_factory=dict)  # precision/recall/f1 averaged over labels present in gold or predictions
    n_pairs: int = 0

    def to_dict(self) -> dict:
        return {"n_pairs": self.n_pairs,
                "labels": {l.value: s.to_dict() for l, s in self.per_label.items()},
                "micro": self.micro.to_dict(),
                "macro": {k: round_half_up(v) for k, v in self.macro.items()}}

    def to_text(self) -> str:
        lines = [f"{'strategy':<18}{'P':>7}{'R':>7}{'F1':>7}"]
        for l, s in self.per_label.items():
            lines.append(f"{l.value:<18}{_fmt(s.precision):>7}{_fmt(s.recall):>7}{_fmt(s.f1):>7}")
        m = self.micro
        lines.append(f"{'micro':<18}{_fmt(m.precision):>7}{_fmt(m.recall):>7}{_fmt(m.f1):>7}")
        lines.append(f"{'macro':<18}" + "".join(f"{_fmt(self.macro[k]):>7}" for k in ("precision", "recall", "f1")))
        return "\n".join(lines)


def evaluate(predicted, gold: Mapping) -> EvalReport:
    """Per-label precision/recall/F1 over the pairs in ``gold`` (pair_id -> label set)."""
    if not gold:
        raise ValueError("no gold-annotated pairs to evaluate")
    pred = _by_id(predicted)
    scores = {l: LabelScore() for l in LABEL_ORDER}
    for pid, g in gold.items():
        g = frozenset(g)
        p = _labels_of(pred[pid]) if pid in pred else frozenset()
        for l in LABEL_ORDER:
            if l in p and l in g:
                scores[l].tp += 1
            elif l in p:
                scores[l].fp += 1
            elif l in g:
                scores[l].fn += 1
    present = {l: s for l, s in scores.items() if s.tp + s.fp + s.fn}
    micro = LabelScore(sum(s.tp for s in present.values()), sum(s.fp for s in present.values()),
                       sum(s.fn for s in present.values()))
    k = len(present)
    macro = {name: (sum(getattr(s, name) for s in present.values()) / k if k else 0.0)
             for name in ("precision", "recall", "f1")}
    return EvalReport(present, micro, macro, len(gold))
