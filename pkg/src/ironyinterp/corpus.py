"""Parallel irony corpus: (ironic message, interpretation) pairs and their parses."""
from __future__ import annotations

import enum
import io
import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .errors import DuplicateIdError, FormatError, TreeError


class Role(enum.Enum):
    SpeakerIronic = "s"
    HearerInterpretation = "h"


class StrategyLabel(enum.Enum):
    LexAnt = "LexAnt"
    SimpleNeg = "SimpleNeg"
    AnWeakSent = "AnWeakSent"
    AnInterrogToDecl = "AnInterrogToDecl"
    AnDesiderative = "AnDesiderative"
    AntPhrasePragInf = "AntPhrasePragInf"


# Table order, also used as precedence for picking a single label per pair.
LABEL_ORDER = tuple(StrategyLabel)


class Incongruity(enum.Enum):
    Explicit = "Explicit"
    Implicit = "Implicit"
    Unknown = "Unknown"


@dataclass(frozen=True)
class Utterance:
    id: str
    text: str
    role: Role


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    lemma: str
    upos: str
    head: int
    deprel: str
    sentence: int = 0


@dataclass(frozen=True)
class DependencyTree:
    utterance_id: str
    tokens: tuple
    root_indices: tuple

    def __len__(self):
        return len(self.tokens)

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def parent(self, index: int) -> Optional[Token]:
        head = self.tokens[index - 1].head
        return None if head == 0 else self.tokens[head - 1]

    def children(self, index: int) -> list:
        return [t for t in self.tokens if t.head == index]

    def lemmas(self) -> list:
        return [t.lemma for t in self.tokens]


@dataclass(frozen=True)
class GoldAnnotation:
    strategies: frozenset = frozenset()
    incongruity: Incongruity = Incongruity.Unknown
    markers_present: Optional[bool] = None
    valid: bool = True


@dataclass(frozen=True)
class IronyPair:
    pair_id: str
    s_im: Utterance
    h_int: Utterance
    hearer_id: str
    gold: Optional[GoldAnnotation] = None
    message_id: Optional[str] = None

    @property
    def message_key(self) -> str:
        """Identifier of the ironic message; pairs rephrasing the same message share it."""
        if self.message_id:
            return self.message_id
        return " ".join(self.s_im.text.split())

    @property
    def valid(self) -> bool:
        return self.gold is None or self.gold.valid


def make_pair(pair_id, s_text, h_text, hearer_id="", gold=None, message_id=None) -> IronyPair:
    return IronyPair(
        pair_id=pair_id,
        s_im=Utterance(f"{pair_id}.s", s_text, Role.SpeakerIronic),
        h_int=Utterance(f"{pair_id}.h", h_text, Role.HearerInterpretation),
        hearer_id=hearer_id,
        gold=gold,
        message_id=message_id,
    )


# ---------------------------------------------------------------------------
# Pairs files

COLUMNS = ("pair_id", "hearer_id", "s_im_text", "h_int_text",
           "gold_strategies", "incongruity", "valid")
OPTIONAL_COLUMNS = ("message_id", "markers_present")

_TRUE = {"1", "true", "yes", "y", "t"}
_FALSE = {"0", "false", "no", "n", "f"}


def _parse_bool(value, path, line, name):
    if isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise FormatError(f"bad boolean {value!r} in column {name}", path, line)


def parse_labels(value, path=None, line=None) -> frozenset:
    if value is None:
        return frozenset()
    if isinstance(value, str):
        names = [v.strip() for v in value.split("|") if v.strip()]
    else:
        names = list(value)
    try:
        return frozenset(StrategyLabel(n) for n in names)
    except ValueError as exc:
        raise FormatError(f"unknown strategy label ({exc})", path, line) from None


def _record_to_pair(rec: Mapping, path, line) -> IronyPair:
    for name in ("pair_id", "s_im_text", "h_int_text"):
        value = rec.get(name)
        if value is None or not str(value).strip():
            raise FormatError(f"missing or empty {name}", path, line)
    strategies = rec.get("gold_strategies")
    incongruity = rec.get("incongruity")
    valid = rec.get("valid")
    markers = rec.get("markers_present")
    has_gold = any(v not in (None, "") and v != [] for v in (strategies, incongruity, valid, markers))
    gold = None
    if has_gold:
        try:
            inc = Incongruity(incongruity) if incongruity else Incongruity.Unknown
        except ValueError:
            raise FormatError(f"bad incongruity {incongruity!r}", path, line) from None
        gold = GoldAnnotation(
            strategies=parse_labels(strategies, path, line),
            incongruity=inc,
            markers_present=None if markers in (None, "") else _parse_bool(markers, path, line, "markers_present"),
            valid=True if valid in (None, "") else _parse_bool(valid, path, line, "valid"),
        )
    return make_pair(
        str(rec["pair_id"]).strip(),
        str(rec["s_im_text"]),
        str(rec["h_int_text"]),
        hearer_id=str(rec.get("hearer_id") or ""),
        gold=gold,
        message_id=(str(rec["message_id"]) if rec.get("message_id") else None),
    )


def _iter_tsv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    header = None
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        cells = raw.split("\t")
        if header is None and lineno == 1 and cells[0] == "pair_id":
            header = cells
            unknown = set(header) - set(COLUMNS) - set(OPTIONAL_COLUMNS)
            if unknown:
                raise FormatError(f"unknown columns {sorted(unknown)}", path, lineno)
            continue
        names = header or COLUMNS
        if header is None and len(cells) not in (4, 7):
            raise FormatError(f"expected 4 or 7 tab-separated fields, got {len(cells)}", path, lineno)
        if header is not None and len(cells) != len(header):
            raise FormatError(f"expected {len(header)} fields, got {len(cells)}", path, lineno)
        yield lineno, dict(zip(names, cells))


def _iter_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc.msg})", path, lineno) from None
            if not isinstance(rec, dict):
                raise FormatError("expected a JSON object", path, lineno)
            yield lineno, rec


def load_pairs(path, format: str = "TSV", flag_copies: bool = False) -> list:
    """Read a pairs file in file order.

    ``format`` is ``"TSV"`` or ``"JSONL"``.  With ``flag_copies`` set, pairs whose
    interpretation merely copies the message are marked invalid.
    """
    fmt = format.upper()
    if fmt == "TSV":
        records = _iter_tsv(path)
    elif fmt == "JSONL":
        records = _iter_jsonl(path)
    else:
        raise ValueError(f"unknown format {format!r}")
    pairs, seen = [], set()
    for lineno, rec in records:
        pair = _record_to_pair(rec, path, lineno)
        if pair.pair_id in seen:
            raise DuplicateIdError(f"duplicate pair_id {pair.pair_id!r}", path, lineno)
        seen.add(pair.pair_id)
        pairs.append(pair)
    if flag_copies:
        pairs = mark_copies_invalid(pairs)
    return pairs


def is_copy(pair: IronyPair) -> bool:
    return pair.s_im.text.strip().casefold() == pair.h_int.text.strip().casefold()


def mark_copies_invalid(pairs: Iterable[IronyPair]) -> list:
    """Return a new corpus where copied interpretations carry ``valid=False``."""
    out = []
    for p in pairs:
        if is_copy(p):
            gold = p.gold or GoldAnnotation()
            p = IronyPair(p.pair_id, p.s_im, p.h_int, p.hearer_id,
                          GoldAnnotation(gold.strategies, gold.incongruity, gold.markers_present, False),
                          p.message_id)
        out.append(p)
    return out


def _labels_str(labels) -> str:
    return "|".join(l.value for l in LABEL_ORDER if l in labels)


def pair_record(pair: IronyPair) -> dict:
    rec = {
        "pair_id": pair.pair_id,
        "hearer_id": pair.hearer_id,
        "s_im_text": pair.s_im.text,
        "h_int_text": pair.h_int.text,
        "gold_strategies": "",
        "incongruity": "",
        "valid": "",
    }
    if pair.gold is not None:
        rec["gold_strategies"] = _labels_str(pair.gold.strategies)
        rec["incongruity"] = pair.gold.incongruity.value
        rec["valid"] = "1" if pair.gold.valid else "0"
        if pair.gold.markers_present is not None:
            rec["markers_present"] = "1" if pair.gold.markers_present else "0"
    if pair.message_id:
        rec["message_id"] = pair.message_id
    return rec


def dump_pairs(pairs: Sequence[IronyPair], path, format: str = "TSV") -> None:
    records = [pair_record(p) for p in pairs]
    fmt = format.upper()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "JSONL":
            for rec in records:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            return
        extra = [c for c in OPTIONAL_COLUMNS if any(c in r for r in records)]
        header = list(COLUMNS) + extra
        fh.write("\t".join(header) + "\n")
        for rec in records:
            cells = [str(rec.get(c, "")) for c in header]
            if any("\t" in c or "\n" in c for c in cells):
                raise FormatError(f"pair {rec['pair_id']!r} contains a tab or newline")
            fh.write("\t".join(cells) + "\n")


def group_by_message(pairs: Iterable[IronyPair]) -> dict:
    groups = defaultdict(list)
    for p in pairs:
        groups[p.message_key].append(p)
    return dict(groups)


# ---------------------------------------------------------------------------
# Parses

_UTT_RE = re.compile(r"^#\s*utterance_id\s*=\s*(.+?)\s*$")


def _check_forest(utterance_id, heads, path=None, line=None):
    n = len(heads)
    for i, h in enumerate(heads, start=1):
        if h < 0 or h > n:
            raise TreeError(f"utterance {utterance_id}: token {i} has out-of-range head {h}", path, line)
    state = [0] * (n + 1)  # 0 unvisited, 1 on stack, 2 done
    for start in range(1, n + 1):
        chain, node = [], start
        while node != 0 and state[node] == 0:
            state[node] = 1
            chain.append(node)
            node = heads[node - 1]
        if node != 0 and state[node] == 1:
            raise TreeError(f"utterance {utterance_id}: cyclic head links through token {node}", path, line)
        for c in chain:
            state[c] = 2


def build_tree(utterance_id, sentences, path=None, line=None) -> DependencyTree:
    """Join per-sentence token rows into one tree with utterance-wide indices.

    ``sentences`` is a list of sentences, each a list of
    ``(surface, lemma, upos, head, deprel)`` with sentence-local heads.
    """
    tokens, roots, offset = [], [], 0
    for s_idx, rows in enumerate(sentences):
        heads = [r[3] for r in rows]
        _check_forest(utterance_id, heads, path, line)
        for i, (surface, lemma, upos, head, deprel) in enumerate(rows, start=1):
            lemma = (lemma if lemma and lemma != "_" else surface).lower()
            if not lemma:
                raise FormatError(f"utterance {utterance_id}: empty lemma at token {i}", path, line)
            g_head = 0 if head == 0 else head + offset
            if head == 0:
                roots.append(i + offset)
            tokens.append(Token(i + offset, surface, lemma, upos, g_head, deprel, s_idx))
        offset += len(rows)
    return DependencyTree(utterance_id, tuple(tokens), tuple(roots))


def parse_conllu(text: str, path=None) -> dict:
    blocks = defaultdict(list)
    order = []
    current_id, rows, start_line = None, [], None

    def flush():
        nonlocal rows
        if rows:
            if current_id is None:
                raise FormatError("sentence without '# utterance_id' comment", path, start_line)
            if current_id not in blocks:
                order.append(current_id)
            blocks[current_id].append((rows, start_line))
        rows = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush()
            current_id = None
            continue
        if line.startswith("#"):
            m = _UTT_RE.match(line)
            if m:
                flush()
                current_id = m.group(1)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise FormatError(f"expected 10 CoNLL-U columns, got {len(cols)}", path, lineno)
        tid = cols[0]
        if "-" in tid or "." in tid:
            continue  # multiword ranges and empty nodes
        if not rows:
            start_line = lineno
        try:
            idx, head = int(tid), int(cols[6])
        except ValueError:
            raise FormatError(f"non-integer ID or HEAD ({tid!r}, {cols[6]!r})", path, lineno) from None
        if idx != len(rows) + 1:
            raise FormatError(f"token ids not contiguous (got {idx}, expected {len(rows) + 1})", path, lineno)
        rows.append((cols[1], cols[2], cols[3], head, cols[7]))
    flush()
    trees = {}
    for uid in order:
        sentences = [r for r, _ in blocks[uid]]
        trees[uid] = build_tree(uid, sentences, path, blocks[uid][0][1])
    return trees


def load_parses(path) -> dict:
    """Map utterance id to its ``DependencyTree`` from a CoNLL-U file."""
    with open(path, encoding="utf-8") as fh:
        return parse_conllu(fh.read(), path)


def dump_parses(trees: Mapping[str, DependencyTree], path) -> None:
    out = io.StringIO()
    for uid, tree in trees.items():
        by_sent = defaultdict(list)
        for t in tree.tokens:
            by_sent[t.sentence].append(t)
        for toks in by_sent.values():
            offset = toks[0].index - 1
            out.write(f"# utterance_id = {uid}\n")
            for t in toks:
                head = 0 if t.head == 0 else t.head - offset
                out.write("\t".join([str(t.index - offset), t.surface, t.lemma, t.upos, "_", "_",
                                     str(head), t.deprel, "_", "_"]) + "\n")
            out.write("\n")
    Path(path).write_text(out.getvalue(), encoding="utf-8")


_FALLBACK_RE = re.compile(r"\S+")
_TRAIL_PUNCT = re.compile(r"^(.+?)([.,!?;:…\"')\]]+)$")


def fallback_tokens(text: str) -> list:
    """Whitespace split with trailing punctuation split off.  Used only when no parse exists."""
    out = []
    for tok in _FALLBACK_RE.findall(text):
        m = _TRAIL_PUNCT.match(tok)
        if m and m.group(1):
            out.append(m.group(1))
            out.extend(m.group(2))
        else:
            out.append(tok)
    return out


def utterance_tokens(utt: Utterance, trees: Optional[Mapping] = None) -> list:
    """Lowercased lemmas from the parse when available, fallback tokens otherwise."""
    tree = trees.get(utt.id) if trees else None
    if tree is not None:
        return tree.lemmas()
    return [t.lower() for t in fallback_tokens(utt.text)]


# ---------------------------------------------------------------------------
# Validation

@dataclass
class ValidationReport:
    n_pairs: int = 0
    missing_parse: int = 0
    missing_parse_s_im: int = 0
    missing_parse_h_int: int = 0
    excluded_pairs: int = 0
    empty_texts: int = 0
    messages: int = 0
    messages_with_repeated_hearer: int = 0
    copies: int = 0
    problems: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2)


def validate_corpus(corpus: Sequence[IronyPair], parses: Optional[Mapping] = None) -> ValidationReport:
    parses = parses or {}
    rep = ValidationReport(n_pairs=len(corpus))
    for p in corpus:
        if p.s_im.id not in parses:
            rep.missing_parse_s_im += 1
        if p.h_int.id not in parses:
            rep.missing_parse_h_int += 1
        if not p.valid:
            rep.excluded_pairs += 1
        for u in (p.s_im, p.h_int):
            if not u.text.strip():
                rep.empty_texts += 1
                rep.problems.append(f"{u.id}: empty text")
        if is_copy(p):
            rep.copies += 1
    rep.missing_parse = rep.missing_parse_s_im + rep.missing_parse_h_int
    groups = group_by_message(corpus)
    rep.messages = len(groups)
    for key, members in groups.items():
        hearers = [m.hearer_id for m in members]
        if len(set(hearers)) != len(hearers):
            rep.messages_with_repeated_hearer += 1
            rep.problems.append(f"message {members[0].pair_id}: hearer repeated")
    return rep
