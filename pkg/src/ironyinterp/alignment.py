"""Word alignment trained from scratch: IBM Model 1 initialisation refined by an HMM.

Both models explain each target word ``f`` by one source word ``e`` (or the
NULL word).  Model 1 learns lexical translation probabilities ``t(f|e)``; the
HMM adds a distribution over jumps between the source positions of
consecutive target words, plus a probability of emitting from NULL.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

log = logging.getLogger(__name__)

NULL = "<NULL>"


def check_bitext(bitext):
    if not bitext:
        raise ValueError("bitext is empty")
    for k, (src, tgt) in enumerate(bitext):
        if not src or not tgt:
            raise ValueError(f"sentence pair {k} has an empty side")


class TranslationTable:
    """Lexical translation probabilities ``t(f|e)``; ``e`` may be ``NULL``."""

    def __init__(self, probs: dict):
        self.probs = probs  # (e, f) -> t(f|e)
        by_e = defaultdict(dict)
        for (e, f), p in probs.items():
            by_e[e][f] = p
        self.by_source = dict(by_e)

    def __call__(self, f, e) -> float:
        return self.probs.get((e, f), 0.0)

    def __len__(self):
        return len(self.probs)

    def row_sums(self) -> dict:
        return {e: float(sum(row.values())) for e, row in self.by_source.items()}

    def to_tsv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for (e, f), p in sorted(self.probs.items()):
                fh.write(f"{e}\t{f}\t{p:.9f}\n")

    @classmethod
    def from_tsv(cls, path) -> "TranslationTable":
        probs = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                e, f, p = line.rstrip("\n").split("\t")
                probs[(e, f)] = float(p)
        # undo the 9-decimal rounding drift
        sums = defaultdict(float)
        for (e, _), p in probs.items():
            sums[e] += p
        return cls({k: p / sums[k[0]] for k, p in probs.items() if sums[k[0]] > 0})


@dataclass
class HmmJumpModel:
    """Jump distribution over ``[-max_jump, max_jump]`` plus the NULL probability.

    Longer jumps fall into the boundary buckets.  Transitions are renormalised
    over the positions that exist in the current sentence.
    """

    probs: np.ndarray
    p_null: float
    max_jump: int = 5

    @classmethod
    def initial(cls, max_jump=5, p_null=0.2, decay=1.0):
        d = np.arange(-max_jump, max_jump + 1)
        w = np.exp(-decay * np.abs(d - 1))
        return cls(w / w.sum(), p_null, max_jump)

    def jump(self, d) -> float:
        return float(self.probs[int(np.clip(d, -self.max_jump, self.max_jump)) + self.max_jump])

    def bucket(self, d):
        return np.clip(d, -self.max_jump, self.max_jump) + self.max_jump

    def matrices(self, I):
        """Initial vector and transition matrix over the ``2I+1`` states.

        States ``0..I-1`` are source words ``1..I``; state ``I+k`` is NULL
        remembering source position ``k`` (``k=0`` is the start).
        """
        pos = np.concatenate([np.arange(1, I + 1), np.arange(0, I + 1)])
        dest = np.arange(1, I + 1)
        w = self.probs[self.bucket(dest[None, :] - pos[:, None])]
        w = w / w.sum(axis=1, keepdims=True)
        S = 2 * I + 1
        T = np.zeros((S, S))
        T[:, :I] = (1.0 - self.p_null) * w
        T[np.arange(S), I + pos] = self.p_null
        return T[I].copy(), T

    def to_tsv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for d, p in zip(range(-self.max_jump, self.max_jump + 1), self.probs):
                fh.write(f"{d}\t{p:.9f}\n")
            fh.write(f"null\t{self.p_null:.9f}\n")

    @classmethod
    def from_tsv(cls, path) -> "HmmJumpModel":
        jumps, p_null = {}, None
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                key, p = line.rstrip("\n").split("\t")
                if key == "null":
                    p_null = float(p)
                else:
                    jumps[int(key)] = float(p)
        K = max(abs(k) for k in jumps)
        probs = np.array([jumps.get(d, 0.0) for d in range(-K, K + 1)])
        return cls(probs / probs.sum(), p_null if p_null is not None else 0.2, K)


@dataclass
class HmmModel:
    table: TranslationTable
    jumps: HmmJumpModel


# ---------------------------------------------------------------------------
# Vectorised co-occurrence structure shared by both trainers


class _Cooc:
    """Every (sentence, target position, source position) triple, indexed into a parameter vector."""

    def __init__(self, bitext):
        param_ids = {}
        e_of = []
        rows_param, rows_tok = [], []
        self.sent_idx = []  # per sentence: (I+1) x J matrix of parameter ids, row 0 = NULL
        n_tok = 0
        for src, tgt in bitext:
            srcn = [NULL] + list(src)
            mat = np.empty((len(srcn), len(tgt)), dtype=np.int64)
            for i, e in enumerate(srcn):
                for j, f in enumerate(tgt):
                    key = (e, f)
                    pid = param_ids.get(key)
                    if pid is None:
                        pid = param_ids[key] = len(e_of)
                        e_of.append(e)
                    mat[i, j] = pid
            self.sent_idx.append(mat)
            rows_param.append(mat.T.ravel())
            rows_tok.append(np.repeat(np.arange(n_tok, n_tok + len(tgt)), len(srcn)))
            n_tok += len(tgt)
        self.keys = list(param_ids)
        self.param = np.concatenate(rows_param)
        self.tok = np.concatenate(rows_tok)
        self.n_tok = n_tok
        e_ids = {}
        self.e_of_param = np.array([e_ids.setdefault(e, len(e_ids)) for e in e_of], dtype=np.int64)
        self.n_e = len(e_ids)
        self.src_lens = np.array([m.shape[0] for m in self.sent_idx])

    def uniform(self):
        per_e = np.bincount(self.e_of_param, minlength=self.n_e).astype(float)
        return 1.0 / per_e[self.e_of_param]

    def from_table(self, table: TranslationTable, floor=1e-12):
        params = np.array([table(f, e) for e, f in self.keys])
        params = np.maximum(params, floor)
        return self.normalize(params)

    def normalize(self, counts):
        tot = np.bincount(self.e_of_param, weights=counts, minlength=self.n_e)
        tot = np.where(tot > 0, tot, 1.0)
        return counts / tot[self.e_of_param]

    def to_table(self, params) -> TranslationTable:
        return TranslationTable({k: float(p) for k, p in zip(self.keys, params)})


def _model1_estep(cooc: _Cooc, params):
    vals = params[cooc.param]
    denom = np.bincount(cooc.tok, weights=vals, minlength=cooc.n_tok)
    post = vals / denom[cooc.tok]
    counts = np.bincount(cooc.param, weights=post, minlength=len(params))
    lens = np.repeat(cooc.src_lens, [m.shape[1] for m in cooc.sent_idx])
    ll = float(np.sum(np.log(denom) - np.log(lens)))
    return counts, ll


def model1_log_likelihood(bitext, table: TranslationTable) -> float:
    """Corpus log-likelihood ``sum_j log(sum_i t(f_j|e_i) / (I+1))``, NULL included."""
    total = 0.0
    for src, tgt in bitext:
        srcn = [NULL] + list(src)
        for f in tgt:
            total += np.log(sum(table(f, e) for e in srcn) / len(srcn))
    return float(total)


def train_model1(bitext, iterations: int, history: Optional[list] = None) -> TranslationTable:
    """EM for IBM Model 1 from a uniform start over co-occurring word pairs.

    If ``history`` is given, the log-likelihood under the parameters of each
    iteration is appended to it, followed by the final value.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    check_bitext(bitext)
    cooc = _Cooc(bitext)
    params = cooc.uniform()
    for it in range(iterations):
        counts, ll = _model1_estep(cooc, params)
        params = cooc.normalize(counts)
        if history is not None:
            history.append(ll)
        log.debug("model1 iter %d ll=%.6f", it, ll)
    if history is not None:
        history.append(_model1_estep(cooc, params)[1])
    return cooc.to_table(params)


# ---------------------------------------------------------------------------
# HMM


def _forward_backward(init, T, emit):
    """Scaled forward-backward.  ``emit`` is states x J.  Returns gamma, xi sum, log-likelihood."""
    S, J = emit.shape
    alpha = np.empty((J, S))
    scale = np.empty(J)
    a = init * emit[:, 0]
    scale[0] = a.sum()
    alpha[0] = a / scale[0]
    for j in range(1, J):
        a = (alpha[j - 1] @ T) * emit[:, j]
        scale[j] = a.sum()
        alpha[j] = a / scale[j]
    beta = np.empty((J, S))
    beta[J - 1] = 1.0
    for j in range(J - 2, -1, -1):
        beta[j] = (T @ (emit[:, j + 1] * beta[j + 1])) / scale[j + 1]
    gamma = alpha * beta
    xi = np.zeros((S, S))
    for j in range(J - 1):
        xi += np.outer(alpha[j], emit[:, j + 1] * beta[j + 1] / scale[j + 1])
    xi *= T
    return gamma, xi, float(np.log(scale).sum())


def _jump_objective(theta, c, groups):
    """Concave jump part of the EM auxiliary function (negated for minimisation)."""
    q = np.exp(theta - theta.max())
    val = float(c @ theta)
    grad = c.copy()
    for m, n in groups:
        z = m @ q
        val -= n * (np.log(z) + theta.max())
        grad -= n * m * q / z
    return -val, -grad


class _JumpStats:
    def __init__(self, K):
        self.K = K
        self.c = np.zeros(2 * K + 1)
        self.n_by_config = defaultdict(float)  # (I, pos) -> expected transitions to real states
        self.n_null = 0.0
        self.n_real = 0.0

    def add(self, I, real_mass_by_pos, null_mass, bucket_counts):
        self.c += bucket_counts
        for p, n in enumerate(real_mass_by_pos):
            if n > 0:
                self.n_by_config[(I, p)] += n
        self.n_null += null_mass
        self.n_real += float(np.sum(real_mass_by_pos))

    def groups(self):
        out = []
        for (I, p), n in self.n_by_config.items():
            d = np.clip(np.arange(1, I + 1) - p, -self.K, self.K) + self.K
            out.append((np.bincount(d, minlength=2 * self.K + 1).astype(float), n))
        return out


def _maximize_jumps(stats: _JumpStats, old: np.ndarray) -> np.ndarray:
    groups = stats.groups()
    if not groups:
        return old
    theta0 = np.log(np.maximum(old, 1e-300))
    theta0 = np.maximum(theta0 - theta0.max(), -50.0)
    res = minimize(_jump_objective, theta0, args=(stats.c, groups), jac=True,
                   method="L-BFGS-B", bounds=[(-50.0, 0.0)] * len(theta0))
    f_old = _jump_objective(theta0, stats.c, groups)[0]
    theta = res.x if res.fun <= f_old else theta0
    q = np.exp(theta - logsumexp(theta))
    return q


def _sentence_terms(cooc, k, params, jumps):
    idx = cooc.sent_idx[k]
    I = idx.shape[0] - 1
    t = params[idx]  # (I+1) x J
    emit = np.vstack([t[1:], np.repeat(t[:1], I + 1, axis=0)])
    init, T = jumps.matrices(I)
    return I, idx, emit, init, T


def hmm_log_likelihood(bitext, table: TranslationTable, jumps: HmmJumpModel) -> float:
    total = 0.0
    for src, tgt in bitext:
        I = len(src)
        t = np.array([[table(f, e) for f in tgt] for e in [NULL] + list(src)])
        emit = np.vstack([t[1:], np.repeat(t[:1], I + 1, axis=0)])
        init, T = jumps.matrices(I)
        total += _forward_backward(init, T, emit)[2]
    return float(total)


def train_hmm(bitext, init: TranslationTable, iterations: int, max_jump: int = 5,
              p_null: float = 0.2, jumps: Optional[HmmJumpModel] = None,
              history: Optional[list] = None):
    """Forward-backward EM for the HMM alignment model.

    Returns ``(TranslationTable, HmmJumpModel)``.  ``history`` receives the
    log-likelihood before every iteration and after the last one.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    check_bitext(bitext)
    cooc = _Cooc(bitext)
    params = cooc.from_table(init)
    jumps = jumps or HmmJumpModel.initial(max_jump, p_null)
    K = jumps.max_jump

    def estep(params, jumps):
        counts = np.zeros_like(params)
        stats = _JumpStats(K)
        ll = 0.0
        for k in range(len(cooc.sent_idx)):
            I, idx, emit, init_v, T = _sentence_terms(cooc, k, params, jumps)
            gamma, xi, sll = _forward_backward(init_v, T, emit)
            ll += sll
            np.add.at(counts, idx[1:].T, gamma[:, :I])
            np.add.at(counts, idx[0], gamma[:, I:].sum(axis=1))
            # transitions: the start acts as NULL at position 0
            xi[I] += gamma[0]
            pos = np.concatenate([np.arange(1, I + 1), np.arange(0, I + 1)])
            to_real = xi[:, :I]
            real_mass = np.bincount(pos, weights=to_real.sum(axis=1), minlength=I + 1)
            d = jumps.bucket(np.arange(1, I + 1)[None, :] - pos[:, None])
            buckets = np.bincount(d.ravel(), weights=to_real.ravel(), minlength=2 * K + 1)
            stats.add(I, real_mass, float(xi[:, I:].sum()), buckets)
        return counts, stats, ll

    for it in range(iterations):
        counts, stats, ll = estep(params, jumps)
        if history is not None:
            history.append(ll)
        log.debug("hmm iter %d ll=%.6f", it, ll)
        params = cooc.normalize(counts)
        probs = _maximize_jumps(stats, jumps.probs)
        total = stats.n_null + stats.n_real
        jumps = HmmJumpModel(probs, stats.n_null / total if total > 0 else jumps.p_null, K)
    if history is not None:
        history.append(estep(params, jumps)[2])
    return cooc.to_table(params), jumps


# ---------------------------------------------------------------------------
# Decoding and symmetrisation


def check_alignment(links, I, J):
    for i, j in links:
        if not (1 <= i <= I and 1 <= j <= J):
            raise ValueError(f"link {(i, j)} outside a {I}x{J} sentence pair")
    return frozenset(links)


def viterbi_align(model, src: Sequence[str], tgt: Sequence[str]) -> frozenset:
    """Most probable alignment as a set of 1-based ``(source, target)`` links, NULL links dropped.

    ``model`` is a ``TranslationTable`` (Model 1: best source per target word)
    or an ``HmmModel`` (best state path).
    """
    if not src or not tgt:
        return frozenset()
    if isinstance(model, TranslationTable):
        links = set()
        for j, f in enumerate(tgt, start=1):
            best, best_i = model(f, NULL), 0
            for i, e in enumerate(src, start=1):
                p = model(f, e)
                if p > 0 and (p > best or (best_i == 0 and p == best)):
                    best, best_i = p, i
            if best_i:
                links.add((best_i, j))
        return frozenset(links)
    return _hmm_viterbi(model, src, tgt)


def _hmm_viterbi(model: HmmModel, src, tgt):
    I, J = len(src), len(tgt)
    t = np.array([[model.table(f, e) for f in tgt] for e in [NULL] + list(src)])
    emit = np.vstack([t[1:], np.repeat(t[:1], I + 1, axis=0)])
    init, T = model.jumps.matrices(I)
    with np.errstate(divide="ignore"):
        le, lT = np.log(emit), np.log(T)
        delta = np.log(init) + le[:, 0]
    back = np.zeros((J, 2 * I + 1), dtype=np.int64)
    for j in range(1, J):
        scores = delta[:, None] + lT
        back[j] = np.argmax(scores, axis=0)
        delta = scores[back[j], np.arange(2 * I + 1)] + le[:, j]
    if not np.isfinite(delta.max()):
        return frozenset()
    state = int(np.argmax(delta))
    links = set()
    for j in range(J - 1, -1, -1):
        if state < I:
            links.add((state + 1, j + 1))
        state = int(back[j, state])
    return frozenset(links)


def symmetrize(forward, reverse, heuristic: str = "GrowDiagFinal") -> frozenset:
    """Combine two alignments of the same pair, both given as ``(source, target)`` links."""
    fwd, rev = frozenset(forward), frozenset(reverse)
    inter = fwd & rev
    if heuristic == "Intersection":
        return inter
    if heuristic != "GrowDiagFinal":
        raise ValueError(f"unknown heuristic {heuristic!r}")
    union = fwd | rev
    links = set(inter)
    neighbours = [(-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)]

    def aligned_src(i):
        return any(l[0] == i for l in links)

    def aligned_tgt(j):
        return any(l[1] == j for l in links)

    added = True
    while added:
        added = False
        for i, j in sorted(links):
            for di, dj in neighbours:
                cand = (i + di, j + dj)
                if cand in union and cand not in links and (not aligned_src(cand[0]) or not aligned_tgt(cand[1])):
                    links.add(cand)
                    added = True
    for cand in sorted(union):
        if cand not in links and (not aligned_src(cand[0]) or not aligned_tgt(cand[1])):
            links.add(cand)
    return frozenset(links)


# ---------------------------------------------------------------------------
# Bidirectional aligner with persistence


def identity_pairs(bitext):
    """One ``([w], [w])`` pair per word type: the bitext is monolingual, so words translate to themselves."""
    vocab = sorted({w for s, t in bitext for w in (*s, *t)})
    return [([w], [w]) for w in vocab]


def _train_direction(bitext, iters_m1, iters_hmm, max_jump=5, p_null=0.2):
    t = train_model1(bitext, iters_m1)
    if iters_hmm <= 0:
        return HmmModel(t, HmmJumpModel.initial(max_jump, p_null))
    t, jumps = train_hmm(bitext, t, iters_hmm, max_jump=max_jump, p_null=p_null)
    return HmmModel(t, jumps)


@dataclass
class Aligner:
    forward: HmmModel  # source -> target
    reverse: HmmModel  # target -> source
    heuristic: str = "GrowDiagFinal"

    def align(self, src, tgt) -> frozenset:
        fwd = viterbi_align(self.forward, src, tgt)
        rev = {(i, j) for j, i in viterbi_align(self.reverse, tgt, src)}
        return symmetrize(fwd, rev, self.heuristic)

    def save(self, directory):
        d = Path(directory)
        for name, m in (("forward", self.forward), ("reverse", self.reverse)):
            (d / name).mkdir(parents=True, exist_ok=True)
            m.table.to_tsv(d / name / "ttable.tsv")
            m.jumps.to_tsv(d / name / "jumps.tsv")
        (d / "heuristic.txt").write_text(self.heuristic + "\n", encoding="utf-8")

    @classmethod
    def load(cls, directory) -> "Aligner":
        d = Path(directory)
        models = []
        for name in ("forward", "reverse"):
            models.append(HmmModel(TranslationTable.from_tsv(d / name / "ttable.tsv"),
                                   HmmJumpModel.from_tsv(d / name / "jumps.tsv")))
        heuristic = "GrowDiagFinal"
        if (d / "heuristic.txt").exists():
            heuristic = (d / "heuristic.txt").read_text(encoding="utf-8").strip()
        return cls(models[0], models[1], heuristic)


def train_aligner(bitext, iters_m1: int = 5, iters_hmm: int = 5, identity_prior: bool = True,
                  heuristic: str = "GrowDiagFinal", max_jump: int = 5) -> Aligner:
    """Train both directions on ``bitext`` and return a symmetrising aligner."""
    check_bitext(bitext)
    data = [(list(s), list(t)) for s, t in bitext]
    if identity_prior:
        data += identity_pairs(data)
    fwd = _train_direction(data, iters_m1, iters_hmm, max_jump)
    rev = _train_direction([(t, s) for s, t in data], iters_m1, iters_hmm, max_jump)
    return Aligner(fwd, rev, heuristic)


def write_bitext(bitext, path):
    with open(path, "w", encoding="utf-8") as fh:
        for s, t in bitext:
            fh.write(" ".join(s) + "\t" + " ".join(t) + "\n")


def read_bitext(path) -> list:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            cells = line.rstrip("\n").split("\t")
            if len(cells) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 tab-separated fields")
            out.append((cells[0].split(), cells[1].split()))
    return out
