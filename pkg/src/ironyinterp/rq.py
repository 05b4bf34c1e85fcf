"""Rhetorical-question classifier: hand-crafted question features and an
L2-regularised logistic model trained by full-batch gradient descent."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .corpus import Role, Utterance, fallback_tokens
from .lexicons import LexiconBundle, is_negation_marker

MODALS = ("can", "could", "may", "might", "must", "shall", "should", "will", "would")
INTERROGATIVES = ("who", "what", "when", "where", "why", "which", "whose", "whom", "how")
PRONOUNS = ("i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him",
            "his", "she", "her", "hers", "it", "its", "we", "us", "our", "ours", "they", "them",
            "their", "theirs", "u", "ya")
HAND_FEATURES = ("modal", "pronoun", "interrogative", "negation", "qmark_position", "n_tokens")

RQ, INFO = "RQ", "INFO"


@dataclass(frozen=True)
class RqFeatureVector:
    modal: int
    pronoun: int
    interrogative: int
    negation: int
    qmark_position: float
    n_tokens: int
    embedding: Optional[tuple] = None

    def as_array(self) -> np.ndarray:
        base = [self.modal, self.pronoun, self.interrogative, self.negation,
                self.qmark_position, self.n_tokens]
        return np.array(base + list(self.embedding or ()), dtype=float)


def _word(tok):
    return tok.lower().replace("’", "'")


def _contraction_parts(w):
    # "couldn't" -> "could", "won't" -> "will"
    if w.endswith("n't"):
        stem = w[:-3]
        return {"wo": "will", "ca": "can", "sha": "shall"}.get(stem, stem)
    return w


def load_embeddings(path) -> dict:
    """``word v1 ... vd`` per line."""
    table, dim = {}, None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            cells = line.split()
            if not cells:
                continue
            vec = np.array([float(x) for x in cells[1:]])
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise ValueError(f"{path}:{lineno}: dimension {len(vec)} != {dim}")
            table[cells[0]] = vec
    return table


def extract_rq_features(message, lexicons: LexiconBundle, embeddings: Optional[dict] = None,
                        dim: Optional[int] = None) -> RqFeatureVector:
    text = message.text if isinstance(message, Utterance) else str(message)
    if "?" not in text:
        raise ValueError("message has no '?'; outside the rhetorical-question model's domain")
    toks = fallback_tokens(text)
    words = [_word(t) for t in toks]
    qpos = next(k for k, t in enumerate(toks) if "?" in t)
    position = qpos / (len(toks) - 1) if len(toks) > 1 else 1.0
    emb = None
    if embeddings is not None:
        if dim is None:
            dim = len(next(iter(embeddings.values()))) if embeddings else 0
        found = [embeddings[w] for w in words if w in embeddings]
        emb = tuple(np.mean(found, axis=0)) if found else (0.0,) * dim
    return RqFeatureVector(
        modal=sum(_contraction_parts(w) in MODALS for w in words),
        pronoun=sum(w in PRONOUNS for w in words),
        interrogative=sum(w in INTERROGATIVES for w in words),
        negation=sum(is_negation_marker(w, lexicons) for w in words),
        qmark_position=float(position),
        n_tokens=sum(any(c.isalnum() for c in w) for w in words),
        embedding=emb,
    )


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=float)))


def loss_and_grad(params: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean logistic loss plus ``l2/2 * |w|^2``; ``params = [w..., b]``, ``y`` in {0, 1}."""
    w, b = params[:-1], params[-1]
    z = X @ w + b
    s = 2.0 * y - 1.0
    loss = float(np.mean(np.logaddexp(0.0, -s * z)) + 0.5 * l2 * w @ w)
    r = -s * sigmoid(-s * z) / len(y)
    grad = np.concatenate([X.T @ r + l2 * w, [r.sum()]])
    return loss, grad


@dataclass
class RqModel:
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    std: np.ndarray
    feature_names: tuple = HAND_FEATURES
    embedding_dim: int = 0
    meta: dict = field(default_factory=dict)

    def margin(self, x: np.ndarray) -> float:
        return float(((x - self.mean) / self.std) @ self.weights + self.bias)

    def to_json(self) -> str:
        return json.dumps({
            "weights": [float(v) for v in self.weights],
            "bias": float(self.bias),
            "mean": [float(v) for v in self.mean],
            "std": [float(v) for v in self.std],
            "feature_names": list(self.feature_names),
            "embedding_dim": self.embedding_dim,
            "meta": self.meta,
        }, indent=2)

    def save(self, path):
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_json(cls, text) -> "RqModel":
        d = json.loads(text)
        return cls(np.array(d["weights"], dtype=float), float(d["bias"]),
                   np.array(d["mean"], dtype=float), np.array(d["std"], dtype=float),
                   tuple(d["feature_names"]), int(d.get("embedding_dim", 0)), d.get("meta", {}))

    @classmethod
    def load(cls, path) -> "RqModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass
class RqConfig:
    l2: float = 1e-3
    learning_rate: float = 0.5
    max_epochs: int = 5000
    tol: float = 1e-6
    seed: int = 0


def train_on_matrix(X: np.ndarray, y: np.ndarray, config: RqConfig = RqConfig(), names=HAND_FEATURES,
                    embedding_dim=0) -> RqModel:
    if len(set(y.tolist())) < 2:
        raise ValueError("training data must contain both classes")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    Xs = (X - mean) / std
    rng = np.random.default_rng(config.seed)
    params = rng.normal(scale=1e-3, size=X.shape[1] + 1)
    prev, _ = loss_and_grad(params, Xs, y, config.l2)
    epochs = 0
    for epochs in range(1, config.max_epochs + 1):
        loss, grad = loss_and_grad(params, Xs, y, config.l2)
        params = params - config.learning_rate * grad
        new, _ = loss_and_grad(params, Xs, y, config.l2)
        if prev - new < config.tol and epochs > 1:
            prev = new
            break
        prev = new
    meta = {"loss": prev, "epochs": epochs, "l2": config.l2, "seed": config.seed,
            "learning_rate": config.learning_rate}
    return RqModel(params[:-1], float(params[-1]), mean, std, tuple(names), embedding_dim, meta)


def train_rq_classifier(labeled, lexicons: LexiconBundle, config: RqConfig = RqConfig(),
                        embeddings: Optional[dict] = None) -> RqModel:
    """Train from ``(message, label)`` pairs with labels ``"RQ"``/``"INFO"``."""
    labeled = list(labeled)
    labels = {lab for _, lab in labeled}
    if not labels <= {RQ, INFO}:
        raise ValueError(f"unknown labels {sorted(labels - {RQ, INFO})}")
    dim = len(next(iter(embeddings.values()))) if embeddings else 0
    X = np.array([extract_rq_features(m, lexicons, embeddings, dim).as_array() for m, _ in labeled])
    y = np.array([1.0 if lab == RQ else 0.0 for _, lab in labeled])
    names = HAND_FEATURES + tuple(f"emb{k}" for k in range(dim))
    return train_on_matrix(X, y, config, names, dim)


def predict_rq(model: RqModel, message, lexicons: LexiconBundle, embeddings: Optional[dict] = None):
    """``(label, score)``; the score is the logistic of the margin and the label is RQ iff score >= 0.5."""
    feats = extract_rq_features(message, lexicons, embeddings if model.embedding_dim else None,
                                model.embedding_dim or None)
    score = float(sigmoid(model.margin(feats.as_array())))
    return (RQ if score >= 0.5 else INFO), score


def read_training_tsv(path) -> list:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            cells = line.rstrip("\n").split("\t", 1)
            if len(cells) != 2 or cells[0] not in (RQ, INFO):
                raise ValueError(f"{path}:{lineno}: expected 'RQ|INFO <TAB> text'")
            out.append((Utterance(f"rq{lineno}", cells[1], Role.SpeakerIronic), cells[0]))
    return out


def default_rq_model(lexicons: LexiconBundle) -> RqModel:
    """Model trained on the small bundled question set (the original training tweets are not public)."""
    path = Path(str(resources.files("ironyinterp") / "data" / "rq_seed.tsv"))
    return train_rq_classifier(read_training_tsv(path), lexicons)
