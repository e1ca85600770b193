"""Follow-up chain modeling: features, scoring, training, construction.

A discussion chain starts at the title and greedily appends the
highest-scoring candidate from a sliding window of upcoming eligible
sentences. Candidate scores come from a logistic regression over a
sentence-distance feature, a TextRank centrality feature, and optional
precomputed embedding blocks read from sidecar files.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .conllu import ParsedSentence
from .lexicon import STOP_WORDS

logger = logging.getLogger(__name__)

Scorer = Callable[[Sequence[int], int], float]


class FeatureError(ValueError):
    """Bad embedding sidecar or feature configuration."""


@dataclass(frozen=True)
class ChainConfig:
    first_window: int = 4
    window: int = 3
    theta_stop: float = 0.3
    max_length: int = 6


@dataclass(frozen=True)
class TrainRow:
    """One labeled (context, candidate) pair for chain training."""

    article_id: str
    context: Tuple[int, ...]
    candidate: int
    label: int


# ---------------------------------------------------------------------------
# features


def content_lemmas(sentence: ParsedSentence) -> set:
    """Distinct lowercased non-stop lemmas of a sentence."""
    out = set()
    for tok in sentence.tokens:
        lemma = (tok.lemma or tok.form).lower()
        if lemma in STOP_WORDS:
            continue
        if not any(c.isalnum() for c in lemma):
            continue
        out.add(lemma)
    return out


def sentence_distance_feature(chain_end: int, candidate: int) -> float:
    """1 / (d + 1) where d counts sentences skipped between chain end and
    candidate; the adjacent sentence scores 1.0."""
    d = candidate - chain_end - 1
    if d < 0:
        raise ValueError(
            f"candidate {candidate} does not follow chain end {chain_end}"
        )
    return 1.0 / (d + 1)


def textrank_scores(
    sentences: Sequence[ParsedSentence],
    damping: float = 0.85,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> Dict[int, float]:
    """Centrality of each sentence in a lexical-overlap graph.

    Edge weight between two sentences is the number of shared content
    lemmas divided by the sum of the log lengths. Scores iterate
    ``(1 - damping) + damping * weighted sum`` until the largest change
    falls under ``tol``; a sentence with no neighbors settles at 0.15.
    """
    n = len(sentences)
    if n == 0:
        return {}
    sets = [content_lemmas(s) for s in sentences]
    lens = [len(s.tokens) for s in sentences]
    weight = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            shared = len(sets[i] & sets[j])
            if shared == 0:
                continue
            denom = math.log(lens[i]) + math.log(lens[j])
            if denom <= 0:
                continue
            weight[i][j] = weight[j][i] = shared / denom
    strength = [sum(row) for row in weight]
    scores = [1.0] * n
    for _ in range(max_iter):
        new = []
        for i in range(n):
            acc = 0.0
            for j in range(n):
                if weight[j][i] > 0.0 and strength[j] > 0.0:
                    acc += weight[j][i] / strength[j] * scores[j]
            new.append((1.0 - damping) + damping * acc)
        delta = max(abs(a - b) for a, b in zip(new, scores))
        scores = new
        if delta < tol:
            break
    return {s.position: score for s, score in zip(sentences, scores)}


class EmbeddingStore:
    """Read-only table of precomputed float vectors keyed by string."""

    def __init__(self, dim: int, vectors: Mapping[str, Sequence[float]]):
        self.dim = dim
        self._vectors = {k: np.asarray(v, dtype=float) for k, v in vectors.items()}

    @classmethod
    def load(cls, path: Path) -> "EmbeddingStore":
        try:
            data = json.loads(Path(path).read_text())
            dim = int(data["dim"])
            vectors = data["vectors"]
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FeatureError(f"bad embedding file {path}: {exc}") from exc
        for key, vec in vectors.items():
            if len(vec) != dim:
                raise FeatureError(
                    f"embedding {key!r} has {len(vec)} dims, header says {dim}"
                )
        return cls(dim, vectors)

    def get(self, key: str) -> np.ndarray:
        if key not in self._vectors:
            raise KeyError(f"embedding key {key!r} missing")
        return self._vectors[key]

    @staticmethod
    def single_key(article_id: str, candidate: int) -> str:
        return f"{article_id}||{candidate}"

    @staticmethod
    def chain_key(
        article_id: str, ctx_start: int, ctx_end: int, candidate: int
    ) -> str:
        return f"{article_id}|{ctx_start}-{ctx_end}|{candidate}"


@dataclass
class FeatureConfig:
    use_sentence_distance: bool = True
    use_textrank: bool = True
    single_store: Optional[EmbeddingStore] = None
    chain_store: Optional[EmbeddingStore] = None

    @property
    def n_dense(self) -> int:
        return int(self.use_sentence_distance) + int(self.use_textrank)

    def names(self) -> List[str]:
        out = []
        if self.use_sentence_distance:
            out.append("sentence_distance")
        if self.use_textrank:
            out.append("textrank")
        if self.single_store is not None:
            out.append("single_sentence_embedding")
        if self.chain_store is not None:
            out.append("chain_embedding")
        return out


def featurize(
    article_id: str,
    context: Sequence[int],
    candidate: int,
    textrank: Mapping[int, float],
    config: FeatureConfig,
) -> np.ndarray:
    """Feature vector for one (context, candidate) pair.

    Dense features come first and are the only ones standardized by the
    model; embedding blocks are appended raw.
    """
    if not context:
        raise ValueError("context must name at least one sentence")
    parts: List[float] = []
    if config.use_sentence_distance:
        parts.append(sentence_distance_feature(context[-1], candidate))
    if config.use_textrank:
        parts.append(textrank[candidate])
    vec = np.asarray(parts, dtype=float)
    blocks = [vec]
    if config.single_store is not None:
        blocks.append(
            config.single_store.get(EmbeddingStore.single_key(article_id, candidate))
        )
    if config.chain_store is not None:
        blocks.append(
            config.chain_store.get(
                EmbeddingStore.chain_key(
                    article_id, context[0], context[-1], candidate
                )
            )
        )
    return np.concatenate(blocks)


# ---------------------------------------------------------------------------
# metrics


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Rank-sum ROC-AUC with tied scores counted half.

    Raises ValueError when labels are all positive or all negative.
    """
    if len(scores) != len(labels):
        raise ValueError("scores and labels differ in length")
    n = len(scores)
    n_pos = sum(1 for y in labels if y == 1)
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC-AUC undefined: labels are all one class")
    order = sorted(range(n), key=lambda i: scores[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    rank_sum = sum(ranks[i] for i in range(n) if labels[i] == 1)
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


# ---------------------------------------------------------------------------
# logistic regression


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    std: np.ndarray
    n_dense: int
    lam: float
    objective_history: List[float] = field(default_factory=list)

    def _standardize(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        Z = X.copy()
        if self.n_dense:
            Z[:, : self.n_dense] = (X[:, : self.n_dense] - self.mean) / self.std
        return Z

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        Z = self._standardize(X)
        return _sigmoid(Z @ self.weights + self.bias)

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "n_dense": self.n_dense,
            "lambda": self.lam,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LogisticModel":
        return cls(
            weights=np.asarray(data["weights"], dtype=float),
            bias=float(data["bias"]),
            mean=np.asarray(data["mean"], dtype=float),
            std=np.asarray(data["std"], dtype=float),
            n_dense=int(data["n_dense"]),
            lam=float(data["lambda"]),
        )


def fit_logistic(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    n_dense: int,
    max_iter: int = 5000,
    tol: float = 1e-6,
) -> LogisticModel:
    """Full-batch gradient descent with a backtracking line search.

    The objective is the mean negative log-likelihood plus an l2 penalty
    on the weights (never the bias); accepted steps never increase it.
    Standardization statistics cover the dense feature prefix only and are
    computed from the rows given here.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    if n_dense:
        mean = X[:, :n_dense].mean(axis=0)
        std = X[:, :n_dense].std(axis=0)
        std = np.where(std == 0.0, 1.0, std)
    else:
        mean = np.zeros(0)
        std = np.ones(0)
    Z = X.copy()
    if n_dense:
        Z[:, :n_dense] = (X[:, :n_dense] - mean) / std

    w = np.zeros(d)
    b = 0.0

    def objective(wv: np.ndarray, bv: float) -> float:
        z = Z @ wv + bv
        nll = float(np.mean(np.logaddexp(0.0, z) - y * z))
        return nll + 0.5 * lam * float(wv @ wv)

    history = [objective(w, b)]
    for _ in range(max_iter):
        p = _sigmoid(Z @ w + b)
        gw = Z.T @ (p - y) / n + lam * w
        gb = float(np.mean(p - y))
        grad_norm_sq = float(gw @ gw) + gb * gb
        if math.sqrt(grad_norm_sq) < tol:
            break
        alpha = 1.0
        current = history[-1]
        while True:
            cand = objective(w - alpha * gw, b - alpha * gb)
            if cand <= current - 1e-4 * alpha * grad_norm_sq:
                break
            alpha *= 0.5
            if alpha < 1e-12:
                cand = current
                break
        if alpha < 1e-12:
            break
        w = w - alpha * gw
        b = b - alpha * gb
        history.append(cand)

    model = LogisticModel(
        weights=w, bias=b, mean=mean, std=std, n_dense=n_dense, lam=lam
    )
    model.objective_history = history
    return model


DEFAULT_LAMBDA_GRID = (0.001, 0.01, 0.1, 1.0, 10.0)

JOINT = "joint"


class ChainModel:
    """Candidate scorer: one logistic model per context length, or one joint."""

    def __init__(self, models: Dict[str, LogisticModel], mode: str,
                 feature_names: Optional[List[str]] = None):
        if not models:
            raise ValueError("a chain model needs at least one fitted model")
        self.models = models
        self.mode = mode
        self.feature_names = feature_names or []

    def _pick(self, context_len: int) -> LogisticModel:
        if self.mode == JOINT:
            return self.models[JOINT]
        keys = sorted(int(k) for k in self.models)
        usable = [k for k in keys if k <= context_len]
        chosen = usable[-1] if usable else keys[0]
        return self.models[str(chosen)]

    def context_length(self, chain_len: int) -> int:
        if self.mode == JOINT:
            return min(2, chain_len)
        keys = sorted(int(k) for k in self.models)
        usable = [k for k in keys if k <= chain_len]
        return usable[-1] if usable else keys[0]

    def score(self, features: np.ndarray, context_len: int) -> float:
        model = self._pick(context_len)
        return float(model.predict_proba(features)[0])

    def save(self, path: Path) -> None:
        data = {
            "mode": self.mode,
            "feature_names": self.feature_names,
            "models": {k: m.to_dict() for k, m in self.models.items()},
        }
        Path(path).write_text(json.dumps(data, sort_keys=True, indent=2))

    @classmethod
    def load(cls, path: Path) -> "ChainModel":
        try:
            data = json.loads(Path(path).read_text())
            models = {
                k: LogisticModel.from_dict(v) for k, v in data["models"].items()
            }
            return cls(models, data["mode"], data.get("feature_names"))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise FeatureError(f"bad chain model file {path}: {exc}") from exc


def train_chain_model(
    train_rows: Sequence[TrainRow],
    val_rows: Sequence[TrainRow],
    featurizer: Callable[[TrainRow], np.ndarray],
    n_dense: int,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    joint: bool = False,
    feature_names: Optional[List[str]] = None,
) -> ChainModel:
    """Fit per-context-length (default) or joint models over a lambda grid.

    For every group, each lambda is fit on the training rows and judged by
    validation ROC-AUC; the best lambda wins, ties to the smaller value.
    """
    def group(rows: Sequence[TrainRow]) -> Dict[str, List[TrainRow]]:
        table: Dict[str, List[TrainRow]] = {}
        for row in rows:
            key = JOINT if joint else str(len(row.context))
            table.setdefault(key, []).append(row)
        return table

    train_groups = group(train_rows)
    val_groups = group(val_rows)
    models: Dict[str, LogisticModel] = {}
    for key, rows in sorted(train_groups.items()):
        if key not in val_groups:
            raise ValueError(f"no validation rows for context group {key}")
        X = np.stack([featurizer(r) for r in rows])
        y = np.asarray([r.label for r in rows], dtype=float)
        Xv = np.stack([featurizer(r) for r in val_groups[key]])
        yv = [r.label for r in val_groups[key]]
        best: Optional[Tuple[float, float, LogisticModel]] = None
        for lam in lambda_grid:
            model = fit_logistic(X, y, lam=lam, n_dense=n_dense)
            auc = roc_auc(list(model.predict_proba(Xv)), yv)
            logger.info("group %s lambda %g: val auc %.4f", key, lam, auc)
            if best is None or auc > best[0] or (auc == best[0] and lam < best[1]):
                best = (auc, lam, model)
        assert best is not None
        models[key] = best[2]
    return ChainModel(models, JOINT if joint else "per_context_length",
                      feature_names)


@dataclass(frozen=True)
class AccuracyReport:
    correct: int
    groups: int
    skipped_no_positive: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.groups if self.groups else 0.0


def evaluate_accuracy(
    rows: Sequence[TrainRow],
    score_fn: Callable[[TrainRow], float],
) -> AccuracyReport:
    """Top-1 accuracy per (article, context) group.

    A group counts as correct when its highest-scoring candidate is
    labeled positive; score ties resolve to the smaller candidate
    position. Groups with no positive candidate are excluded.
    """
    groups: Dict[Tuple[str, Tuple[int, ...]], List[TrainRow]] = {}
    for row in rows:
        groups.setdefault((row.article_id, row.context), []).append(row)
    correct = 0
    counted = 0
    skipped = 0
    for key, members in groups.items():
        if not any(r.label == 1 for r in members):
            skipped += 1
            continue
        counted += 1
        best = None
        best_score = -math.inf
        for row in sorted(members, key=lambda r: r.candidate):
            s = score_fn(row)
            if s > best_score:
                best_score = s
                best = row
        if best is not None and best.label == 1:
            correct += 1
    return AccuracyReport(correct=correct, groups=counted,
                          skipped_no_positive=skipped)


def load_chain_rows(path: Path) -> List[TrainRow]:
    """Read labeled rows from a JSONL file."""
    rows: List[TrainRow] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
            rows.append(
                TrainRow(
                    article_id=str(data["article_id"]),
                    context=tuple(int(p) for p in data["context"]),
                    candidate=int(data["candidate"]),
                    label=int(data["label"]),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FeatureError(f"{path}:{lineno}: bad training row: {exc}") from exc
    return rows


# ---------------------------------------------------------------------------
# chain construction


def build_discussion_chain(
    eligible_positions: Sequence[int],
    scorer: Scorer,
    config: ChainConfig = ChainConfig(),
) -> List[int]:
    """Greedy follow-up path starting at the title (position 0).

    Each step scores the next ``first_window`` (first hop) or ``window``
    eligible sentences after the chain end and appends the argmax, stopping
    when the best score falls under ``theta_stop``, the window is empty, or
    the chain reaches ``max_length``.
    """
    chain = [0]
    body = sorted(p for p in eligible_positions if p > 0)
    while len(chain) < config.max_length:
        after = [p for p in body if p > chain[-1]]
        size = config.first_window if len(chain) == 1 else config.window
        window = after[:size]
        if not window:
            break
        best_pos = None
        best_score = -math.inf
        for pos in window:
            score = scorer(chain, pos)
            if score > best_score:
                best_score = score
                best_pos = pos
        if best_pos is None or best_score < config.theta_stop:
            break
        chain.append(best_pos)
    return chain


class ModelScorer:
    """Adapts a trained ChainModel to the chain-construction scorer API."""

    def __init__(
        self,
        model: ChainModel,
        article_id: str,
        textrank: Mapping[int, float],
        feature_config: FeatureConfig,
    ):
        self.model = model
        self.article_id = article_id
        self.textrank = textrank
        self.feature_config = feature_config

    def __call__(self, chain: Sequence[int], candidate: int) -> float:
        ctx_len = self.model.context_length(len(chain))
        context = list(chain[-ctx_len:])
        feats = featurize(
            self.article_id, context, candidate, self.textrank,
            self.feature_config,
        )
        return self.model.score(feats, len(context))


class HeuristicScorer:
    """Untrained fallback: a fixed-weight blend of the dense features."""

    def __init__(self, textrank: Mapping[int, float]):
        self.textrank = textrank

    def __call__(self, chain: Sequence[int], candidate: int) -> float:
        sd = sentence_distance_feature(chain[-1], candidate)
        tr = self.textrank.get(candidate, 0.15)
        return float(_sigmoid(np.asarray([sd + tr]))[0])
