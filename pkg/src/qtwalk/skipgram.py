"""Skip-gram training over walk corpora.

Supports the classic model (one output matrix) and the structured variant
with one output matrix per relative context position, trained either by
negative sampling (default) or by the exact softmax (small vocabularies
only; kept as a verification path and for gradient checks).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Mode(Enum):
    CLASSIC = "classic"
    STRUCTURED = "structured"


class SoftmaxMode(Enum):
    NEGATIVE_SAMPLING = "neg"
    FULL_SOFTMAX = "full"


class EmptyCorpus(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    tokens: tuple[str, ...]
    counts: tuple[int, ...]
    min_count: int
    index: dict[str, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index


def build_vocabulary(corpus_rows, min_count: int = 1) -> Vocabulary:
    """Count tokens and assign dense indices, most frequent first.

    Ties are broken by ascending token text so the assignment is a pure
    function of the corpus.
    """
    counts: dict[str, int] = {}
    for row in corpus_rows:
        for token in row:
            counts[token] = counts.get(token, 0) + 1
    kept = sorted(
        ((t, c) for t, c in counts.items() if c >= min_count),
        key=lambda tc: (-tc[1], tc[0]),
    )
    tokens = tuple(t for t, _ in kept)
    return Vocabulary(
        tokens=tokens,
        counts=tuple(c for _, c in kept),
        min_count=min_count,
        index={t: i for i, t in enumerate(tokens)},
    )


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 100
    window: int = 5
    epochs: int = 5
    negatives: int = 5
    learning_rate: float = 0.025
    min_count: int = 1
    seed: int = 0
    mode: Mode = Mode.CLASSIC
    softmax_mode: SoftmaxMode = SoftmaxMode.NEGATIVE_SAMPLING
    full_softmax_cap: int = 2000

    def __post_init__(self):
        if min(self.dim, self.window, self.negatives) <= 0:
            raise ValueError("dim, window, and negatives must be positive")
        if self.epochs < 0 or self.learning_rate <= 0 or self.min_count <= 0:
            raise ValueError("bad training configuration")


@dataclass
class EmbeddingModel:
    mode: Mode
    dim: int
    window: int
    vocab: Vocabulary
    input_vectors: np.ndarray          # (|W|, dim)
    output_matrices: np.ndarray        # (P, |W|, dim); P = 1 or 2*window

    def matrix_index(self, relative_position: int) -> int:
        if self.mode is Mode.CLASSIC:
            return 0
        return position_slot(relative_position, self.window)

    def vector(self, token: str) -> np.ndarray:
        return self.input_vectors[self.vocab.index[token]]


def position_slot(relative_position: int, window: int) -> int:
    """Map a relative position in {-c..-1, 1..c} to a matrix slot."""
    if relative_position == 0 or abs(relative_position) > window:
        raise ValueError(f"relative position {relative_position} out of range")
    if relative_position < 0:
        return relative_position + window
    return relative_position + window - 1


def extract_pairs(walk_tokens, vocab: Vocabulary, window: int
                  ) -> list[tuple[int, int, int]]:
    """(center, context, relative position) index pairs within the window.

    Tokens missing from the vocabulary are dropped before pairing.
    """
    ids = [vocab.index[t] for t in walk_tokens if t in vocab.index]
    pairs: list[tuple[int, int, int]] = []
    for i, center in enumerate(ids):
        lo = max(0, i - window)
        hi = min(len(ids), i + window + 1)
        for j in range(lo, hi):
            if j != i:
                pairs.append((center, ids[j], j - i))
    return pairs


def _init_model(vocab: Vocabulary, cfg: TrainConfig) -> EmbeddingModel:
    rng = np.random.default_rng(cfg.seed)
    n = len(vocab)
    bound = 0.5 / cfg.dim
    inputs = rng.uniform(-bound, bound, size=(n, cfg.dim))
    planes = 1 if cfg.mode is Mode.CLASSIC else 2 * cfg.window
    outputs = np.zeros((planes, n, cfg.dim))
    return EmbeddingModel(
        mode=cfg.mode,
        dim=cfg.dim,
        window=cfg.window,
        vocab=vocab,
        input_vectors=inputs,
        output_matrices=outputs,
    )


def _noise_cdf(vocab: Vocabulary) -> np.ndarray:
    weights = np.asarray(vocab.counts, dtype=np.float64) ** 0.75
    return np.cumsum(weights / weights.sum())


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30.0, 30.0)))


def train(corpus_rows, vocab: Vocabulary, cfg: TrainConfig) -> EmbeddingModel:
    """Per-pair SGD over all context pairs of the corpus.

    Single-threaded and bit-reproducible for a fixed seed; the learning
    rate decays linearly over the total number of updates.
    """
    if len(vocab) == 0:
        raise EmptyCorpus("vocabulary is empty")
    pairs: list[tuple[int, int, int]] = []
    for row in corpus_rows:
        pairs.extend(extract_pairs(row, vocab, cfg.window))
    model = _init_model(vocab, cfg)
    if not pairs or cfg.epochs == 0:
        return model
    if cfg.softmax_mode is SoftmaxMode.FULL_SOFTMAX and len(vocab) > cfg.full_softmax_cap:
        raise ValueError(
            f"full softmax limited to {cfg.full_softmax_cap} tokens, "
            f"vocabulary has {len(vocab)}"
        )

    centers = np.array([p[0] for p in pairs], dtype=np.int64)
    contexts = np.array([p[1] for p in pairs], dtype=np.int64)
    if cfg.mode is Mode.CLASSIC:
        slots = np.zeros(len(pairs), dtype=np.int64)
    else:
        slots = np.array(
            [position_slot(p[2], cfg.window) for p in pairs], dtype=np.int64
        )

    rng = np.random.default_rng(cfg.seed + 1)
    cdf = _noise_cdf(vocab)
    total_updates = cfg.epochs * len(pairs)
    update_no = 0
    negative_sampling = cfg.softmax_mode is SoftmaxMode.NEGATIVE_SAMPLING
    for _ in range(cfg.epochs):
        order = rng.permutation(len(pairs))
        if negative_sampling:
            negatives = np.searchsorted(
                cdf, rng.random((len(pairs), cfg.negatives))
            )
        for step, i in enumerate(order):
            lr = cfg.learning_rate * max(
                1e-4, 1.0 - update_no / total_updates
            )
            update_no += 1
            if negative_sampling:
                _ns_update(model, centers[i], contexts[i], slots[i],
                           negatives[step], lr)
            else:
                _full_softmax_update(model, centers[i], contexts[i],
                                     slots[i], lr)
    return model


def _ns_update(model: EmbeddingModel, c: int, o: int, slot: int,
               negatives: np.ndarray, lr: float) -> None:
    inputs = model.input_vectors
    matrix = model.output_matrices[slot]
    targets = np.concatenate(([o], negatives))           # (1+k,)
    labels = np.zeros(len(targets))
    labels[0] = 1.0
    v = inputs[c]                                        # (d,)
    u = matrix[targets]                                  # (1+k, d)
    g = (_sigmoid(u @ v) - labels) * lr
    dv = g @ u
    np.subtract.at(matrix, targets, g[:, None] * v)
    inputs[c] -= dv


def _full_softmax_update(model: EmbeddingModel, c: int, o: int, slot: int,
                         lr: float) -> None:
    inputs = model.input_vectors
    matrix = model.output_matrices[slot]
    v = inputs[c]                                        # (d,)
    scores = matrix @ v                                  # (|W|,)
    scores -= scores.max()
    p = np.exp(scores)
    p /= p.sum()
    p[o] -= 1.0
    dv = p @ matrix
    matrix -= lr * np.outer(p, v)
    inputs[c] -= lr * dv


def softmax_probability(model: EmbeddingModel, center, context,
                        relative_position: int = 1) -> float:
    """Exact softmax probability of ``context`` given ``center``.

    Token arguments may be vocabulary indices or token texts.  In
    structured mode the probability depends on the relative position.
    """
    ci = center if isinstance(center, int) else model.vocab.index[center]
    oi = context if isinstance(context, int) else model.vocab.index[context]
    matrix = model.output_matrices[model.matrix_index(relative_position)]
    scores = matrix @ model.input_vectors[ci]
    scores -= scores.max()
    p = np.exp(scores)
    return float(p[oi] / p.sum())


def full_softmax_objective(input_vectors: np.ndarray,
                           output_matrices: np.ndarray,
                           pairs, window: int, structured: bool):
    """Mean negative log softmax likelihood over pairs, with exact
    gradients for every parameter.  Used by the finite-difference checks.
    """
    grad_in = np.zeros_like(input_vectors)
    grad_out = np.zeros_like(output_matrices)
    loss = 0.0
    for center, context, rel in pairs:
        slot = position_slot(rel, window) if structured else 0
        matrix = output_matrices[slot]
        v = input_vectors[center]
        scores = matrix @ v
        scores = scores - scores.max()
        e = np.exp(scores)
        p = e / e.sum()
        loss -= np.log(p[context])
        delta = p.copy()
        delta[context] -= 1.0
        grad_out[slot] += np.outer(delta, v)
        grad_in[center] += matrix.T @ delta
    scale = 1.0 / len(pairs)
    return loss * scale, grad_in * scale, grad_out * scale


EMB_MAGIC = "#qtwalk-emb v1"


@dataclass(frozen=True)
class WordVectors:
    """Token-to-vector lookup loaded from an embedding file."""

    tokens: tuple[str, ...]
    vectors: np.ndarray
    index: dict[str, int] = field(repr=False)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def __getitem__(self, token: str) -> np.ndarray:
        return self.vectors[self.index[token]]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def save_embeddings(model: EmbeddingModel, path,
                    include_outputs: bool = False) -> None:
    """Write token input vectors; floats in shortest round-trip form."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            f"{EMB_MAGIC} count={len(model.vocab)} dim={model.dim} "
            f"mode={model.mode.value}\n"
        )
        for i, token in enumerate(model.vocab.tokens):
            row = " ".join(repr(float(x)) for x in model.input_vectors[i])
            fh.write(f"{token}\t{row}\n")
    if include_outputs:
        np.savez_compressed(str(path) + ".out.npz",
                            output_matrices=model.output_matrices)


def load_embeddings(path) -> WordVectors:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(EMB_MAGIC):
            raise ValueError(f"{path}: not an embedding file")
        fields = dict(
            part.split("=", 1) for part in header[len(EMB_MAGIC):].split()
        )
        count, dim = int(fields["count"]), int(fields["dim"])
        tokens: list[str] = []
        rows: list[list[float]] = []
        for line in fh:
            if not line.strip():
                continue
            token, _, values = line.rstrip("\n").partition("\t")
            row = [float(x) for x in values.split(" ")]
            if len(row) != dim:
                raise DimensionMismatch(
                    f"{path}: token {token!r} has {len(row)} values, "
                    f"expected {dim}"
                )
            tokens.append(token)
            rows.append(row)
    if len(tokens) != count:
        raise DimensionMismatch(
            f"{path}: header declares {count} tokens, found {len(tokens)}"
        )
    vectors = np.array(rows) if rows else np.zeros((0, dim))
    return WordVectors(
        tokens=tuple(tokens),
        vectors=vectors,
        index={t: i for i, t in enumerate(tokens)},
    )
