"""Embedding evaluation: classification, clustering, entity relatedness,
and QT similarity against TSV gold-standard files.

Classification uses 3-nearest-neighbour (cosine distance) with stratified
10-fold cross-validation; clustering uses seeded k-means scored under the
optimal cluster-to-label assignment; relatedness uses mean Kendall tau-b
over per-seed rankings; similarity reports Pearson, Spearman, and their
harmonic mean.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import kendalltau, pearsonr, spearmanr

from .skipgram import DimensionMismatch, WordVectors


class MissingSeed(KeyError):
    pass


class MissingToken(KeyError):
    pass


class TooFewPerClass(ValueError):
    pass


@dataclass(frozen=True)
class LabeledSet:
    records: tuple[tuple[str, str], ...]

    @property
    def labels(self) -> list[str]:
        return sorted({label for _, label in self.records})


@dataclass(frozen=True)
class RelatednessGold:
    records: tuple[tuple[str, tuple[str, ...]], ...]


@dataclass(frozen=True)
class SimilarityGold:
    records: tuple[tuple[str, str, float], ...]


@dataclass
class EvalReport:
    task: str
    metrics: dict[str, float]
    details: dict[str, object] = field(default_factory=dict)
    config_echo: dict[str, object] = field(default_factory=dict)

    def rows(self) -> list[tuple[str, str, str]]:
        return [(self.task, name, repr(value))
                for name, value in self.metrics.items()]


def reports_tsv(reports) -> str:
    return "".join(
        f"{task}\t{metric}\t{value}\n"
        for report in reports
        for task, metric, value in report.rows()
    )


# -- gold-standard files -----------------------------------------------------

def load_labeled_tsv(path) -> LabeledSet:
    records: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            token, _, label = line.partition("\t")
            if token in seen:
                raise ValueError(f"{path}: duplicate token {token!r}")
            seen.add(token)
            records.append((token, label))
    return LabeledSet(tuple(records))


def load_relatedness(path) -> RelatednessGold:
    """Blocks of a seed line followed by 10 indented candidates in rank
    order."""
    records: list[tuple[str, tuple[str, ...]]] = []
    seed: str | None = None
    candidates: list[str] = []

    def _flush():
        if seed is None:
            return
        if len(candidates) != 10:
            raise ValueError(
                f"{path}: seed {seed!r} has {len(candidates)} candidates, "
                "expected 10"
            )
        records.append((seed, tuple(candidates)))

    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            if line[0] in " \t":
                candidates.append(line.strip())
            else:
                _flush()
                seed = line.strip()
                candidates = []
    _flush()
    return RelatednessGold(tuple(records))


def load_similarity(path) -> SimilarityGold:
    records: list[tuple[str, str, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            qt1, qt2, score = line.split("\t")
            records.append((qt1, qt2, float(score)))
    return SimilarityGold(tuple(records))


# -- metrics -----------------------------------------------------------------

def cosine_similarity(u, v) -> float:
    """u.v / (|u||v|); 0.0 when either vector is all zeros."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"{u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def kendall_tau_b(x, y) -> float:
    return float(kendalltau(x, y, variant="b").statistic)


def pearson(x, y) -> float:
    return float(pearsonr(x, y).statistic)


def spearman(x, y) -> float:
    return float(spearmanr(x, y).statistic)


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Pair-counting ARI over two partitions of the same items."""
    a_ids = {v: i for i, v in enumerate(dict.fromkeys(labels_a))}
    b_ids = {v: i for i, v in enumerate(dict.fromkeys(labels_b))}
    table = np.zeros((len(a_ids), len(b_ids)), dtype=np.int64)
    for a, b in zip(labels_a, labels_b, strict=True):
        table[a_ids[a], b_ids[b]] += 1

    def _comb2(x):
        return x * (x - 1) // 2

    sum_cells = sum(_comb2(int(v)) for v in table.ravel())
    sum_rows = sum(_comb2(int(v)) for v in table.sum(axis=1))
    sum_cols = sum(_comb2(int(v)) for v in table.sum(axis=0))
    n_pairs = _comb2(len(labels_a))
    expected = sum_rows * sum_cols / n_pairs if n_pairs else 0.0
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


def clustering_accuracy(cluster_ids, labels) -> float:
    """Accuracy under the maximum-weight cluster-to-label assignment."""
    c_ids = {v: i for i, v in enumerate(dict.fromkeys(cluster_ids))}
    l_ids = {v: i for i, v in enumerate(dict.fromkeys(labels))}
    table = np.zeros((len(c_ids), len(l_ids)), dtype=np.int64)
    for c, l in zip(cluster_ids, labels, strict=True):
        table[c_ids[c], l_ids[l]] += 1
    rows, cols = linear_sum_assignment(-table)
    return float(table[rows, cols].sum() / len(labels))


# -- k-means ------------------------------------------------------------------

def kmeans(x: np.ndarray, k: int, restarts: int = 10, seed: int = 0,
           max_iter: int = 100) -> np.ndarray:
    """Seeded Lloyd's algorithm with k-means++ init; best of ``restarts``."""
    rng = np.random.default_rng(seed)
    best_inertia = np.inf
    best_assign = np.zeros(len(x), dtype=np.int64)
    for _ in range(restarts):
        centers = _kmeanspp(x, k, rng)
        assign = np.full(len(x), -1, dtype=np.int64)
        for _ in range(max_iter):
            dists = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_assign = dists.argmin(axis=1)
            if np.array_equal(new_assign, assign):
                break
            assign = new_assign
            for c in range(k):
                members = x[assign == c]
                if len(members):
                    centers[c] = members.mean(axis=0)
        inertia = float(
            ((x - centers[assign]) ** 2).sum()
        )
        if inertia < best_inertia:
            best_inertia = inertia
            best_assign = assign
    return best_assign


def _kmeanspp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = [x[rng.integers(len(x))]]
    for _ in range(1, k):
        d2 = np.min(
            [((x - c) ** 2).sum(axis=1) for c in centers], axis=0
        )
        total = d2.sum()
        if total == 0:
            centers.append(x[rng.integers(len(x))])
            continue
        probs = d2 / total
        centers.append(x[rng.choice(len(x), p=probs)])
    return np.array(centers, dtype=np.float64)


# -- k-NN classification -------------------------------------------------------

def stratified_folds(labels: list[str], k: int, seed: int) -> list[int]:
    """Deterministic fold id per record; stratified round-robin."""
    rng = random.Random(seed)
    fold_of = [0] * len(labels)
    by_label: dict[str, list[int]] = {}
    for i, label in enumerate(labels):
        by_label.setdefault(label, []).append(i)
    for label in sorted(by_label):
        idxs = by_label[label]
        rng.shuffle(idxs)
        for j, i in enumerate(idxs):
            fold_of[i] = j % k
    return fold_of


def knn_predict(train_x: np.ndarray, train_y: list[str], query: np.ndarray,
                k: int = 3) -> str:
    """Majority vote of the k nearest by cosine; ties go to the single
    nearest neighbour's label."""
    sims = np.array([cosine_similarity(query, v) for v in train_x])
    nearest = np.argsort(-sims, kind="stable")[:k]
    votes: dict[str, int] = {}
    for i in nearest:
        votes[train_y[i]] = votes.get(train_y[i], 0) + 1
    top = max(votes.values())
    winners = [label for label, count in votes.items() if count == top]
    if len(winners) == 1:
        return winners[0]
    return train_y[nearest[0]]


def _resolve_tokens(emb: WordVectors, tokens) -> tuple[list[str], list[str]]:
    present = [t for t in tokens if t in emb]
    missing = [t for t in tokens if t not in emb]
    if len(present) < 0.9 * len(tokens):
        raise MissingToken(
            f"only {len(present)}/{len(tokens)} gold tokens present in the "
            "embedding"
        )
    return present, missing


# -- tasks ----------------------------------------------------------------------

def eval_classification(emb: WordVectors, gold: LabeledSet, seed: int = 0,
                        folds: int = 10, k: int = 3,
                        config_echo: dict | None = None) -> EvalReport:
    tokens = [t for t, _ in gold.records]
    present, missing = _resolve_tokens(emb, tokens)
    label_of = dict(gold.records)
    labels = [label_of[t] for t in present]
    per_class: dict[str, int] = {}
    for label in labels:
        per_class[label] = per_class.get(label, 0) + 1
    small = {l: c for l, c in per_class.items() if c < folds}
    if small:
        raise TooFewPerClass(f"classes below {folds} members: {small}")

    x = np.array([emb[t] for t in present])
    fold_of = stratified_folds(labels, folds, seed)
    correct = 0
    for fold in range(folds):
        train_idx = [i for i in range(len(present)) if fold_of[i] != fold]
        test_idx = [i for i in range(len(present)) if fold_of[i] == fold]
        train_x = x[train_idx]
        train_y = [labels[i] for i in train_idx]
        for i in test_idx:
            if knn_predict(train_x, train_y, x[i], k=k) == labels[i]:
                correct += 1
    return EvalReport(
        task="classification",
        metrics={"accuracy": correct / len(present)},
        details={"missing_tokens": missing, "folds": folds, "k": k},
        config_echo=dict(config_echo or {}),
    )


def eval_clustering(emb: WordVectors, gold: LabeledSet, seed: int = 0,
                    restarts: int = 10,
                    config_echo: dict | None = None) -> EvalReport:
    tokens = [t for t, _ in gold.records]
    present, missing = _resolve_tokens(emb, tokens)
    label_of = dict(gold.records)
    labels = [label_of[t] for t in present]
    x = np.array([emb[t] for t in present])
    k = len(set(labels))
    assign = kmeans(x, k, restarts=restarts, seed=seed)
    return EvalReport(
        task="clustering",
        metrics={
            "accuracy": clustering_accuracy(list(assign), labels),
            "adjusted_rand_index": adjusted_rand_index(list(assign), labels),
        },
        details={"missing_tokens": missing, "k": k},
        config_echo=dict(config_echo or {}),
    )


def eval_relatedness(emb: WordVectors, gold: RelatednessGold,
                     config_echo: dict | None = None) -> EvalReport:
    taus: list[float] = []
    for seed_token, candidates in gold.records:
        if seed_token not in emb:
            raise MissingSeed(seed_token)
        usable = [c for c in candidates if c in emb]
        if len(usable) < 2:
            raise MissingToken(
                f"seed {seed_token!r}: too few candidates in embedding"
            )
        sims = [cosine_similarity(emb[seed_token], emb[c]) for c in usable]
        gold_rank = list(range(len(usable)))
        predicted_rank = np.argsort(np.argsort([-s for s in sims],
                                               kind="stable"), kind="stable")
        taus.append(kendall_tau_b(gold_rank, list(predicted_rank)))
    return EvalReport(
        task="entity_relatedness",
        metrics={"kendall_tau": float(np.mean(taus))},
        details={"seeds": len(gold.records), "variant": "tau-b"},
        config_echo=dict(config_echo or {}),
    )


def eval_qt_similarity(emb: WordVectors, gold: SimilarityGold,
                       config_echo: dict | None = None) -> EvalReport:
    predicted: list[float] = []
    expected: list[float] = []
    for qt1, qt2, score in gold.records:
        if qt1 not in emb or qt2 not in emb:
            raise MissingToken(f"{qt1!r} / {qt2!r}")
        predicted.append(cosine_similarity(emb[qt1], emb[qt2]))
        expected.append(score)
    p = pearson(predicted, expected)
    s = spearman(predicted, expected)
    degenerate = p <= 0.0 or s <= 0.0
    hmean = 0.0 if degenerate else 2.0 * p * s / (p + s)
    return EvalReport(
        task="qt_similarity",
        metrics={"pearson": p, "spearman": s, "harmonic_mean": hmean},
        details={"pairs": len(gold.records), "degenerate": degenerate},
        config_echo=dict(config_echo or {}),
    )
