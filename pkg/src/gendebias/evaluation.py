"""Quality and bias evaluation: word similarity, word translation,
gendered translation-by-analogy, and projection exports."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .directions import GenderDirections
from .embeddings import BilingualSpace, EmbeddingSpace
from .lexicon import AnalogyQuery, BilingualDictionary, OccupationPair

logger = logging.getLogger(__name__)

MIN_SIMILARITY_ROWS = 5
CSLS_NEIGHBORHOOD = 10


@dataclass(frozen=True)
class EvalReport:
    """One evaluation run: task name, metric map, coverage in [0, 1]."""

    task: str
    metrics: dict[str, float]
    coverage: float
    config_digest: str = ""
    details: tuple = field(default_factory=tuple, repr=False)

    def __post_init__(self):
        if not (0.0 <= self.coverage <= 1.0):
            raise ValueError(f"coverage out of range: {self.coverage}")
        for key, value in self.metrics.items():
            if key.startswith("p_at_") and not (0.0 <= value <= 100.0):
                raise ValueError(f"{key} out of range: {value}")
            if key.endswith("mrr") and not (0.0 <= value <= 1.0):
                raise ValueError(f"{key} out of range: {value}")

    def to_json_dict(self) -> dict:
        return {
            "task": self.task,
            "metrics": {k: float(v) for k, v in self.metrics.items()},
            "coverage": float(self.coverage),
            "config_digest": self.config_digest,
        }


def word_similarity_eval(space: EmbeddingSpace,
                         dataset: Sequence[tuple[str, str, float]],
                         ) -> EvalReport:
    """Pearson correlation between model cosines and human scores over the
    covered rows of a similarity dataset."""
    if not dataset:
        raise ValueError("empty similarity dataset")
    model, human = [], []
    for w1, w2, score in dataset:
        if w1 in space and w2 in space:
            v1 = space.vector(w1)
            v2 = space.vector(w2)
            n1 = np.linalg.norm(v1)
            n2 = np.linalg.norm(v2)
            if n1 == 0.0 or n2 == 0.0:
                continue
            model.append(float(v1 @ v2 / (n1 * n2)))
            human.append(score)
    if len(model) < MIN_SIMILARITY_ROWS:
        raise ValueError(f"only {len(model)} of {len(dataset)} rows covered; "
                         f"need at least {MIN_SIMILARITY_ROWS}")
    r, _ = stats.pearsonr(model, human)
    return EvalReport(task="word_similarity",
                      metrics={"pearson_r": float(r), "n_pairs": float(len(model))},
                      coverage=len(model) / len(dataset))


def _topk_rows(scores: np.ndarray, lex_rank: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k best columns per row, ties broken by lex_rank."""
    out = np.empty((scores.shape[0], min(k, scores.shape[1])), dtype=np.intp)
    for i, row in enumerate(scores):
        order = np.lexsort((lex_rank, -row))
        out[i] = order[:out.shape[1]]
    return out


def _mean_topk(scores: np.ndarray, k: int) -> np.ndarray:
    """Row-wise mean of the k largest entries."""
    k = min(k, scores.shape[1])
    part = np.partition(scores, scores.shape[1] - k, axis=1)
    return part[:, -k:].mean(axis=1)


def _csls_adjustment(bi: BilingualSpace) -> np.ndarray:
    """Per-target mean cosine to its CSLS_NEIGHBORHOOD nearest mapped-source
    vectors, computed in chunks against the full source vocabulary."""
    src = bi.source.matrix / bi.source.row_norms()[:, None]
    tgt = bi.target.matrix / bi.target.row_norms()[:, None]
    r_tgt = np.empty(len(bi.target))
    chunk = 1024
    for start in range(0, len(bi.target), chunk):
        block = tgt[start:start + chunk] @ src.T
        r_tgt[start:start + chunk] = _mean_topk(block, CSLS_NEIGHBORHOOD)
    return r_tgt


@dataclass(frozen=True)
class TranslationDetail:
    source: str
    gold: tuple[str, ...]
    retrieved: tuple[str, ...]
    hit_rank: int  # 0 = miss within the retrieved window


def word_translation_eval(bi: BilingualSpace, dictionary: BilingualDictionary,
                          ks: Sequence[int] = (1, 5),
                          csls: bool = False) -> EvalReport:
    """Precision@k of dictionary translation by nearest neighbor retrieval.

    A query counts as a hit at k when ANY of its gold translations appears
    in the top k.  Queries whose source word is out of vocabulary are
    skipped and reported through coverage.  With csls=True scores are
    adjusted by the mean similarity of each target to its 10 nearest
    mapped-source neighbors (and of each query to its 10 nearest targets).
    """
    ks = sorted(set(int(k) for k in ks))
    if not ks or ks[0] < 1:
        raise ValueError(f"invalid k list: {ks}")
    kmax = ks[-1]
    entries = [(w, set(golds)) for w, golds in dictionary.items() if w in bi.source]
    if not entries:
        raise ValueError("no dictionary entry has its source word in the space")
    src_rows = bi.source.matrix[bi.source.indices([w for w, _ in entries])]
    norms = np.linalg.norm(src_rows, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero vector among query words")
    src_rows = src_rows / norms[:, None]
    tgt = bi.target.matrix / bi.target.row_norms()[:, None]
    scores = src_rows @ tgt.T
    if csls:
        r_src = _mean_topk(scores, CSLS_NEIGHBORHOOD)
        r_tgt = _csls_adjustment(bi)
        scores = 2.0 * scores - r_src[:, None] - r_tgt[None, :]
    top = _topk_rows(scores, bi.target.lex_rank(), kmax)
    hits = {k: 0 for k in ks}
    details = []
    tgt_words = bi.target.words
    for row, (word, golds) in enumerate(entries):
        retrieved = tuple(tgt_words[j] for j in top[row])
        hit_rank = 0
        for pos, cand in enumerate(retrieved, start=1):
            if cand in golds:
                hit_rank = pos
                break
        for k in ks:
            if 0 < hit_rank <= k:
                hits[k] += 1
        details.append(TranslationDetail(source=word, gold=tuple(sorted(golds)),
                                         retrieved=retrieved, hit_rank=hit_rank))
    metrics = {f"p_at_{k}": 100.0 * hits[k] / len(entries) for k in ks}
    metrics["n_queries"] = float(len(entries))
    return EvalReport(task="word_translation", metrics=metrics,
                      coverage=len(entries) / len(dictionary),
                      details=tuple(details))


def _rank_of(scores: np.ndarray, gold_idx: int, candidate_mask: np.ndarray,
             lex_rank: np.ndarray) -> int:
    """1-based rank of the gold among masked candidates: strictly better
    scores first, equal scores broken by ascending lexicographic order."""
    gold_score = scores[gold_idx]
    better = candidate_mask & (scores > gold_score)
    tied = candidate_mask & (scores == gold_score) & (lex_rank < lex_rank[gold_idx])
    return 1 + int(np.count_nonzero(better)) + int(np.count_nonzero(tied))


def pair_translation_eval(bi: BilingualSpace, queries: Sequence[AnalogyQuery],
                          occupation_pairs: Sequence[OccupationPair] | None = None,
                          restrict_to: Sequence[str] | None = None) -> EvalReport:
    """Gendered translation-by-analogy over a co-embedded bilingual space.

    Each query ranks source-language candidates by cosine to
    v(english_target) - v(english_context) + v(source_context); the three
    context words are excluded from the candidates (the gold never is).
    Reports mean reciprocal rank per gold gender and their absolute gap.
    With occupation_pairs given, adds the anchor symmetry deviation: the
    mean over English-annotated pairs of |cos(w_m, e) - cos(w_f, e)|.
    restrict_to narrows the candidate pool for fast smoke tests.
    """
    if not queries:
        raise ValueError("no analogy queries given")
    src = bi.source
    src_unit = src.matrix / src.row_norms()[:, None]
    lex_rank = src.lex_rank()
    base_mask = np.zeros(len(src), dtype=bool)
    if restrict_to is None:
        base_mask[:] = True
    else:
        for w in restrict_to:
            if w in src:
                base_mask[src.index(w)] = True
        if not base_mask.any():
            raise ValueError("restrict_to leaves no candidates")
    rr: dict[str, list[float]] = {"masculine": [], "feminine": []}
    skipped = 0
    for q in queries:
        if (q.english_context not in bi.target or q.english_target not in bi.target
                or q.source_context not in src or q.gold not in src):
            skipped += 1
            continue
        target_vec = (bi.target.vector(q.english_target)
                      - bi.target.vector(q.english_context)
                      + src.vector(q.source_context))
        norm = np.linalg.norm(target_vec)
        if norm == 0.0:
            skipped += 1
            continue
        scores = src_unit @ (target_vec / norm)
        mask = base_mask.copy()
        for w in (q.source_context,):
            mask[src.index(w)] = False
        for w in (q.english_context, q.english_target):
            if w in src:
                mask[src.index(w)] = False
        gold_idx = src.index(q.gold)
        mask[gold_idx] = True  # the gold is always a candidate
        rank = _rank_of(scores, gold_idx, mask, lex_rank)
        rr[q.gold_gender].append(1.0 / rank)
    n_resolved = len(rr["masculine"]) + len(rr["feminine"])
    if n_resolved == 0:
        raise ValueError("no analogy query could be resolved against the spaces")
    if skipped:
        logger.info("pair translation: skipped %d of %d queries (missing words)",
                    skipped, len(queries))
    metrics: dict[str, float] = {"n_queries": float(n_resolved)}
    if rr["feminine"]:
        metrics["f_mrr"] = float(np.mean(rr["feminine"]))
    if rr["masculine"]:
        metrics["m_mrr"] = float(np.mean(rr["masculine"]))
    if rr["feminine"] and rr["masculine"]:
        metrics["mrr_diff"] = abs(metrics["m_mrr"] - metrics["f_mrr"])
    if occupation_pairs is not None:
        deviations = []
        for pair in occupation_pairs:
            if pair.english is None:
                continue
            if (pair.english not in bi.target or pair.masculine not in src
                    or pair.feminine not in src):
                continue
            e = bi.target.vector(pair.english)
            ne = np.linalg.norm(e)
            vm = src.vector(pair.masculine)
            vf = src.vector(pair.feminine)
            nm = np.linalg.norm(vm)
            nf = np.linalg.norm(vf)
            if ne == 0.0 or nm == 0.0 or nf == 0.0:
                continue
            deviations.append(abs(float(vm @ e / (nm * ne))
                                  - float(vf @ e / (nf * ne))))
        if not deviations:
            raise ValueError("anchor symmetry deviation requested but no "
                             "English-annotated occupation pair is covered")
        metrics["asd"] = float(np.mean(deviations))
    return EvalReport(task="pair_translation", metrics=metrics,
                      coverage=n_resolved / len(queries))


def export_projections(space: EmbeddingSpace,
                       annotated_words: Sequence[tuple[str, str]],
                       directions: GenderDirections,
                       ) -> tuple[list[tuple[str, str, float, float]], list[str]]:
    """Rows of (word, group, grammatical projection, semantic projection)
    in the input order.  Missing words are skipped and returned separately."""
    rows = []
    skipped = []
    for word, group in annotated_words:
        if word not in space:
            skipped.append(word)
            continue
        v = space.vector(word)
        rows.append((word, group, float(v @ directions.d_g),
                     float(v @ directions.d_s)))
    if skipped:
        logger.info("projection export skipped %d missing words", len(skipped))
    return rows, skipped


def write_projections_csv(rows: Sequence[tuple[str, str, float, float]], path,
                          meta: str | None = None) -> None:
    """Write projection rows with the header
    word,group,grammatical_proj,semantic_proj (optional # meta line first)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        if meta is not None:
            fh.write(f"# {meta}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["word", "group", "grammatical_proj", "semantic_proj"])
        for word, group, g_proj, s_proj in rows:
            writer.writerow([word, group, repr(float(g_proj)), repr(float(s_proj))])


def write_translation_csv(details: Sequence[TranslationDetail], path,
                          meta: str | None = None) -> None:
    """Per-query translation detail: source, gold set, retrieved list, the
    1-based rank of the first gold hit (0 = miss)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        if meta is not None:
            fh.write(f"# {meta}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "gold", "retrieved", "hit_rank"])
        for d in details:
            writer.writerow([d.source, "|".join(d.gold), "|".join(d.retrieved),
                             d.hit_rank])
