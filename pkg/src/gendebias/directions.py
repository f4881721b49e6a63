"""Gender direction geometry.

Two directions are extracted per space and then decoupled:

* the semantic direction, the top principal component of mean-centered
  (feminine - masculine) definitional difference vectors, oriented so that
  the feminine side is positive;
* the grammatical direction, a two-class ridge LDA over grammatically
  masculine vs. feminine noun lists, same orientation convention.

The semantic direction is orthogonalized against the grammatical one so
that projections onto it measure semantic gender with the grammatical
component removed.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .embeddings import BilingualSpace, EmbeddingSpace

logger = logging.getLogger(__name__)

POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000
DEFAULT_RIDGE = 1e-3

# Residual threshold below which mean-centered differences count as identical.
_DEGENERATE_TOL = 1e-12


def project(vector: np.ndarray, direction: np.ndarray) -> float:
    """Scalar projection <vector, direction>."""
    vector = np.asarray(vector, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    if vector.shape != direction.shape:
        raise ValueError(f"dimension mismatch: {vector.shape} vs {direction.shape}")
    return float(np.dot(vector, direction))


def _top_component(cov: np.ndarray) -> tuple[np.ndarray, float]:
    """Dominant eigenpair of a PSD matrix by power iteration.

    Deterministic: the start vector is the normalized all-ones vector, the
    iteration stops when successive iterates differ by at most POWER_TOL.
    """
    n = cov.shape[0]
    v = np.ones(n) / np.sqrt(n)
    for _ in range(POWER_MAX_ITER):
        w = cov @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # zero matrix: any unit vector is an eigenvector with eigenvalue 0
            return v, 0.0
        w = w / nw
        delta = np.linalg.norm(w - v)
        v = w
        if delta <= POWER_TOL:
            break
    else:
        logger.warning("power iteration did not converge to %g in %d steps",
                       POWER_TOL, POWER_MAX_ITER)
    return v, float(v @ cov @ v)


def _dedupe_pairs(pairs: Sequence[tuple[str, str]]) -> list[tuple[str, str]]:
    seen: set[tuple[str, str]] = set()
    out = []
    for p in pairs:
        key = (p[0], p[1])
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def _difference_rows(space: EmbeddingSpace,
                     pairs: Sequence[tuple[str, str]]) -> np.ndarray:
    rows = []
    for m, f in pairs:
        rows.append(space.vector(f) - space.vector(m))
    return np.vstack(rows)


def _pca_over_differences(diffs: np.ndarray) -> tuple[np.ndarray, float]:
    """Oriented top principal component of mean-centered difference rows."""
    mean_diff = diffs.mean(axis=0)
    centered = diffs - mean_diff
    if np.all(np.linalg.norm(centered, axis=1) <= _DEGENERATE_TOL):
        # all differences identical: the common difference is the direction
        norm = np.linalg.norm(mean_diff)
        if norm == 0.0:
            raise ValueError("definitional differences are all zero")
        return mean_diff / norm, 1.0
    cov = centered.T @ centered / diffs.shape[0]
    direction, top_eig = _top_component(cov)
    total = float(np.trace(cov))
    explained = top_eig / total if total > 0.0 else 1.0
    if np.dot(mean_diff, direction) < 0.0:
        direction = -direction
    return direction, float(explained)


def semantic_direction(space: EmbeddingSpace,
                       definitional_pairs: Sequence[tuple[str, str]],
                       ) -> tuple[np.ndarray, float]:
    """Top principal component of mean-centered (feminine - masculine)
    definitional differences.

    Returns (unit direction, explained variance ratio).  The sign is fixed
    so that <mean(feminine) - mean(masculine), direction> >= 0.  Pairs not
    fully covered by the space are skipped; duplicates count once.
    """
    pairs = _dedupe_pairs(definitional_pairs)
    usable = [(m, f) for m, f in pairs if m in space and f in space]
    if len(usable) < 2:
        raise ValueError(f"need at least 2 covered definitional pairs, "
                         f"have {len(usable)}")
    return _pca_over_differences(_difference_rows(space, usable))


def grammatical_direction(space: EmbeddingSpace,
                          masculine: Sequence[str],
                          feminine: Sequence[str],
                          ridge: float = DEFAULT_RIDGE) -> np.ndarray:
    """Two-class LDA direction between grammatical noun classes.

    Solves (Sigma_pooled + eps*I) d = mu_fem - mu_masc with
    eps = ridge * trace(Sigma_pooled) / dim, normalizes d, and orients it so
    feminine nouns project higher on average than masculine ones.  ridge is
    the relative shrinkage coefficient; 0 disables regularization and then a
    rank-deficient pooled covariance is an error.
    """
    if ridge < 0.0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    masc = [w for w in masculine if w in space]
    fem = [w for w in feminine if w in space]
    if len(masc) < 2 or len(fem) < 2:
        raise ValueError(f"need at least 2 covered nouns per class, "
                         f"have {len(masc)} masculine / {len(fem)} feminine")
    dim = space.dim
    if min(len(masc), len(fem)) < dim / 10:
        logger.warning("small noun classes for LDA (%d/%d words, dim %d)",
                       len(masc), len(fem), dim)
    xm = space.matrix[space.indices(masc)]
    xf = space.matrix[space.indices(fem)]
    mu_m = xm.mean(axis=0)
    mu_f = xf.mean(axis=0)
    cm = xm - mu_m
    cf = xf - mu_f
    pooled = (cm.T @ cm + cf.T @ cf) / (len(masc) + len(fem) - 2)
    eps = ridge * float(np.trace(pooled)) / dim
    if eps == 0.0 and np.linalg.matrix_rank(pooled) < dim:
        raise ValueError("pooled covariance is rank-deficient; "
                         "set ridge > 0 to regularize")
    system = pooled + eps * np.eye(dim)
    try:
        d = np.linalg.solve(system, mu_f - mu_m)
    except np.linalg.LinAlgError as e:
        raise ValueError(f"singular LDA system even after ridge: {e}") from None
    norm = np.linalg.norm(d)
    if norm == 0.0:
        raise ValueError("grammatical class means coincide; direction undefined")
    d = d / norm
    if float(xf.mean(axis=0) @ d) < float(xm.mean(axis=0) @ d):
        d = -d
    return d


def lda_cross_validation(space: EmbeddingSpace,
                         masculine: Sequence[str],
                         feminine: Sequence[str],
                         folds: int = 5,
                         seed: int = 0,
                         ridge: float = DEFAULT_RIDGE) -> float:
    """Stratified k-fold accuracy of the LDA projection classifier.

    The fold classifier thresholds the projection at the midpoint of the two
    training-class mean projections.  Deterministic for a fixed seed.
    """
    if folds < 2:
        raise ValueError(f"need at least 2 folds, got {folds}")
    masc = [w for w in masculine if w in space]
    fem = [w for w in feminine if w in space]
    if len(masc) < folds or len(fem) < folds:
        raise ValueError(f"need at least {folds} covered words per class, "
                         f"have {len(masc)}/{len(fem)}")
    rng = np.random.default_rng(seed)
    masc_idx = rng.permutation(len(masc))
    fem_idx = rng.permutation(len(fem))
    masc_folds = np.array_split(masc_idx, folds)
    fem_folds = np.array_split(fem_idx, folds)
    correct = 0
    total = 0
    for k in range(folds):
        test_m = [masc[i] for i in masc_folds[k]]
        test_f = [fem[i] for i in fem_folds[k]]
        train_m = [masc[i] for j in range(folds) if j != k for i in masc_folds[j]]
        train_f = [fem[i] for j in range(folds) if j != k for i in fem_folds[j]]
        d = grammatical_direction(space, train_m, train_f, ridge=ridge)
        proj_m = space.matrix[space.indices(train_m)] @ d
        proj_f = space.matrix[space.indices(train_f)] @ d
        threshold = (proj_m.mean() + proj_f.mean()) / 2.0
        for w in test_m:
            correct += int(float(space.vector(w) @ d) <= threshold)
            total += 1
        for w in test_f:
            correct += int(float(space.vector(w) @ d) > threshold)
            total += 1
    return correct / total


def orthogonalize(d_pca: np.ndarray, d_g: np.ndarray) -> np.ndarray:
    """Remove the grammatical component from the semantic direction and
    renormalize.  Errors when the two directions are numerically parallel."""
    d_pca = np.asarray(d_pca, dtype=np.float64)
    d_g = np.asarray(d_g, dtype=np.float64)
    for name, d in (("d_pca", d_pca), ("d_g", d_g)):
        if abs(np.linalg.norm(d) - 1.0) > 1e-6:
            raise ValueError(f"{name} must be unit-norm")
    overlap = float(np.dot(d_pca, d_g))
    if abs(overlap) >= 1.0 - 1e-9:
        raise ValueError(f"directions are parallel (|overlap| = {abs(overlap):.12f}); "
                         f"semantic residual undefined")
    residual = d_pca - overlap * d_g
    return residual / np.linalg.norm(residual)


@dataclass(frozen=True)
class GenderDirections:
    """The direction bundle every downstream stage consumes.

    d_pca   semantic direction before orthogonalization
    d_g     grammatical (LDA) direction
    d_s     semantic direction with the grammatical component removed
    """

    d_pca: np.ndarray
    d_g: np.ndarray
    d_s: np.ndarray
    pca_explained_ratio: float
    overlap: float
    lda_cv_accuracy: float | None = None

    def __post_init__(self):
        for name in ("d_pca", "d_g", "d_s"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            if abs(np.linalg.norm(arr) - 1.0) > 1e-9:
                raise ValueError(f"{name} is not unit-norm")
        if self.d_pca.shape != self.d_g.shape or self.d_g.shape != self.d_s.shape:
            raise ValueError("direction dimensions disagree")
        if abs(float(np.dot(self.d_s, self.d_g))) > 1e-6:
            raise ValueError("d_s is not orthogonal to d_g")

    @property
    def dim(self) -> int:
        return self.d_pca.shape[0]

    def to_json_dict(self) -> dict:
        d = {
            "d_pca": [float(x) for x in self.d_pca],
            "d_g": [float(x) for x in self.d_g],
            "d_s": [float(x) for x in self.d_s],
            "pca_explained_ratio": float(self.pca_explained_ratio),
            "overlap": float(self.overlap),
        }
        if self.lda_cv_accuracy is not None:
            d["lda_cv_accuracy"] = float(self.lda_cv_accuracy)
        return d

    def save_json(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n",
            encoding="utf-8")

    @classmethod
    def from_json_dict(cls, d: dict) -> "GenderDirections":
        return cls(
            d_pca=np.array(d["d_pca"], dtype=np.float64),
            d_g=np.array(d["d_g"], dtype=np.float64),
            d_s=np.array(d["d_s"], dtype=np.float64),
            pca_explained_ratio=float(d["pca_explained_ratio"]),
            overlap=float(d["overlap"]),
            lda_cv_accuracy=(float(d["lda_cv_accuracy"])
                             if "lda_cv_accuracy" in d else None),
        )

    @classmethod
    def load_json(cls, path) -> "GenderDirections":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_directions(space: EmbeddingSpace, lexicon, *,
                     ridge: float = DEFAULT_RIDGE,
                     cv_folds: int | None = 5,
                     seed: int = 0) -> GenderDirections:
    """Assemble the direction bundle for one monolingual space.

    cv_folds=None skips cross-validation (lda_cv_accuracy stays None); it is
    also skipped, with a log line, when a noun class is smaller than the
    fold count.
    """
    d_pca, explained = semantic_direction(space, lexicon.definitional_pairs)
    d_g = grammatical_direction(space, lexicon.grammatical_masculine,
                                lexicon.grammatical_feminine, ridge=ridge)
    d_s = orthogonalize(d_pca, d_g)
    accuracy = None
    if cv_folds is not None:
        try:
            accuracy = lda_cross_validation(space, lexicon.grammatical_masculine,
                                            lexicon.grammatical_feminine,
                                            folds=cv_folds, seed=seed, ridge=ridge)
        except ValueError as e:
            logger.info("skipping LDA cross-validation: %s", e)
    return GenderDirections(d_pca=d_pca, d_g=d_g, d_s=d_s,
                            pca_explained_ratio=explained,
                            overlap=float(np.dot(d_pca, d_g)),
                            lda_cv_accuracy=accuracy)


def bilingual_directions(bi: BilingualSpace, lexicon,
                         english_definitional_pairs: Sequence[tuple[str, str]], *,
                         ridge: float = DEFAULT_RIDGE,
                         cv_folds: int | None = 5,
                         seed: int = 0) -> GenderDirections:
    """Direction bundle for a co-embedded bilingual space.

    The grammatical direction comes from the gendered language alone; the
    semantic PCA pools definitional differences from both languages (source
    pairs against the source side, English pairs against the target side).
    A word pair listed in both languages contributes once, from the source
    side.  The two sides must already be aligned.
    """
    src_pairs = _dedupe_pairs(lexicon.definitional_pairs)
    src_set = set(src_pairs)
    en_pairs = [p for p in _dedupe_pairs(english_definitional_pairs)
                if p not in src_set]
    src_usable = [(m, f) for m, f in src_pairs
                  if m in bi.source and f in bi.source]
    en_usable = [(m, f) for m, f in en_pairs
                 if m in bi.target and f in bi.target]
    if len(src_usable) + len(en_usable) < 2:
        raise ValueError("need at least 2 covered definitional pairs across languages")
    diffs = []
    if src_usable:
        diffs.append(_difference_rows(bi.source, src_usable))
    if en_usable:
        diffs.append(_difference_rows(bi.target, en_usable))
    d_pca, explained = _pca_over_differences(np.vstack(diffs))
    d_g = grammatical_direction(bi.source, lexicon.grammatical_masculine,
                                lexicon.grammatical_feminine, ridge=ridge)
    d_s = orthogonalize(d_pca, d_g)
    accuracy = None
    if cv_folds is not None:
        try:
            accuracy = lda_cross_validation(bi.source, lexicon.grammatical_masculine,
                                            lexicon.grammatical_feminine,
                                            folds=cv_folds, seed=seed, ridge=ridge)
        except ValueError as e:
            logger.info("skipping LDA cross-validation: %s", e)
    return GenderDirections(d_pca=d_pca, d_g=d_g, d_s=d_s,
                            pca_explained_ratio=float(explained),
                            overlap=float(np.dot(d_pca, d_g)),
                            lda_cv_accuracy=accuracy)
