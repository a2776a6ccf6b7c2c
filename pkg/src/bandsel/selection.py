"""Band-subset selection: VIF-gated candidate construction, clustering of
per-band (redundancy, information) scores, and centroid-nearest
representative extraction.

The full pipeline is a pure function of (pixel matrix, config).  All
randomness flows from ``SelectionConfig.seed``; restart ``r`` of the
clustering uses the generator ``numpy.random.default_rng([seed, r])`` so
restarts can run concurrently without changing the result.  The winning
restart is the one minimizing (inertia, restart index), which makes the
outcome independent of scheduling.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .containers import PixelMatrix
from .errors import InfeasibleError, ValidationError
from .stats import (
    DEFAULT_MI_BINS,
    CorrelationMatrix,
    abc_scores,
    correlation_matrix,
    mutual_information,
    vif_matrix,
)

VARIANTS = ("abc-mi-vif", "abc-mi-novif", "abc-only", "mi-only")

_KMEANS_MAX_ITER = 300


@dataclass(frozen=True)
class SelectionConfig:
    n_selected: int
    tolerance: float = 0.0  # VIF tolerance factor, in percent
    mi_bins: int = DEFAULT_MI_BINS
    restarts: int = 40
    seed: int = 42
    variant: str = "abc-mi-vif"
    rescale_axes: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.n_selected < 1:
            raise ValidationError("must select at least 1 band")
        if self.tolerance < 0:
            raise ValidationError("tolerance factor must be non-negative")
        if self.mi_bins < 2:
            raise ValidationError("need at least 2 histogram bins")
        if self.restarts < 1:
            raise ValidationError("need at least 1 clustering restart")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")
        if self.variant not in VARIANTS:
            raise ValidationError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if self.threads < 1:
            raise ValidationError("thread count must be positive")


@dataclass(frozen=True)
class BandScores:
    """Scores backing one candidate band's position in the cluster space."""

    band_index: int
    abc: float | None = None
    mi: float | None = None


@dataclass(frozen=True)
class SelectionResult:
    config: SelectionConfig
    vif_lim: float | None
    candidates: tuple[int, ...]
    scores: tuple[BandScores, ...]
    assignments: tuple[int, ...]
    centroids: np.ndarray
    selected: tuple[int, ...]
    inertia: float


def vif_limit(tolerance: float) -> float:
    """Admission limit 1 + tolerance/100 (tolerance is a percentage)."""
    if tolerance < 0:
        raise ValidationError("tolerance factor must be non-negative")
    return 1.0 + tolerance / 100.0


def vif_preselect(cm: CorrelationMatrix, limit: float) -> list[int]:
    """Bands participating in at least one pair with pairwise VIF <= limit.

    Equality at the limit admits the pair.  Returns ascending 0-based band
    ids; raises when no pair qualifies.
    """
    if cm.n_bands < 2:
        raise ValidationError("need at least 2 bands")
    vif = vif_matrix(cm)
    admissible = vif <= limit
    np.fill_diagonal(admissible, False)
    members = np.flatnonzero(admissible.any(axis=1))
    if members.size == 0:
        raise InfeasibleError(
            f"no band pair has VIF <= {limit!r}; increase the tolerance factor"
        )
    return [int(b) for b in members]


def build_abc_mi_space(candidates, abc_by_band, mi_by_band) -> np.ndarray:
    """Stack (abc, mi) pairs for the candidate bands, preserving their order."""
    if len(candidates) == 0:
        raise ValidationError("candidate list is empty")
    points = np.empty((len(candidates), 2), dtype=np.float64)
    for row, band in enumerate(candidates):
        if band not in abc_by_band or band not in mi_by_band:
            raise ValidationError(f"candidate band {band + 1} lacks a score")
        points[row, 0] = abc_by_band[band]
        points[row, 1] = mi_by_band[band]
    return points


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return (diff * diff).sum(axis=2)


def _lloyd(points: np.ndarray, centroids: np.ndarray):
    """Lloyd iterations from given start centroids to an assignment fixed point.

    Empty clusters are repaired by reseeding the centroid to the point
    currently farthest from its own centroid.
    """
    k = len(centroids)
    m = len(points)
    centroids = centroids.copy()
    prev = None
    for _ in range(_KMEANS_MAX_ITER):
        d2 = _sq_dists(points, centroids)
        assign = np.argmin(d2, axis=1)
        counts = np.bincount(assign, minlength=k)
        if (counts == 0).any():
            own = d2[np.arange(m), assign].copy()
            for c in np.flatnonzero(counts == 0):
                far = int(np.argmax(own))
                centroids[c] = points[far]
                assign[far] = c
                own[far] = -1.0
        if prev is not None and np.array_equal(assign, prev):
            break
        prev = assign
        centroids = np.stack([points[assign == c].mean(axis=0) for c in range(k)])
    inertia = float(((points - centroids[assign]) ** 2).sum())
    return assign, centroids, inertia


def _kmeans_restart(points: np.ndarray, k: int, seed: int, restart: int):
    rng = np.random.default_rng([seed, restart])
    init = rng.choice(len(points), size=k, replace=False)
    return _lloyd(points, points[init].astype(np.float64))


def kmeans(points, k: int, restarts: int = 40, seed: int = 42, threads: int = 1):
    """Best-of-``restarts`` k-means on a small point set.

    Returns ``(assignments, centroids, inertia)`` of the restart with the
    lowest within-cluster sum of squares (ties go to the lower restart
    index).  Every cluster in the result is non-empty.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValidationError("points must be a 2-D array")
    if k < 1:
        raise ValidationError("cluster count must be positive")
    if k > len(pts):
        raise InfeasibleError(f"cannot form {k} clusters from {len(pts)} points")
    if restarts < 1:
        raise ValidationError("need at least 1 restart")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: _kmeans_restart(pts, k, seed, r), range(restarts)))
    else:
        results = [_kmeans_restart(pts, k, seed, r) for r in range(restarts)]

    best = min(range(restarts), key=lambda r: (results[r][2], r))
    return results[best]


def select_representatives(points, assignments, centroids, candidates) -> list[int]:
    """Per cluster, the candidate band whose point is nearest the centroid.

    Exact distance ties go to the lowest band id.  Returns ascending band ids.
    """
    pts = np.asarray(points, dtype=np.float64)
    assign = np.asarray(assignments)
    cand = np.asarray(candidates)
    chosen = []
    for c in range(len(centroids)):
        member_rows = np.flatnonzero(assign == c)
        if member_rows.size == 0:
            raise ValidationError(f"cluster {c} is empty")
        diff = pts[member_rows] - centroids[c]
        d2 = (diff * diff).sum(axis=1)
        ties = member_rows[d2 == d2.min()]
        chosen.append(int(cand[ties].min()))
    return sorted(chosen)


def _rescale_unit(points: np.ndarray) -> np.ndarray:
    lo = points.min(axis=0)
    span = points.max(axis=0) - lo
    span = np.where(span == 0, 1.0, span)
    return (points - lo) / span


def run_pipeline(pm: PixelMatrix, config: SelectionConfig) -> SelectionResult:
    """End-to-end band selection over a standardized pixel matrix.

    Variants: ``abc-mi-vif`` scores all bands by mean absolute correlation,
    gates candidates by pairwise VIF, computes mutual information for the
    survivors and clusters the 2-D score space; ``abc-mi-novif`` skips the
    gate; ``abc-only`` / ``mi-only`` cluster a single score axis over all
    bands.
    """
    n = pm.n_bands
    if config.n_selected > n:
        raise InfeasibleError(f"cannot select {config.n_selected} of {n} bands")

    cm = correlation_matrix(pm)
    abc = dict(abc_scores(cm))

    if config.variant == "abc-mi-vif":
        lim = vif_limit(config.tolerance)
        candidates = vif_preselect(cm, lim)
    else:
        lim = None
        candidates = list(range(n))

    if config.n_selected > len(candidates):
        raise InfeasibleError(
            f"{len(candidates)} candidate bands survive the VIF gate but "
            f"{config.n_selected} were requested; increase the tolerance factor"
        )

    def mi_for(bands):
        def one(b):
            return mutual_information(pm.values[:, b], pm.labels, config.mi_bins)

        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                return dict(zip(bands, pool.map(one, bands)))
        return {b: one(b) for b in bands}

    if config.variant in ("abc-mi-vif", "abc-mi-novif"):
        mi = mi_for(candidates)
        points = build_abc_mi_space(candidates, abc, mi)
        scores = tuple(BandScores(b, abc=abc[b], mi=mi[b]) for b in candidates)
    elif config.variant == "abc-only":
        points = np.array([[abc[b]] for b in candidates], dtype=np.float64)
        scores = tuple(BandScores(b, abc=abc[b]) for b in candidates)
    else:  # mi-only
        mi = mi_for(candidates)
        points = np.array([[mi[b]] for b in candidates], dtype=np.float64)
        scores = tuple(BandScores(b, mi=mi[b]) for b in candidates)

    cluster_points = _rescale_unit(points) if config.rescale_axes else points
    assign, centroids, inertia = kmeans(
        cluster_points, config.n_selected, config.restarts, config.seed, config.threads
    )
    selected = select_representatives(cluster_points, assign, centroids, candidates)

    return SelectionResult(
        config=config,
        vif_lim=lim,
        candidates=tuple(candidates),
        scores=scores,
        assignments=tuple(int(a) for a in assign),
        centroids=centroids,
        selected=tuple(selected),
        inertia=inertia,
    )


def result_to_json(result: SelectionResult) -> str:
    """Serialize a selection result; band ids are emitted 1-based."""
    cfg = result.config
    doc = {
        "config": {
            "variant": cfg.variant,
            "bands_count": cfg.n_selected,
            "tolerance": cfg.tolerance,
            "mi_bins": cfg.mi_bins,
            "restarts": cfg.restarts,
            "seed": cfg.seed,
            "rescale_axes": cfg.rescale_axes,
        },
        "vif_lim": result.vif_lim,
        "candidates": [b + 1 for b in result.candidates],
        "scores": [
            {"band": s.band_index + 1}
            | ({"abc": s.abc} if s.abc is not None else {})
            | ({"mi": s.mi} if s.mi is not None else {})
            for s in result.scores
        ],
        "assignments": list(result.assignments),
        "centroids": [[float(v) for v in row] for row in result.centroids],
        "selected": [b + 1 for b in result.selected],
        "inertia": result.inertia,
    }
    return json.dumps(doc, indent=2) + "\n"
