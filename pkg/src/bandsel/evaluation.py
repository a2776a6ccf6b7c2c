"""Classification-based quality assessment of band subsets.

Protocol: repeated stratified splits (a per-class fraction of pixels into
the training set), a deterministic k-nearest-neighbour classifier over the
selected standardized bands, and Overall Accuracy / Cohen's Kappa
aggregated over runs.  Repeat ``r`` draws its split from
``numpy.random.default_rng([seed, r])``, so runs are reproducible and
independent of execution order.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .containers import PixelMatrix
from .errors import InfeasibleError, ValidationError
from .selection import SelectionConfig, SelectionResult, run_pipeline

_CHUNK_ROWS = 2048


@dataclass(frozen=True)
class EvalConfig:
    train_fraction: float = 0.10
    repeats: int = 10
    seed: int = 42
    classifier: str = "knn"
    k_neighbors: int = 3

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValidationError("train fraction must lie strictly between 0 and 1")
        if self.repeats < 1:
            raise ValidationError("need at least 1 repeat")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")
        if self.k_neighbors < 1:
            raise ValidationError("k_neighbors must be positive")


@dataclass(frozen=True)
class EvalReport:
    """Per-run and aggregated scores for one band subset (ids 1-based)."""

    band_set: tuple[int, ...]
    per_run: tuple[tuple[float, float], ...]
    oa_mean: float
    oa_std: float
    kappa_mean: float
    kappa_std: float
    confusion: np.ndarray
    classes: tuple[int, ...]


def stratified_split(labels, fraction: float, seed) -> tuple[np.ndarray, np.ndarray]:
    """Per class, draw ceil(fraction * class size) members into the train set.

    ``seed`` is anything ``numpy.random.default_rng`` accepts.  Returns
    sorted (train, test) index arrays; every class keeps at least one
    member on each side.
    """
    y = np.asarray(labels).reshape(-1)
    if not 0 < fraction < 1:
        raise ValidationError("fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    train_parts = []
    test_parts = []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if idx.size < 2:
            raise ValidationError(f"class {cls} has fewer than 2 members")
        n_train = math.ceil(fraction * idx.size)
        if n_train >= idx.size:
            raise ValidationError(
                f"class {cls}: fraction {fraction} leaves no test samples"
            )
        chosen = rng.choice(idx, size=n_train, replace=False)
        train_parts.append(chosen)
        test_parts.append(np.setdiff1d(idx, chosen))
    train = np.sort(np.concatenate(train_parts))
    test = np.sort(np.concatenate(test_parts))
    return train, test


class KnnClassifier:
    """k-nearest neighbours, Euclidean metric, fully deterministic.

    Votes are counted over the k closest training rows (distance ties go
    to the lower training index via a stable sort); vote ties go to the
    smallest class id.
    """

    def __init__(self, k_neighbors: int = 3):
        if k_neighbors < 1:
            raise ValidationError("k_neighbors must be positive")
        self.k_neighbors = k_neighbors
        self._x = None
        self._y = None
        self._classes = None
        self._class_idx = None

    def fit(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y).reshape(-1)
        if len(x) == 0:
            raise ValidationError("training set is empty")
        if len(x) != len(y):
            raise ValidationError("training features and labels disagree in length")
        self._x = x
        self._y = y
        self._classes, self._class_idx = np.unique(y, return_inverse=True)
        return self

    def predict(self, x):
        if self._x is None:
            raise ValidationError("classifier is not fitted")
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self._x.shape[1]:
            raise ValidationError(
                f"test features have {x.shape[1] if x.ndim == 2 else '?'} dims, "
                f"train has {self._x.shape[1]}"
            )
        k = min(self.k_neighbors, len(self._x))
        n_cls = len(self._classes)
        train_sq = (self._x * self._x).sum(axis=1)
        out = np.empty(len(x), dtype=self._y.dtype)
        for start in range(0, len(x), _CHUNK_ROWS):
            chunk = x[start : start + _CHUNK_ROWS]
            d2 = (chunk * chunk).sum(axis=1)[:, None] + train_sq[None, :]
            d2 -= 2.0 * (chunk @ self._x.T)
            nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
            votes = np.zeros((len(chunk), n_cls), dtype=np.int64)
            rows = np.repeat(np.arange(len(chunk)), k)
            np.add.at(votes, (rows, self._class_idx[nearest].reshape(-1)), 1)
            out[start : start + _CHUNK_ROWS] = self._classes[np.argmax(votes, axis=1)]
        return out


_CLASSIFIERS = {"knn": KnnClassifier}


def make_classifier(name: str, k_neighbors: int = 3):
    if name not in _CLASSIFIERS:
        raise ValidationError(f"unknown classifier {name!r}; choose from {sorted(_CLASSIFIERS)}")
    return _CLASSIFIERS[name](k_neighbors=k_neighbors)


def classify(train_x, train_y, test_x, classifier: str = "knn", k_neighbors: int = 3):
    """One-shot fit/predict through the pluggable classifier registry."""
    return make_classifier(classifier, k_neighbors=k_neighbors).fit(train_x, train_y).predict(test_x)


def overall_accuracy(predicted, actual) -> float:
    p = np.asarray(predicted).reshape(-1)
    a = np.asarray(actual).reshape(-1)
    if p.size != a.size:
        raise ValidationError("predicted and actual lengths differ")
    if p.size == 0:
        raise ValidationError("nothing to score")
    return float((p == a).sum() / p.size)


def confusion_matrix(predicted, actual, classes=None):
    """Count matrix with actual classes on rows, predictions on columns."""
    p = np.asarray(predicted).reshape(-1)
    a = np.asarray(actual).reshape(-1)
    if p.size != a.size:
        raise ValidationError("predicted and actual lengths differ")
    if classes is None:
        classes = np.unique(np.concatenate([a, p]))
    classes = np.asarray(classes)
    lut = {int(c): i for i, c in enumerate(classes)}
    n = len(classes)
    m = np.zeros((n, n), dtype=np.int64)
    for ai, pi in zip(a, p):
        m[lut[int(ai)], lut[int(pi)]] += 1
    return m, classes


def cohens_kappa(predicted, actual) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e)."""
    m, _ = confusion_matrix(predicted, actual)
    total = m.sum()
    p_o = np.diag(m).sum() / total
    p_e = float((m.sum(axis=1) * m.sum(axis=0)).sum()) / (total * total)
    if abs(1.0 - p_e) < 1e-15:
        if p_o == 1.0:
            return 1.0
        raise ValidationError("degenerate agreement: chance agreement is 1 but observed is not")
    return float((p_o - p_e) / (1.0 - p_e))


def _scores_from_confusion(m: np.ndarray) -> tuple[float, float]:
    total = m.sum()
    p_o = np.diag(m).sum() / total
    p_e = float((m.sum(axis=1) * m.sum(axis=0)).sum()) / (total * total)
    kappa = 1.0 if abs(1.0 - p_e) < 1e-15 else (p_o - p_e) / (1.0 - p_e)
    return float(p_o), float(kappa)


def ubs_baseline(n_bands: int, n_selected: int) -> list[int]:
    """Uniformly spaced 1-based band ids covering [1, n_bands] inclusive."""
    if not 1 <= n_selected <= n_bands:
        raise ValidationError("selected count must lie in [1, n_bands]")
    if n_selected == 1:
        return [1]
    ids = []
    for i in range(1, n_selected + 1):
        pos = math.floor(1 + (i - 1) * (n_bands - 1) / (n_selected - 1) + 0.5)
        if ids and pos <= ids[-1]:
            pos = ids[-1] + 1  # nudge duplicates forward
        ids.append(pos)
    return ids


def evaluate_bands(pm: PixelMatrix, band_ids, cfg: EvalConfig) -> EvalReport:
    """Score one band subset (0-based ids) over repeated stratified runs."""
    bands = sorted(int(b) for b in band_ids)
    if not bands:
        raise ValidationError("band subset is empty")
    if bands[0] < 0 or bands[-1] >= pm.n_bands:
        raise ValidationError(f"band ids out of range 0..{pm.n_bands - 1}")
    x = pm.values[:, bands]
    y = pm.labels
    classes = np.unique(y)

    per_run = []
    confusion = None
    for rep in range(cfg.repeats):
        train, test = stratified_split(y, cfg.train_fraction, [cfg.seed, rep])
        pred = classify(x[train], y[train], x[test], cfg.classifier, cfg.k_neighbors)
        confusion, _ = confusion_matrix(pred, y[test], classes)
        per_run.append(_scores_from_confusion(confusion))

    oa = np.array([r[0] for r in per_run])
    kappa = np.array([r[1] for r in per_run])
    return EvalReport(
        band_set=tuple(b + 1 for b in bands),
        per_run=tuple(per_run),
        oa_mean=float(oa.mean()),
        oa_std=float(oa.std()),
        kappa_mean=float(kappa.mean()),
        kappa_std=float(kappa.std()),
        confusion=confusion,
        classes=tuple(int(c) for c in classes),
    )


@dataclass(frozen=True)
class SweepCell:
    n_selected: int
    tolerance: float
    report: EvalReport | None = None
    selection: SelectionResult | None = None
    skip_reason: str | None = None


@dataclass(frozen=True)
class SweepAggregate:
    tolerance: float
    oa_mean: float
    oa_std: float
    kappa_mean: float
    kappa_std: float
    n_cells: int


def sweep(pm: PixelMatrix, n_selected_list, tolerance_list,
          sel_cfg: SelectionConfig, eval_cfg: EvalConfig):
    """Cross product of (bands to select) x (tolerance): select then evaluate.

    Infeasible cells become explicit skips.  Returns (cells, aggregates)
    where aggregates hold the unweighted mean over the feasible cells of
    each tolerance (the population std is taken over the cell means).
    """
    if not len(n_selected_list) or not len(tolerance_list):
        raise ValidationError("sweep grids must be non-empty")
    cells = []
    for n_sel in n_selected_list:
        for tol in tolerance_list:
            cfg = replace(sel_cfg, n_selected=int(n_sel), tolerance=float(tol))
            try:
                sel = run_pipeline(pm, cfg)
            except InfeasibleError as exc:
                cells.append(SweepCell(int(n_sel), float(tol), skip_reason=str(exc)))
                continue
            report = evaluate_bands(pm, sel.selected, eval_cfg)
            cells.append(SweepCell(int(n_sel), float(tol), report=report, selection=sel))

    aggregates = []
    for tol in tolerance_list:
        done = [c.report for c in cells if c.tolerance == float(tol) and c.report is not None]
        if not done:
            continue
        oa = np.array([r.oa_mean for r in done])
        kp = np.array([r.kappa_mean for r in done])
        aggregates.append(SweepAggregate(
            tolerance=float(tol),
            oa_mean=float(oa.mean()), oa_std=float(oa.std()),
            kappa_mean=float(kp.mean()), kappa_std=float(kp.std()),
            n_cells=len(done),
        ))
    return cells, aggregates


SWEEP_CSV_HEADER = "n_prime,tolerance_y,oa_mean,oa_std,kappa_mean,kappa_std,selected_bands"


def sweep_to_csv(cells, aggregates, baseline_rows=()) -> str:
    """Render sweep results as the comma-separated report table.

    Cell rows come first in grid order, optional UBS baseline rows carry
    ``ubs`` in the tolerance column, and per-tolerance aggregate rows close
    the table with ``avg`` in the band-count column.  Skipped cells keep
    their row with empty metrics and the reason in the band column.
    """
    lines = [SWEEP_CSV_HEADER]
    for cell in cells:
        if cell.report is None:
            lines.append(f"{cell.n_selected},{cell.tolerance!r},,,,,skipped({cell.skip_reason})")
        else:
            r = cell.report
            bands = ";".join(str(b) for b in r.band_set)
            lines.append(
                f"{cell.n_selected},{cell.tolerance!r},{r.oa_mean!r},{r.oa_std!r},"
                f"{r.kappa_mean!r},{r.kappa_std!r},{bands}"
            )
    for n_sel, report in baseline_rows:
        bands = ";".join(str(b) for b in report.band_set)
        lines.append(
            f"{n_sel},ubs,{report.oa_mean!r},{report.oa_std!r},"
            f"{report.kappa_mean!r},{report.kappa_std!r},{bands}"
        )
    for agg in aggregates:
        lines.append(
            f"avg,{agg.tolerance!r},{agg.oa_mean!r},{agg.oa_std!r},"
            f"{agg.kappa_mean!r},{agg.kappa_std!r},"
        )
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvalReport) -> dict:
    return {
        "bands": list(report.band_set),
        "per_run": [{"oa": oa, "kappa": kappa} for oa, kappa in report.per_run],
        "oa_mean": report.oa_mean,
        "oa_std": report.oa_std,
        "kappa_mean": report.kappa_mean,
        "kappa_std": report.kappa_std,
        "classes": list(report.classes),
        "confusion": [[int(v) for v in row] for row in report.confusion],
    }


def report_to_json(report: EvalReport, cfg: EvalConfig,
                   baseline: EvalReport | None = None) -> str:
    doc = {
        "config": {
            "train_fraction": cfg.train_fraction,
            "repeats": cfg.repeats,
            "seed": cfg.seed,
            "classifier": cfg.classifier,
            "k_neighbors": cfg.k_neighbors,
        },
        **report_to_dict(report),
    }
    if baseline is not None:
        doc["baseline_ubs"] = report_to_dict(baseline)
    return json.dumps(doc, indent=2) + "\n"
