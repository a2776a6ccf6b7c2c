"""Dense pairwise band statistics: correlation, redundancy scores, VIF, and
histogram-based entropy / mutual information.

Conventions fixed here so results are reproducible bit for bit:

* correlations involving a constant band are defined as 0 (and the
  diagonal entry of a constant band is 0, not 1), keeping every
  downstream score a total function;
* mutual information uses equal-width binning of the band values over
  their observed [min, max] range and base-2 logarithms throughout;
* the correlation matrix is mirrored from its upper triangle, so the
  returned array equals its transpose exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .containers import PixelMatrix
from .errors import ValidationError

DEFAULT_MI_BINS = 64

# |r| within this distance of 1 is treated as perfect collinearity.
_COLLINEAR_EPS = 1e-12


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric matrix of pairwise Pearson coefficients between bands."""

    n_bands: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.n_bands, self.n_bands):
            raise ValidationError("correlation matrix shape mismatch")


def correlation_matrix(pm: PixelMatrix) -> CorrelationMatrix:
    """Pairwise Pearson correlation between all bands of a pixel matrix.

    Constant bands yield zero rows/columns (including the diagonal).
    """
    if pm.p_prime < 2:
        raise ValidationError("need at least 2 pixels to correlate bands")
    x = np.asarray(pm.values, dtype=np.float64)
    constant = (x == x[0]).all(axis=0)
    centered = x - x.mean(axis=0)
    norms = np.sqrt((centered * centered).sum(axis=0))
    norms_safe = np.where(norms == 0, 1.0, norms)

    gram = centered.T @ centered
    upper = np.triu(gram)
    gram_sym = upper + upper.T - np.diag(np.diag(upper))
    r = gram_sym / np.outer(norms_safe, norms_safe)
    np.clip(r, -1.0, 1.0, out=r)

    # zero-variance policy: no correlation is defined for such bands
    dead = constant | (norms == 0)
    r[dead, :] = 0.0
    r[:, dead] = 0.0
    diag = np.where(dead, 0.0, 1.0)
    np.fill_diagonal(r, diag)
    return CorrelationMatrix(pm.n_bands, r)


def abc_scores(cm: CorrelationMatrix) -> list[tuple[int, float]]:
    """Per-band mean of the absolute off-diagonal correlations.

    Returns ``(band_index, score)`` pairs with 0-based band ids; scores
    lie in [0, 1].
    """
    n = cm.n_bands
    if n < 2:
        raise ValidationError("need at least 2 bands")
    a = np.abs(cm.values)
    scores = (a.sum(axis=1) - np.diag(a)) / (n - 1)
    return [(i, float(scores[i])) for i in range(n)]


def pairwise_vif(r: float) -> float:
    """Variance inflation factor 1/(1 - r^2) for one band pair.

    Returns ``inf`` when |r| equals 1 within 1e-12; |r| beyond that is a
    domain error.
    """
    a = abs(float(r))
    if a > 1.0 + _COLLINEAR_EPS:
        raise ValidationError(f"correlation magnitude {r} exceeds 1")
    if a >= 1.0 - _COLLINEAR_EPS:
        return math.inf
    return 1.0 / (1.0 - r * r)


def vif_matrix(cm: CorrelationMatrix) -> np.ndarray:
    """Elementwise VIF of a correlation matrix (``inf`` on collinear pairs)."""
    r = cm.values
    collinear = np.abs(r) >= 1.0 - _COLLINEAR_EPS
    denom = np.where(collinear, 1.0, 1.0 - r * r)
    out = 1.0 / denom
    out[collinear] = np.inf
    return out


def entropy(counts) -> float:
    """Shannon entropy in bits of a histogram; zero cells contribute nothing."""
    c = np.asarray(counts, dtype=np.float64).reshape(-1)
    if c.size == 0:
        raise ValidationError("empty histogram")
    if (c < 0).any():
        raise ValidationError("histogram counts must be non-negative")
    total = c.sum()
    if total <= 0:
        raise ValidationError("histogram has no mass")
    p = c[c > 0] / total
    return float(-(p * np.log2(p)).sum())


def mi_from_joint(table) -> float:
    """Mutual information in bits of a 2-D joint count table.

    Computed as H(rows) + H(cols) - H(joint) and clamped at 0.
    """
    t = np.asarray(table, dtype=np.float64)
    if t.ndim != 2:
        raise ValidationError("joint table must be 2-D")
    mi = entropy(t.sum(axis=1)) + entropy(t.sum(axis=0)) - entropy(t)
    return max(mi, 0.0)


def discretize(values: np.ndarray, bins: int) -> np.ndarray:
    """Equal-width bin indices over the observed [min, max] of a column.

    A constant column falls entirely into bin 0.
    """
    v = np.asarray(values, dtype=np.float64)
    lo = v.min()
    hi = v.max()
    if hi == lo:
        return np.zeros(v.shape, dtype=np.int64)
    idx = np.floor((v - lo) / (hi - lo) * bins).astype(np.int64)
    return np.clip(idx, 0, bins - 1)


def mutual_information(band_values, labels, bins: int = DEFAULT_MI_BINS) -> float:
    """Mutual information in bits between one band and the class labels.

    The band is discretized into ``bins`` equal-width intervals; labels
    enter as raw class ids.  A constant band carries no information.
    """
    v = np.asarray(band_values, dtype=np.float64).reshape(-1)
    y = np.asarray(labels).reshape(-1)
    if v.size != y.size:
        raise ValidationError("band values and labels must have equal length")
    if v.size < 2:
        raise ValidationError("need at least 2 samples")
    if bins < 2:
        raise ValidationError("need at least 2 bins")
    if (v == v[0]).all():
        return 0.0
    b = discretize(v, bins)
    _, cls = np.unique(y, return_inverse=True)
    n_cls = int(cls.max()) + 1
    joint = np.bincount(b * n_cls + cls, minlength=bins * n_cls).reshape(bins, n_cls)
    return mi_from_joint(joint)
