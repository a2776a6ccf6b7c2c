"""Shared synthetic fixtures.

``make_planted_scene`` builds a cube with five groups of near-duplicate
bands whose cross-group correlations are exactly zero (up to ~1e-15): the
group latents and all per-band noise vectors come from one QR
orthonormalization, and the class patterns are balanced Helmert contrasts,
so bands from different groups pass the VIF gate even at zero tolerance.
Group sizes and within-group correlation levels differ, which separates the
groups in (correlation-score, information-score) space.

``make_noisy_scene`` is the same construction with much weaker group
signal, for classification tests that need accuracy clearly below 1.
"""

import numpy as np

from bandsel.containers import GroundTruth, HsiCube

N_CLASSES = 6
PER_CLASS = 100
GROUP_SIZES = (2, 4, 6, 8, 10)
PLANTED_RHO = (0.96, 0.97, 0.98, 0.985, 0.99)
NOISY_RHO = (0.60, 0.65, 0.70, 0.75, 0.80)


def helmert_contrasts(n: int) -> np.ndarray:
    """(n-1) x n orthonormal zero-sum contrast rows."""
    h = np.zeros((n - 1, n))
    for k in range(1, n):
        h[k - 1, :k] = 1.0
        h[k - 1, k] = -k
        h[k - 1] /= np.sqrt(k * (k + 1))
    return h


def _grouped_scene(seed: int, sizes, rhos):
    rng = np.random.default_rng(seed)
    n_px = N_CLASSES * PER_CLASS
    classes = np.repeat(np.arange(1, N_CLASSES + 1), PER_CLASS)
    patterns = helmert_contrasts(N_CLASSES)[:, classes - 1].T  # (n_px, 5)
    n_bands = sum(sizes)

    # one QR makes class patterns and every band's private noise mutually
    # orthogonal (and orthogonal to the constant vector)
    basis_in = np.concatenate(
        [np.ones((n_px, 1)), patterns, rng.standard_normal((n_px, n_bands))], axis=1
    )
    q, _ = np.linalg.qr(basis_in)
    pat = q[:, 1 : 1 + len(sizes)]
    noise = q[:, 1 + len(sizes) : 1 + len(sizes) + n_bands]

    cols = []
    groups = []
    b = 0
    for g, (size, rho) in enumerate(zip(sizes, rhos)):
        for _ in range(size):
            cols.append(np.sqrt(rho) * pat[:, g] + np.sqrt(1 - rho) * noise[:, b])
            groups.append(g)
            b += 1
    x = np.stack(cols, axis=1)

    side = 25  # 625 grid pixels; the trailing 25 are background
    values = np.zeros((side * side, n_bands))
    values[:n_px] = x
    labels = np.zeros(side * side, dtype=np.int64)
    labels[:n_px] = classes
    cube = HsiCube(side, side, n_bands, values.reshape(side, side, n_bands))
    gt = GroundTruth(side, side, labels.reshape(side, side))
    return cube, gt, np.array(groups)


def make_planted_scene(seed: int):
    """Cube/gt with 5 planted groups (within |r| > 0.95, cross |r| ~ 0)."""
    return _grouped_scene(seed, GROUP_SIZES, PLANTED_RHO)


def make_noisy_scene(seed: int):
    """Weak-signal variant: classes overlap, accuracy stays well below 1."""
    return _grouped_scene(seed, GROUP_SIZES, NOISY_RHO)


def make_random_scene(seed: int, height=6, width=7, n_bands=8, n_classes=3):
    """Unstructured random cube with a labelled grid (no background)."""
    rng = np.random.default_rng(seed)
    values = rng.normal(size=(height, width, n_bands))
    labels = rng.integers(1, n_classes + 1, size=(height, width))
    labels[0, 0] = 1  # always at least one non-background pixel
    return HsiCube(height, width, n_bands, values), GroundTruth(height, width, labels)


def make_separable_scene(seed: int, per_class=40):
    """Three classes in disjoint feature regions: kNN classifies perfectly."""
    rng = np.random.default_rng(seed)
    n_px = 3 * per_class
    classes = np.repeat(np.array([1, 2, 3]), per_class)
    centers = np.array([[0.0, 0.0], [20.0, 0.0], [0.0, 20.0]])
    x = centers[classes - 1] + rng.normal(scale=0.25, size=(n_px, 2))
    height, width = 12, 10
    cube = HsiCube(height, width, 2, x.reshape(height, width, 2))
    gt = GroundTruth(height, width, classes.reshape(height, width))
    return cube, gt
