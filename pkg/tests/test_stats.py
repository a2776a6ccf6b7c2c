import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandsel.containers import GroundTruth, HsiCube, mask_and_standardize
from bandsel.errors import ValidationError
from bandsel.stats import (
    CorrelationMatrix,
    abc_scores,
    correlation_matrix,
    discretize,
    entropy,
    mi_from_joint,
    mutual_information,
    pairwise_vif,
    vif_matrix,
)

from conftest import make_random_scene


def pm_from_columns(cols):
    """PixelMatrix-like stand-in: stats only reads values/p_prime/n_bands."""
    from bandsel.containers import PixelMatrix

    x = np.asarray(cols, dtype=float).T
    p, n = x.shape
    return PixelMatrix(p, n, x, np.zeros((p, 2), dtype=int), np.ones(p, dtype=int))


# ---------------------------------------------------------------- oracles

def naive_pearson(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    dx = sum((a - mx) ** 2 for a in x)
    dy = sum((b - my) ** 2 for b in y)
    if dx == 0 or dy == 0:
        return 0.0
    return num / math.sqrt(dx * dy)


def naive_abc(r):
    n = len(r)
    return [sum(abs(r[i][j]) for j in range(n) if j != i) / (n - 1) for i in range(n)]


def naive_mi(values, labels, bins):
    values = list(values)
    lo, hi = min(values), max(values)
    if hi == lo:
        return 0.0
    joint = {}
    for v, c in zip(values, labels):
        b = min(int((v - lo) / (hi - lo) * bins), bins - 1)
        joint[(b, c)] = joint.get((b, c), 0) + 1
    n = len(values)
    rows = {}
    cols = {}
    for (b, c), k in joint.items():
        rows[b] = rows.get(b, 0) + k
        cols[c] = cols.get(c, 0) + k
    mi = 0.0
    for (b, c), k in joint.items():
        p = k / n
        mi += p * math.log2(p / ((rows[b] / n) * (cols[c] / n)))
    return max(mi, 0.0)


# ---------------------------------------------------------- correlation

def test_pearson_identical_series():
    cm = correlation_matrix(pm_from_columns([[1, 2, 3], [1, 2, 3]]))
    assert cm.values[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_pearson_exact_negation():
    cm = correlation_matrix(pm_from_columns([[1, 2, 3], [3, 2, 1]]))
    assert cm.values[0, 1] == pytest.approx(-1.0, abs=1e-12)


def test_pearson_hand_case():
    cm = correlation_matrix(pm_from_columns([[1, 2, 3, 4], [1, 3, 2, 4]]))
    assert cm.values[0, 1] == pytest.approx(0.8, abs=1e-12)


def test_correlation_matrix_exact_symmetry_and_range():
    cube, gt = make_random_scene(3, n_bands=7)
    cm = correlation_matrix(mask_and_standardize(cube, gt))
    assert np.array_equal(cm.values, cm.values.T)
    assert cm.values.min() >= -1.0 and cm.values.max() <= 1.0
    np.testing.assert_array_equal(np.diag(cm.values), 1.0)


def test_constant_band_correlates_zero():
    cm = correlation_matrix(pm_from_columns([[1, 2, 3], [5, 5, 5]]))
    assert cm.values[0, 1] == 0.0
    assert cm.values[1, 1] == 0.0  # degenerate diagonal marks the band
    assert cm.values[0, 0] == 1.0


@pytest.mark.parametrize("seed", range(8))
def test_scale_invariance(seed):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(15, 4))
    scaled = raw.copy()
    scaled[:, 1] *= 37.5
    def standardized(x):
        return (x - x.mean(axis=0)) / x.std(axis=0, ddof=1)
    a = correlation_matrix(pm_from_columns(standardized(raw).T)).values
    b = correlation_matrix(pm_from_columns(standardized(scaled).T)).values
    assert np.abs(a - b).max() <= 1e-9


# ------------------------------------------------------------------ abc

def test_abc_two_bands():
    cm = CorrelationMatrix(2, np.array([[1.0, 0.5], [0.5, 1.0]]))
    assert [s for _, s in abc_scores(cm)] == pytest.approx([0.5, 0.5], abs=1e-12)


def test_abc_three_band_hand_case():
    r = np.array([[1.0, 0.6, -0.2], [0.6, 1.0, 0.0], [-0.2, 0.0, 1.0]])
    scores = [s for _, s in abc_scores(CorrelationMatrix(3, r))]
    assert scores == pytest.approx([0.4, 0.3, 0.1], abs=1e-12)


def test_abc_independent_bands():
    scores = [s for _, s in abc_scores(CorrelationMatrix(3, np.eye(3)))]
    assert scores == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)


# ------------------------------------------------------------------ vif

def test_vif_values():
    assert pairwise_vif(0.0) == pytest.approx(1.0, abs=1e-12)
    assert pairwise_vif(0.9) == pytest.approx(5.263157894736842, abs=1e-12)
    assert pairwise_vif(1.0) == math.inf
    assert pairwise_vif(-1.0) == math.inf


def test_vif_domain_error():
    with pytest.raises(ValidationError):
        pairwise_vif(1.2)


@settings(max_examples=200, derandomize=True)
@given(st.floats(min_value=-0.999, max_value=0.999, allow_nan=False))
def test_vif_consistency(r):
    assert pairwise_vif(r) * (1 - r * r) == pytest.approx(1.0, abs=1e-12)


def test_vif_matrix_matches_scalar():
    r = np.array([[1.0, 0.9, 0.0], [0.9, 1.0, -1.0], [0.0, -1.0, 1.0]])
    v = vif_matrix(CorrelationMatrix(3, r))
    assert v[0, 1] == pytest.approx(pairwise_vif(0.9), abs=1e-12)
    assert v[0, 2] == 1.0
    assert math.isinf(v[1, 2]) and math.isinf(v[0, 0])


# -------------------------------------------------------------- entropy

def test_entropy_cases():
    assert entropy([5, 5]) == pytest.approx(1.0, abs=1e-12)
    assert entropy([10, 0]) == pytest.approx(0.0, abs=1e-12)
    assert entropy([1, 3]) == pytest.approx(0.8112781244591328, abs=1e-12)


def test_entropy_errors():
    with pytest.raises(ValidationError):
        entropy([])
    with pytest.raises(ValidationError):
        entropy([0, 0])
    with pytest.raises(ValidationError):
        entropy([-1, 2])


# ------------------------------------------------------------------- mi

def test_mi_deterministic_dependence_equals_label_entropy():
    labels = np.array([1] * 6 + [2] * 4)
    values = labels.astype(float)
    mi = mutual_information(values, labels, bins=2)
    assert mi == pytest.approx(entropy([6, 4]), abs=1e-12)


def test_mi_independent_is_zero():
    # joint table exactly the product of its marginals
    values = np.array([0.0, 0.0, 1.0, 1.0] * 3)
    labels = np.array([1, 2, 1, 2] * 3)
    assert mutual_information(values, labels, bins=2) == pytest.approx(0.0, abs=1e-12)


def test_mi_joint_table_hand_case():
    # independent oracle (naive_mi/direct sum) gives 0.0817041659455104...
    assert mi_from_joint([[2, 1], [1, 2]]) == pytest.approx(0.0817041659455104, abs=1e-12)


def test_mi_constant_column():
    assert mutual_information(np.ones(8), np.arange(8) % 2, bins=4) == 0.0


def test_mi_clamped_non_negative():
    assert mi_from_joint([[3, 3], [3, 3]]) == 0.0


def test_mi_transpose_symmetry():
    rng = np.random.default_rng(11)
    table = rng.integers(0, 9, size=(6, 4))
    table[0, 0] += 1
    assert mi_from_joint(table) == pytest.approx(mi_from_joint(table.T), abs=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_mi_bounds(seed):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=60)
    labels = rng.integers(1, 4, size=60)
    bins = 8
    mi = mutual_information(values, labels, bins=bins)
    h_band = entropy(np.bincount(discretize(values, bins), minlength=bins))
    h_labels = entropy(np.bincount(labels)[1:])
    assert 0.0 <= mi <= min(h_band, h_labels) + 1e-9


def test_mi_validation():
    with pytest.raises(ValidationError):
        mutual_information([1.0], [1], bins=2)
    with pytest.raises(ValidationError):
        mutual_information([1.0, 2.0], [1], bins=2)
    with pytest.raises(ValidationError):
        mutual_information([1.0, 2.0], [1, 2], bins=1)


# -------------------------------------------------- brute-force parity

@pytest.mark.parametrize("seed", range(10))
def test_bruteforce_oracle_parity(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(4, 21))
    n = int(rng.integers(2, 6))
    cube = HsiCube(1, p, n, rng.normal(size=(1, p, n)))
    gt = GroundTruth(1, p, rng.integers(1, 4, size=(1, p)))
    pm = mask_and_standardize(cube, gt)

    cm = correlation_matrix(pm)
    for i in range(n):
        for j in range(n):
            expect = naive_pearson(list(pm.values[:, i]), list(pm.values[:, j]))
            if i == j:
                expect = 1.0
            assert cm.values[i, j] == pytest.approx(expect, abs=1e-12)

    for (band, score), expect in zip(abc_scores(cm), naive_abc(cm.values.tolist())):
        assert score == pytest.approx(expect, abs=1e-12)

    for i in range(n):
        got = mutual_information(pm.values[:, i], pm.labels, bins=6)
        expect = naive_mi(list(pm.values[:, i]), list(pm.labels), 6)
        assert got == pytest.approx(expect, abs=1e-12)
