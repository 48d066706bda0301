"""PSI and normalized EMD against hand values and a brute-force transport LP."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import linprog

from tabcheck.kernels import DriftMethod, Histogram, emd_normalized, psi


def transport_lp(a: np.ndarray, b: np.ndarray) -> float:
    """Optimal-transport cost between empirical distributions, solved as an LP.

    Independent oracle for emd_normalized: mass 1/n per source point, 1/m per
    target point, cost |x_i - y_j|, marginal equality constraints.
    """
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if hi == lo:
        return 0.0
    a = (a - lo) / (hi - lo)
    b = (b - lo) / (hi - lo)
    n, m = len(a), len(b)
    cost = np.abs(a[:, None] - b[None, :]).ravel()
    a_eq = []
    b_eq = []
    for i in range(n):
        row = np.zeros(n * m)
        row[i * m : (i + 1) * m] = 1.0
        a_eq.append(row)
        b_eq.append(1.0 / n)
    for j in range(m):
        row = np.zeros(n * m)
        row[j::m] = 1.0
        a_eq.append(row)
        b_eq.append(1.0 / m)
    res = linprog(cost, A_eq=np.array(a_eq), b_eq=np.array(b_eq), bounds=(0, None), method="highs")
    assert res.success
    return float(res.fun)


class TestPsi:
    def test_identical_histograms_zero(self):
        h = Histogram(("a", "b"), (0.5, 0.5))
        assert psi(h, h).value == 0.0

    def test_hand_value(self):
        # sum (q-p) ln(q/p) = 0.4 ln(1.8) - 0.4 ln(0.2) = 0.8788898309...
        p = Histogram(("a", "b"), (0.5, 0.5))
        q = Histogram(("a", "b"), (0.9, 0.1))
        assert psi(p, q).value == pytest.approx(0.8788898309344878, abs=1e-9)
        assert psi(p, q).method is DriftMethod.PSI

    def test_disjoint_histograms_clamped(self):
        # zeros clamp to 1e-6 before the log; hand evaluation gives 27.6309934849...
        p = Histogram(("a", "b"), (1.0, 0.0))
        q = Histogram(("a", "b"), (0.0, 1.0))
        assert psi(p, q).value == pytest.approx(27.63099348490743, abs=1e-9)

    def test_symmetry_and_identity_random(self):
        rng = np.random.RandomState(42)
        for _ in range(1000):
            k = rng.randint(2, 10)
            raw_p = rng.dirichlet(np.ones(k))
            raw_q = rng.dirichlet(np.ones(k))
            labels = tuple(f"c{i}" for i in range(k))
            p = Histogram(labels, tuple(raw_p / raw_p.sum()))
            q = Histogram(labels, tuple(raw_q / raw_q.sum()))
            assert abs(psi(p, q).value - psi(q, p).value) <= 1e-9
            assert abs(psi(p, p).value) <= 1e-9
            assert psi(p, q).value >= -1e-12

    def test_mismatched_labels_rejected(self):
        p = Histogram(("a", "b"), (0.5, 0.5))
        q = Histogram(("a", "c"), (0.5, 0.5))
        with pytest.raises(ValueError, match="bin labels"):
            psi(p, q)

    def test_histogram_validation(self):
        with pytest.raises(ValueError, match="sum"):
            Histogram(("a", "b"), (0.7, 0.7))
        with pytest.raises(ValueError, match="length"):
            Histogram(("a",), (0.5, 0.5))


class TestEmdNormalized:
    def test_identical_samples_exact_zero(self):
        assert emd_normalized([1, 2, 3], [1, 2, 3]).value == 0.0

    def test_hand_shift(self):
        # shift by 1 over combined range 2 -> 0.5 (verified against transport_lp)
        assert emd_normalized([0, 1], [1, 2]).value == pytest.approx(0.5, abs=1e-12)

    def test_constant_samples_zero_range(self):
        assert emd_normalized([5, 5], [5, 5, 5]).value == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            emd_normalized([], [1.0])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            emd_normalized([np.nan, 1.0], [1.0])

    def test_matches_transport_lp(self):
        rng = np.random.RandomState(7)
        for _ in range(60):
            a = rng.uniform(-5, 5, size=rng.randint(1, 13))
            b = rng.uniform(-5, 5, size=rng.randint(1, 13))
            ours = emd_normalized(a, b).value
            assert ours == pytest.approx(transport_lp(a, b), abs=1e-9)

    def test_result_in_unit_interval(self):
        rng = np.random.RandomState(11)
        for _ in range(50):
            a = rng.normal(size=30) * rng.uniform(0.1, 100)
            b = rng.normal(loc=rng.uniform(-3, 3), size=40) * rng.uniform(0.1, 100)
            v = emd_normalized(a, b).value
            assert 0.0 <= v <= 1.0
