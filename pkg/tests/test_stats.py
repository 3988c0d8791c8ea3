import numpy as np
import pytest
from scipy import stats as sps

from dynperc.errors import InsufficientDataError, InvalidParameterError
from dynperc.geometry import RngStream
from dynperc.stats import (
    EmpiricalDistribution,
    chi_square_gof,
    ks_distance,
    mean_ci,
    wasserstein1,
)

SEED = 20260823


def test_ks_identical_and_disjoint():
    x = np.arange(10.0)
    assert ks_distance(x, x.copy()) == 0.0
    assert ks_distance(x, x + 100.0) == 1.0


def test_ks_matches_scipy_including_ties():
    gen = RngStream(SEED, 30).generator()
    a = gen.integers(0, 8, size=500).astype(float)  # heavy ties
    b = gen.integers(0, 8, size=300).astype(float)
    ours = ks_distance(a, b)
    ref = sps.ks_2samp(a, b, method="asymp").statistic
    assert ours == pytest.approx(ref, abs=1e-12)


def test_ks_null_level():
    # two same-law samples of 1e4: distance stays below 0.03
    gen = RngStream(SEED, 31).generator()
    d = ks_distance(gen.random(10_000), gen.random(10_000))
    assert d < 0.03


def test_ks_detects_shift():
    gen = RngStream(SEED, 32).generator()
    d = ks_distance(gen.random(10_000), gen.random(10_000) + 0.3)
    assert abs(d - 0.3) < 0.03


def test_wasserstein_exact_shift_equal_sizes():
    x = np.sort(RngStream(SEED, 33).generator().random(1000))
    assert wasserstein1(x, x + 0.1) == pytest.approx(0.1, abs=1e-12)


def test_wasserstein_shifted_uniform_samples():
    # independent U[0,1] vs U[0.1,1.1]: true W1 distance is the shift 0.1
    gen = RngStream(SEED, 34).generator()
    w = wasserstein1(gen.random(10_000), gen.random(10_000) + 0.1)
    assert abs(w - 0.1) < 0.02


def test_wasserstein_unequal_sizes_matches_scipy():
    gen = RngStream(SEED, 35).generator()
    a = gen.normal(0, 1, size=1000)
    b = gen.normal(0.3, 1.4, size=1700)
    assert wasserstein1(a, b) == pytest.approx(sps.wasserstein_distance(a, b), rel=1e-9)


def test_wasserstein_symmetry():
    gen = RngStream(SEED, 36).generator()
    a, b = gen.random(400), gen.random(700)
    assert wasserstein1(a, b) == pytest.approx(wasserstein1(b, a), rel=1e-12)


def test_ks_symmetry_and_triangle():
    gen = RngStream(SEED, 38).generator()
    for k in range(20):
        a = gen.random(150 + 7 * k)
        b = gen.random(200) * gen.uniform(0.5, 2.0) + gen.uniform(-0.5, 0.5)
        c = gen.normal(0.3, 0.8, size=120)
        assert ks_distance(a, b) == pytest.approx(ks_distance(b, a), abs=1e-15)
        assert ks_distance(a, c) <= ks_distance(a, b) + ks_distance(b, c) + 1e-12


def test_wasserstein_translation_bound():
    # shifting one sample by c moves the distance by at most |c|
    gen = RngStream(SEED, 39).generator()
    for _ in range(20):
        a = gen.random(300)
        b = gen.normal(0.2, 1.1, size=450)
        c = float(gen.uniform(-2.0, 2.0))
        assert abs(wasserstein1(a, b + c) - wasserstein1(a, b)) <= abs(c) + 1e-12


def test_distances_permutation_invariant():
    gen = RngStream(SEED, 40).generator()
    a, b = gen.random(321), gen.random(400)
    pa, pb = gen.permutation(a), gen.permutation(b)
    assert ks_distance(pa, pb) == ks_distance(a, b)
    assert wasserstein1(pa, pb) == wasserstein1(a, b)


def test_mean_ci_needs_two_samples():
    with pytest.raises(InsufficientDataError):
        mean_ci([1.0])


def test_mean_ci_width_formula():
    v = np.array([1.0, 2.0, 3.0, 4.0])
    m, lo, hi = mean_ci(v, level=0.95)
    se = v.std(ddof=1) / 2.0
    assert m == pytest.approx(2.5)
    assert hi - lo == pytest.approx(2 * 1.959963984540054 * se)


def test_mean_ci_coverage():
    gen = RngStream(SEED, 37).generator()
    hits = 0
    n_rep = 500
    for _ in range(n_rep):
        _, lo, hi = mean_ci(gen.normal(3.0, 1.0, size=50))
        hits += lo <= 3.0 <= hi
    assert 0.90 <= hits / n_rep <= 0.99


def test_chi_square_gof():
    stat, p = chi_square_gof([25, 25, 25, 25], [25, 25, 25, 25])
    assert stat == 0.0 and p == 1.0
    _, p_bad = chi_square_gof([100, 0, 0, 0], [25, 25, 25, 25])
    assert p_bad < 1e-10
    with pytest.raises(InvalidParameterError):
        chi_square_gof([1, 2], [1, 0])


def test_empirical_distribution_cdf():
    e = EmpiricalDistribution(np.array([3.0, 1.0, 2.0]))
    assert np.array_equal(e.values, [1.0, 2.0, 3.0])
    assert e.cdf(np.array([0.5, 1.0, 2.5, 9.0])).tolist() == [0.0, 1 / 3, 2 / 3, 1.0]
    with pytest.raises(InsufficientDataError):
        EmpiricalDistribution(np.array([]))
