import numpy as np
import pytest

from btt_grand.code import LinearCode, bch_code
from btt_grand.errors import AnalysisError, ConfigurationError
from btt_grand.gf2 import BitMatrix
from btt_grand.sim import (
    ExperimentPlan,
    PointResult,
    query_reduction_ratios,
    run,
    snr_at_bler,
    wilson_interval,
)
from btt_grand.tree import identity_transform


def _pt(ebn0, ell, errors, frames=1000, avgq=10.0):
    return PointResult(ebn0, ell, frames, errors, 0, avgq, avgq, 0.0, 1.0)


def test_plan_validation():
    code = bch_code(7, 4)
    for bad in (dict(frames=0), dict(max_queries=0), dict(ells=()), dict(ells=(-1,)),
                dict(threads=0)):
        with pytest.raises(ConfigurationError):
            ExperimentPlan(code, (1.0,), **bad)
    with pytest.raises(ConfigurationError):
        ExperimentPlan(code, ())
    assert ExperimentPlan(code, (1.0,), ells=(0, 2)).btt_depth == 2


def test_deterministic_across_threads():
    code = bch_code(31, 21)
    runs = [run(ExperimentPlan(code, (3.0, 4.0), (0, 1, 2), 700, 10**4, seed=5, threads=t))
            for t in (1, 4)]
    for a, b in zip(*runs):
        assert a == b and np.array_equal(a.queries, b.queries)


def test_noiseless_point():
    res = run(ExperimentPlan(bch_code(31, 21), (40.0,), (0, 1, 2), 300, seed=1, check=True))
    for r in res:
        assert r.bler == 0 and r.avg_queries == 1.0 and r.geomean_queries == 1.0
        assert r.bler_lo == 0.0


def test_depth_beyond_transform():
    code = LinearCode.from_parity_check(BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]]))
    with pytest.raises(ConfigurationError):
        run(ExperimentPlan(code, (1.0,), (0, 2), 10), identity_transform(code.H))


def test_segmentation_saves_queries():
    res = run(ExperimentPlan(bch_code(31, 21), (3.0,), (0, 1), 2000, seed=2, check=True))
    assert res[1].avg_queries < res[0].avg_queries
    assert all(r.abandoned == 0 for r in res)


def test_ratios():
    res = [_pt(3.0, 0, 5, avgq=100.0), _pt(3.0, 1, 5, avgq=50.0), _pt(3.0, 2, 5, avgq=25.0)]
    r = query_reduction_ratios(res)
    assert r[(3.0, 0)] == 0.0 and r[(3.0, 1)] == pytest.approx(1.0) and r[(3.0, 2)] == pytest.approx(2.0)
    with pytest.raises(AnalysisError):
        query_reduction_ratios(res[1:])


def test_ratios_vanish_at_high_snr():
    res = run(ExperimentPlan(bch_code(31, 21), (9.0,), (0, 1, 2), 500, seed=3))
    assert all(abs(v) < 0.05 for v in query_reduction_ratios(res).values())


def test_wilson_examples():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0.03 < hi < 0.04
    lo, hi = wilson_interval(100, 100)
    assert hi == 1.0 and 0.96 < lo < 0.97
    lo, hi = wilson_interval(10, 100)
    assert lo == pytest.approx(0.0552, abs=1e-3) and hi == pytest.approx(0.1744, abs=1e-3)
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


def test_wilson_coverage():
    # binomial draws at a known rate; 95% intervals should cover about 95% of the time
    rng = np.random.default_rng(0)
    p, trials = 0.03, 400
    hits = 0
    reps = 4000
    for e in rng.binomial(trials, p, reps):
        lo, hi = wilson_interval(int(e), trials)
        hits += lo <= p <= hi
    assert 0.93 <= hits / reps <= 0.97


def test_snr_at_bler():
    res = [_pt(3.0, 0, 100), _pt(4.0, 0, 10), _pt(5.0, 0, 1)]
    assert snr_at_bler(res, 0, 0.01) == pytest.approx(4.0)
    assert snr_at_bler(res, 0, 0.1 ** 1.5) == pytest.approx(3.5)
    with pytest.raises(AnalysisError):
        snr_at_bler(res, 0, 0.5)
    with pytest.raises(AnalysisError):
        snr_at_bler(res, 1, 0.01)
