import math

import numpy as np
import pytest

from motkit.trajectory import (
    LineFit,
    SmoothingParams,
    TrajectoryMemory,
    correct_measurement,
    fit_initial_segment,
    project_onto_fit,
)

PARAMS = SmoothingParams()


def memory_from_points(points, hits=None, coasted=None):
    pts = [np.asarray(p, dtype=float) for p in points]
    return TrajectoryMemory(
        raw_centers=[p.copy() for p in pts],
        optimal_centers=[p.copy() for p in pts],
        smoothed_set=[p.copy() for p in pts],
        coasted=list(coasted) if coasted is not None else [False] * len(pts),
        hits=hits if hits is not None else len(pts) - 1,
    )


def test_smoothing_params_validation():
    with pytest.raises(ValueError):
        SmoothingParams(k=1)
    with pytest.raises(ValueError):
        SmoothingParams(dt=0)


# ----------------------------------------------------------------- projection
def test_project_symmetric_case():
    fit = LineFit(a=1.0, b=0.0)
    assert np.allclose(project_onto_fit([1.0, 0.0], fit), [0.5, 0.5])


def test_project_point_on_line_is_fixed():
    fit = LineFit(a=2.0, b=1.0)
    assert np.allclose(project_onto_fit([3.0, 7.0], fit), [3.0, 7.0])


def test_project_horizontal_line_drops_y():
    fit = LineFit(a=0.0, b=2.0)
    assert np.allclose(project_onto_fit([3.0, 5.0], fit), [3.0, 2.0])


def test_project_idempotent_fuzz(rng):
    for _ in range(500):
        fit = LineFit(a=float(rng.uniform(-5, 5)), b=float(rng.uniform(-10, 10)),
                      swapped=bool(rng.random() < 0.5))
        p = rng.uniform(-100, 100, size=2)
        once = project_onto_fit(p, fit)
        twice = project_onto_fit(once, fit)
        assert np.all(np.abs(twice - once) < 1e-12)


def test_projection_is_orthogonal(rng):
    for _ in range(200):
        fit = LineFit(a=float(rng.uniform(-5, 5)), b=float(rng.uniform(-10, 10)))
        p = rng.uniform(-100, 100, size=2)
        f = project_onto_fit(p, fit)
        direction = np.array([1.0, fit.a])
        assert abs(float((p - f) @ direction)) < 1e-8


# ------------------------------------------------------------------- fitting
def test_fit_collinear_points_recovered_exactly():
    pts = [(x, 0.5 * x + 1.0) for x in range(6)]
    mem = memory_from_points(pts, hits=5)
    fit_initial_segment(mem, PARAMS)
    assert mem.fit is not None
    assert not mem.fit.swapped
    assert math.isclose(mem.fit.a, 0.5, abs_tol=1e-9)
    assert math.isclose(mem.fit.b, 1.0, abs_tol=1e-9)
    for original, smoothed in zip(pts, mem.smoothed_set):
        assert np.allclose(smoothed, original)


def test_fit_matches_ols_oracle():
    pts = [(0, 0), (1, 1), (2, 0), (3, 1), (4, 0), (5, 1)]
    mem = memory_from_points(pts, hits=5)
    fit_initial_segment(mem, PARAMS)
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    design = np.stack([xs, np.ones_like(xs)], axis=1)
    (a_ref, b_ref), *_ = np.linalg.lstsq(design, ys, rcond=None)
    assert math.isclose(mem.fit.a, a_ref, abs_tol=1e-9)
    assert math.isclose(mem.fit.b, b_ref, abs_tol=1e-9)


def test_fit_near_vertical_uses_swapped_axes():
    pts = [(0.01 * i, 10.0 * i) for i in range(6)]
    mem = memory_from_points(pts, hits=5)
    fit_initial_segment(mem, PARAMS)
    assert mem.fit.swapped
    # projections satisfy the on-line invariant in the swapped parametrization
    for p in mem.smoothed_set:
        assert abs(p[0] - (mem.fit.a * p[1] + mem.fit.b)) < 1e-6


def test_fit_coincident_points_flagged_degenerate():
    mem = memory_from_points([(3.0, 4.0)] * 6, hits=5)
    fit_initial_segment(mem, PARAMS)
    assert mem.fit is None
    assert mem.fit_degenerate
    for p in mem.smoothed_set:
        assert np.allclose(p, [3.0, 4.0])


def test_smoothed_points_lie_on_fitted_line(rng):
    for _ in range(100):
        pts = rng.uniform(-50, 50, size=(6, 2))
        mem = memory_from_points(pts, hits=5)
        fit_initial_segment(mem, PARAMS)
        if mem.fit is None:
            continue
        a, b = mem.fit.a, mem.fit.b
        for p in mem.smoothed_set:
            x, y = (p[1], p[0]) if mem.fit.swapped else (p[0], p[1])
            assert abs(y - (a * x + b)) < 1e-6


# -------------------------------------------------------- measurement correction
def test_correction_passthrough_for_young_track():
    mem = memory_from_points([(0, 0), (1, 1)], hits=1)
    z = correct_measurement(mem, [10.0, 20.0], PARAMS)
    assert np.allclose(z, [10.0, 20.0])


def test_correction_collinear_radius_averaging():
    pts = [(-3, 0), (-2, 0), (-1, 0), (0, 0), (1, 0)]
    mem = memory_from_points(pts, hits=5)
    z = correct_measurement(mem, [1.0, 0.0], PARAMS)
    # O=(-1,0), A=(1,0), B=(1,0): here A == B so z == B; shift B outward instead
    mem2 = memory_from_points([(0, 0), (0.5, 0), (1, 0)], hits=5)
    z2 = correct_measurement(mem2, [2.0, 0.0], PARAMS)
    assert np.allclose(z, [1.0, 0.0])
    assert np.allclose(z2, [1.5, 0.0])


def test_correction_perpendicular_bisection():
    mem = memory_from_points([(0, 0), (0.5, 0), (1, 0)], hits=5)
    z = correct_measurement(mem, [0.0, 1.0], PARAMS)
    assert np.allclose(z, [math.sqrt(2) / 2, math.sqrt(2) / 2])


def test_correction_zero_length_anchor_falls_back():
    mem = memory_from_points([(2, 2), (2, 2), (2, 2)], hits=5)
    z = correct_measurement(mem, [5.0, 6.0], PARAMS)
    assert np.allclose(z, [5.0, 6.0])


def test_correction_collinear_equal_radius_fixed_point():
    # collinear O, A, B with |OB| == |OA| means B == A; output is exactly B
    mem = memory_from_points([(0, 0), (1.5, 2), (3, 4)], hits=5)
    z = correct_measurement(mem, [3.0, 4.0], PARAMS)
    assert np.allclose(z, [3.0, 4.0], atol=1e-12)


def test_correction_radius_and_cone_invariants(rng):
    for _ in range(2000):
        history = rng.uniform(-100, 100, size=(PARAMS.dt + 1 + int(rng.integers(0, 4)), 2))
        mem = memory_from_points(history, hits=PARAMS.k + int(rng.integers(0, 10)))
        B = rng.uniform(-100, 100, size=2)
        M = mem.smoothed_set
        O, A = M[-1 - PARAMS.dt], M[-1]
        oa, ob = A - O, B - O
        if np.hypot(*oa) == 0.0 or np.hypot(*ob) == 0.0:
            continue
        z = correct_measurement(mem, B, PARAMS)
        radius = 0.5 * (np.hypot(*oa) + np.hypot(*ob))
        assert abs(np.hypot(*(z - O)) - radius) < 1e-9
        # direction lies in the closed cone spanned by OA and OB
        full = math.atan2(oa[0] * ob[1] - oa[1] * ob[0], float(oa @ ob))
        part = math.atan2(oa[0] * (z - O)[1] - oa[1] * (z - O)[0], float(oa @ (z - O)))
        if abs(full) > 1e-12:
            t = part / full
            assert -1e-9 <= t <= 1.0 + 1e-9
        else:
            assert abs(part) < 1e-9


# ------------------------------------------------------------------ histories
def test_memory_histories_stay_aligned():
    mem = TrajectoryMemory.from_center([0.0, 0.0])
    for i in range(1, 4):
        mem.append_update([float(i), 0.0], [float(i) - 0.1, 0.0])
    mem.append_coast([4.0, 0.0])
    assert len(mem.raw_centers) == len(mem.optimal_centers) == len(mem.smoothed_set) == 5
    assert mem.hits == 3
    assert mem.coasted == [False, False, False, False, True]
    assert mem.trailing_coast_run() == 1
