import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from crackscan.calibration.nelder_mead import nelder_mead_minimize
from crackscan.calibration.schemas import NelderMeadConfig
from crackscan.exceptions import NonFiniteObjective, ValidationError


def rosenbrock(x: np.ndarray) -> float:
    return float((1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2)


def shifted_bowl(x: np.ndarray) -> float:
    return float(np.sum((x - np.array([0.3, -0.2, 0.1])) ** 2))


TIGHT = NelderMeadConfig(
    initial_step=(0.5,), max_iters=5000, simplex_tolerance=1e-10, restarts=2
)


class TestNelderMead:
    def test_quadratic_minimum(self):
        result = nelder_mead_minimize(shifted_bowl, np.zeros(3), TIGHT)

        np.testing.assert_allclose(result.x, [0.3, -0.2, 0.1], atol=1e-5)
        assert result.fun < 1e-10
        assert result.converged

    def test_rosenbrock(self):
        result = nelder_mead_minimize(rosenbrock, [-1.2, 1.0], TIGHT)

        np.testing.assert_allclose(result.x, [1.0, 1.0], atol=1e-3)

    def test_history_never_increases(self):
        result = nelder_mead_minimize(rosenbrock, [-1.2, 1.0], TIGHT)

        assert result.history[0] == rosenbrock(np.array([-1.2, 1.0]))
        assert all(b <= a for a, b in zip(result.history, result.history[1:]))

    def test_iteration_cap(self):
        cfg = NelderMeadConfig(initial_step=(0.5,), max_iters=3, restarts=0)

        result = nelder_mead_minimize(rosenbrock, [-1.2, 1.0], cfg)

        assert result.iterations == 3
        assert not result.converged

    def test_non_finite_start(self):
        with pytest.raises(NonFiniteObjective):
            nelder_mead_minimize(lambda x: math.nan, [0.0])

    def test_non_finite_values_are_avoided(self):
        def guarded(x):
            return math.nan if x[0] > 0.5 else (x[0] - 1.0) ** 2

        result = nelder_mead_minimize(guarded, [0.0], TIGHT)

        assert result.x[0] <= 0.5
        assert math.isfinite(result.fun)

    def test_step_count_must_match_dimension(self):
        cfg = NelderMeadConfig(initial_step=(0.1, 0.1))

        with pytest.raises(ValidationError):
            nelder_mead_minimize(shifted_bowl, np.zeros(3), cfg)

    def test_parallel_map_gives_identical_result(self):
        sequential = nelder_mead_minimize(rosenbrock, [-1.2, 1.0], TIGHT)
        with ThreadPoolExecutor(max_workers=4) as pool:
            parallel = nelder_mead_minimize(
                rosenbrock, [-1.2, 1.0], TIGHT, map_fn=pool.map
            )

        assert parallel.x == sequential.x
        assert parallel.evaluations == sequential.evaluations
