import time

import numpy as np
import pytest

from pexcite import ReferenceInput, ScaledStep, mrac
from pexcite.config import ExperimentConfig, default_config
from pexcite.trajectory import window

DEMO_W_ROWS = [[2.0, 1.0], [1.0, -2.0], [1.5, -0.5], [0.5, 2.0]]
DEMO_B = [1.0, 2.0, 2.5, 3.0]
DEMO_THETA = [-1.2, 2.7, 0.8, -3.2]


@pytest.fixture(scope="session")
def demo_config():
    return ExperimentConfig(default_config())


@pytest.fixture(scope="session")
def demo_arrangement(demo_config):
    return demo_config.arrangement()


@pytest.fixture(scope="session")
def demo_reference(demo_config):
    return demo_config.reference()


@pytest.fixture(scope="session")
def demo_adaptation(demo_config):
    return demo_config.adaptation()


@pytest.fixture(scope="session")
def demo_plant(demo_config):
    return demo_config.plant()


def _timed_sim(plant, ref, adapt, signal, **kw):
    start = time.perf_counter()
    sim = mrac.simulate(plant, ref, adapt, signal, **kw)
    return sim, time.perf_counter() - start


@pytest.fixture(scope="session")
def scenario1(demo_plant, demo_reference, demo_adaptation):
    """Default 200 s run driven by the single-sine input."""
    sim, elapsed = _timed_sim(demo_plant, demo_reference, demo_adaptation,
                              ReferenceInput.r1())
    sim.elapsed = elapsed
    return sim


@pytest.fixture(scope="session")
def scenario2(demo_plant, demo_reference, demo_adaptation):
    """Default 200 s run driven by the offset two-sine input."""
    sim, elapsed = _timed_sim(demo_plant, demo_reference, demo_adaptation,
                              ReferenceInput.r2())
    sim.elapsed = elapsed
    return sim


@pytest.fixture(scope="session")
def scenario_step(demo_config, demo_reference, demo_adaptation):
    """Scenario-1 variant with unit-scale step activations end to end."""
    from pexcite import CanonicalPlant

    plant = CanonicalPlant(
        a1=2.0, a2=0.5, beta=0.75,
        arr=demo_config.arrangement(),
        kind=ScaledStep((1.0, 1.0, 1.0, 1.0)),
        theta=np.asarray(DEMO_THETA),
    )
    sim, elapsed = _timed_sim(plant, demo_reference, demo_adaptation,
                              ReferenceInput.r1())
    sim.elapsed = elapsed
    return sim


@pytest.fixture(scope="session")
def scenario1_steady(scenario1):
    """Scenario-1 trajectory restricted to the steady-state half."""
    return window(scenario1.traj_x, 100.0, 100.0)


@pytest.fixture(scope="session")
def scenario2_steady(scenario2):
    return window(scenario2.traj_x, 100.0, 100.0)
