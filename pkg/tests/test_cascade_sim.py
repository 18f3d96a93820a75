import networkx as nx
import numpy as np
import pytest
from pydantic import ValidationError

from pooltest.cascade_sim import measure_prevalence, run_cascade
from pooltest.errors import InvalidParameterError
from pooltest.graph_io import generate_small_world, karate_club
from pooltest.models import CascadeConfig, StatusVector
from pooltest.seeding import derive_rng


@pytest.fixture(scope="module")
def karate():
    return karate_club()


@pytest.fixture(scope="module")
def small_world():
    return generate_small_world()


def seeds_of(graph, num_seeds, seed):
    """Seed selection only: phi = 0 infects nothing beyond the seeds."""
    status = run_cascade(graph, CascadeConfig(phi=0.0, num_seeds=num_seeds), rng=derive_rng(seed))
    return set(np.flatnonzero(status.bits).tolist())


def ball(graph, sources, radius):
    reached = set()
    for s in sources:
        reached |= set(nx.single_source_shortest_path_length(graph.g, s, cutoff=radius))
    return reached


def test_defaults():
    config = CascadeConfig()
    assert (config.phi, config.depth, config.num_seeds) == (0.1, 2, 1)
    with pytest.raises(ValidationError):
        CascadeConfig(phi=1.5)


def test_zero_phi_infects_only_seeds(small_world):
    status = run_cascade(small_world, CascadeConfig(phi=0.0, num_seeds=5), rng=derive_rng(3))
    assert int(status.bits.sum()) == 5
    assert measure_prevalence(status) == pytest.approx(0.005)


def test_full_phi_fills_the_neighbourhood(karate):
    seeds = seeds_of(karate, 2, seed=8)
    status = run_cascade(karate, CascadeConfig(phi=1.0, depth=2, num_seeds=2), rng=derive_rng(8))
    assert set(np.flatnonzero(status.bits).tolist()) == ball(karate, seeds, 2)


def test_depth_zero_keeps_seeds(karate):
    seeds = seeds_of(karate, 3, seed=4)
    status = run_cascade(karate, CascadeConfig(phi=1.0, depth=0, num_seeds=3), rng=derive_rng(4))
    assert set(np.flatnonzero(status.bits).tolist()) == seeds


def test_infection_stays_within_depth(karate):
    for run in range(50):
        seeds = seeds_of(karate, 2, seed=run)
        status = run_cascade(karate, CascadeConfig(phi=0.4, depth=2, num_seeds=2), rng=derive_rng(run))
        infected = set(np.flatnonzero(status.bits).tolist())
        assert seeds <= infected <= ball(karate, seeds, 2)


def test_monotone_in_phi_with_shared_coins(karate):
    n = karate.n
    for run in range(30):
        uniforms = derive_rng(run, 1).random((n, n))
        sets = []
        for phi in (0.05, 0.2, 0.5, 0.9):
            config = CascadeConfig(phi=phi, depth=3, num_seeds=2)
            status = run_cascade(karate, config, rng=derive_rng(run), uniforms=uniforms)
            sets.append(set(np.flatnonzero(status.bits).tolist()))
        assert all(a <= b for a, b in zip(sets, sets[1:]))


def test_deterministic(karate):
    config = CascadeConfig(phi=0.3, num_seeds=3, seed=12)
    assert np.array_equal(run_cascade(karate, config).bits, run_cascade(karate, config).bits)


def test_too_many_seeds(karate):
    with pytest.raises(InvalidParameterError):
        run_cascade(karate, CascadeConfig(num_seeds=35))


def test_measure_prevalence():
    assert measure_prevalence(StatusVector(bits=[0, 0, 0, 0])) == 0.0
    assert measure_prevalence(StatusVector(bits=[1, 1, 1])) == 1.0
    with pytest.raises(InvalidParameterError):
        measure_prevalence(StatusVector(bits=[]))


def test_small_world_prevalence(small_world):
    runs = 2000
    prevalences = [
        measure_prevalence(run_cascade(small_world, CascadeConfig(num_seeds=1), rng=derive_rng(0, 1, run)))
        for run in range(runs)
    ]
    assert np.mean(prevalences) == pytest.approx(0.0126, abs=0.003)
