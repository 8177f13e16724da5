import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shorsim.noise import ErrorConfig
from shorsim.numtheory import multiplicative_order
from shorsim.problems import FactoringProblem
from shorsim.spectrum import DistributionSpec, distribution
from shorsim.statevector import run_iterative_shor
from shorsim.trajectories import cyclic_order, sample_bitstrings

CONFIGS = [
    ErrorConfig(),
    ErrorConfig("amplitude_init", 0.3),
    ErrorConfig("phase_init", 0.2),
    ErrorConfig("classical_measure", 0.15),
    ErrorConfig("quantum_measure", pauli=(0.05, 0.07, 0.02)),
    ErrorConfig("bitflip", 0.1),
]


@pytest.mark.parametrize("cfg", CONFIGS, ids=lambda c: c.kind.value)
@pytest.mark.parametrize("N,a", [(221, 5), (391, 7), (143, 12)])
def test_matches_statevector(cfg, N, a):
    prob = FactoringProblem.make(N, a, seed=3)
    batch = sample_bitstrings(prob, 12, cfg, detail=True)
    for i in range(12):
        bits, traces = run_iterative_shor(prob, cfg, index=i)
        assert batch.j[i] == bits.j
        assert np.allclose(batch.p1[i], [tr.p1 for tr in traces], atol=1e-9)


def test_cyclic_order_matches_multiplicative_order():
    for N, a, p, q in [(15, 7, 3, 5), (15707, 833, 113, 139), (524137, 5, 557, 941)]:
        assert cyclic_order(a, N) == multiplicative_order(a, N, p, q).value


def test_first_index_offsets_trajectories():
    prob = FactoringProblem.make(391, 7, seed=1)
    whole = sample_bitstrings(prob, 20)
    tail = sample_bitstrings(prob, 8, first_index=12)
    assert np.array_equal(whole[12:], tail)


def test_seed_changes_samples():
    prob = FactoringProblem.make(391, 7)
    assert not np.array_equal(sample_bitstrings(prob, 50, seed=1), sample_bitstrings(prob, 50, seed=2))


def test_error_free_histogram_tracks_analytic():
    prob = FactoringProblem.make(21, 2, t=7)
    j = sample_bitstrings(prob, 20000, seed=9)
    freq = np.bincount(j, minlength=128) / len(j)
    ref = distribution(DistributionSpec(6, 7))
    assert np.max(np.abs(freq - ref)) < 0.01


def test_t_limit():
    with pytest.raises(ValueError):
        sample_bitstrings(FactoringProblem.make(15, 7), 1, t=63)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([15, 21, 33, 35, 39, 51, 55, 57, 65, 77, 85, 91, 95]), st.integers(0, 10**6))
def test_samples_land_where_analytic_mass_is(N, seed):
    rng = np.random.default_rng(seed)
    a = int(rng.integers(2, N))
    if np.gcd(a, N) != 1:
        return
    prob = FactoringProblem.make(N, a, seed=seed)
    ref = distribution(DistributionSpec(multiplicative_order(a, N).value, prob.t))
    j = sample_bitstrings(prob, 64)
    assert np.all(ref[j] > 1e-14)
