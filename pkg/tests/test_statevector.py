import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shorsim.noise import ErrorConfig
from shorsim.problems import FactoringProblem
from shorsim.rng import _Sequence
from shorsim.spectrum import DistributionSpec, distribution
from shorsim.statevector import (
    DegenerateBranch,
    QubitCeilingExceeded,
    apply_hadamard_top,
    apply_oracle,
    apply_phase,
    build_permutation_plan,
    exhaustive_joint_distribution,
    init_state,
    measure_top,
    reset_top,
    run_iterative_shor,
    stage_multipliers,
)
from shorsim.common import BudgetExceeded

H = math.sqrt(0.5)


def random_state(n, shards, rng):
    state = init_state(n, shard_count=shards)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amps /= np.linalg.norm(amps)
    for k, chunk in enumerate(np.split(amps, shards)):
        state.shards[k][:] = chunk
    return state


def test_init_plus_state():
    state = init_state(2)
    assert np.allclose(state.amplitudes(), [0, H, 0, H])
    assert state.norm() == pytest.approx(1.0)


def test_init_amplitude_error_pins_zero():
    top = ErrorConfig("amplitude_init", 1.0).top_state()
    assert np.allclose(init_state(2, top).amplitudes(), [0, 1, 0, 0])


def test_oracle_moves_single_amplitude():
    n = 7  # six work qubits hold N = 55
    state = init_state(n, shard_count=4)
    for s in state.shards:
        s[:] = 0
    base = 1 << (n - 1)
    amps = np.zeros(1 << n, complex)
    amps[base + 3] = 1
    amps[base + 60] = 0.5  # y >= N stays put
    for k, chunk in enumerate(np.split(amps, 4)):
        state.shards[k][:] = chunk
    apply_oracle(state, 16, 55)
    out = state.amplitudes()
    assert out[base + 48] == 1 and out[base + 3] == 0 and out[base + 60] == 0.5


def test_oracle_identity_for_unit_multiplier():
    state = random_state(6, 4, np.random.default_rng(0))
    before = state.amplitudes().copy()
    apply_oracle(state, 1, 31)
    assert np.array_equal(before, state.amplitudes())


def test_plan_structure_for_55():
    plan = build_permutation_plan(16, 55, 7, 32)
    assert plan.moved() == 55
    # 16 shards per group of 64 entries: the last covers y = 60..63 >= N
    assert plan.receives[-1] == () and plan.sends[-1] == ()
    perm = plan.as_permutation()
    inv = build_permutation_plan(pow(16, -1, 55), 55, 7, 32).as_permutation()
    assert np.array_equal(inv[perm], np.arange(64))
    assert sorted(perm[:55]) == list(range(55))


@settings(max_examples=100, deadline=None)
@given(st.integers(5, 2**16 - 1), st.integers(0, 2**32), st.sampled_from([2, 4, 8]))
def test_oracle_then_inverse_restores(N, seed, shards):
    rng = np.random.default_rng(seed)
    a = int(rng.integers(2, N))
    if math.gcd(a, N) != 1:
        return
    n = N.bit_length() + 1
    state = random_state(n, shards, rng)
    before = state.amplitudes().copy()
    apply_oracle(state, a, N)
    assert state.norm() == pytest.approx(1.0, abs=1e-9)
    apply_oracle(state, pow(a, -1, N), N)
    assert np.max(np.abs(state.amplitudes() - before)) <= 1e-12


def test_phase_examples():
    state = init_state(3)
    apply_phase(state, 0, 0)
    assert np.allclose(state.amplitudes(), [0, H, 0, 0, 0, H, 0, 0])
    apply_phase(state, 1, 1)
    assert np.allclose(state.amplitudes()[5], 1j * H)
    state = init_state(3)
    apply_phase(state, 3, 5)
    assert np.allclose(state.amplitudes()[5], H * np.exp(1j * 5 * np.pi / 8))


def test_hadamard_examples():
    state = init_state(3)
    apply_hadamard_top(state)
    assert np.allclose(state.amplitudes(), [0, 1, 0, 0, 0, 0, 0, 0])
    minus = init_state(3, (H, -H))
    apply_hadamard_top(minus)
    assert np.allclose(minus.amplitudes(), [0, 0, 0, 0, 0, 1, 0, 0])
    state = random_state(8, 8, np.random.default_rng(1))
    before = state.amplitudes().copy()
    apply_hadamard_top(state)
    apply_hadamard_top(state)
    assert np.max(np.abs(state.amplitudes() - before)) < 1e-12


def test_measure_zero_group():
    state = init_state(3)
    apply_hadamard_top(state)
    for r in (0.0, 0.5, 0.999):
        bit, p1, event = measure_top(state, _Sequence([r]))
        assert (bit, p1, event) == (0, 0.0, None)


def test_quantum_error_mixes_certain_outcome():
    state = init_state(3, (H, -H))
    apply_hadamard_top(state)
    cfg = ErrorConfig("quantum_measure", pauli=(0.25, 0.25, 0.0))
    # with p1 = 1 and delta = 0.5 the sampled outcome is a fair coin
    bits = [measure_top(state, _Sequence([r, 0.9]), cfg)[0] for r in (0.49, 0.51)]
    assert bits == [1, 0]


def test_reset_restores_norm_and_rejects_empty_branch():
    rng = np.random.default_rng(2)
    state = random_state(6, 4, rng)
    reset_top(state, 1)
    assert state.norm() == pytest.approx(1.0, abs=1e-12)
    state = init_state(4)
    apply_hadamard_top(state)
    with pytest.raises(DegenerateBranch):
        reset_top(state, 1)


def test_reset_error_branch_uses_opposite_projection():
    rng = np.random.default_rng(3)
    state = random_state(5, 2, rng)
    lower1 = np.concatenate(state.group(1)).copy()
    lower1 /= np.linalg.norm(lower1)
    reset_top(state, 0, "error")
    assert np.allclose(np.concatenate(state.group(0)), lower1 * H)
    assert np.allclose(np.concatenate(state.group(1)), lower1 * H)


def test_stage_multipliers_power_of_two_order():
    mults = stage_multipliers(7, 15, 8)
    assert mults[-1] == 7 and mults[-2] == 4
    assert mults[:-2] == [1] * 6


def test_stage_zero_probability_is_half():
    rng = np.random.default_rng(4)
    for _ in range(10):
        N = int(rng.choice([15, 21, 33, 35, 55, 77, 91, 143]))
        a = next(x for x in rng.integers(2, N, size=50) if math.gcd(int(x), N) == 1)
        prob = FactoringProblem.make(N, int(a))
        _, traces = run_iterative_shor(prob, seed=int(rng.integers(1000)))
        # the first stage multiplier is a^(2^(t-1)); it acts trivially when the order divides 2^(t-1)
        expected = 0.0 if stage_multipliers(prob.a, N, prob.t)[0] == 1 else 0.5
        assert traces[0].p1 == pytest.approx(expected, abs=1e-15)


def test_run_lands_in_support():
    prob = FactoringProblem.make(15, 7)
    for i in range(30):
        bits, traces = run_iterative_shor(prob, index=i)
        assert bits.j in {0, 64, 128, 192}
        assert len(traces) == 8


def test_classical_error_certain_flip():
    prob = FactoringProblem.make(21, 2)
    _, traces = run_iterative_shor(prob, ErrorConfig("classical_measure", 1.0))
    assert all(tr.error_events == ("classical_flip",) for tr in traces)


def test_norm_preserved_through_twenty_qubit_circuit():
    N, a = 524137, 5  # 20 work qubits would exceed; use the 19-bit row with 20 qubits total
    n = N.bit_length() + 1
    state = init_state(n, shard_count=8)
    rng = np.random.default_rng(5)
    j = 0
    for cbit, mult in enumerate(stage_multipliers(a, N, 4)):
        apply_oracle(state, mult, N)
        assert abs(state.norm() - 1) < 1e-9
        apply_phase(state, cbit, j)
        apply_hadamard_top(state)
        assert abs(state.norm() - 1) < 1e-9
        bit, _, _ = measure_top(state, rng)
        j |= bit << cbit
        reset_top(state, bit)
        assert abs(state.norm() - 1) < 1e-9


@pytest.mark.parametrize("shards", [2, 4, 8, 16])
def test_shard_count_independence(shards):
    prob = FactoringProblem.make(221, 5, seed=11)
    cfg = ErrorConfig("quantum_measure", pauli=(0.02, 0.03, 0.01))
    ref = [run_iterative_shor(prob, cfg, index=i)[0].j for i in range(6)]
    got = [run_iterative_shor(prob, cfg, index=i, shard_count=shards, workers=3)[0].j for i in range(6)]
    assert got == ref


def test_exhaustive_distribution_examples():
    prob = FactoringProblem.make(15, 7)
    dist = exhaustive_joint_distribution(prob)
    assert dist.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.flatnonzero(dist > 1e-12).tolist() == [0, 64, 128, 192]
    assert np.allclose(dist[[0, 64, 128, 192]], 0.25)


def test_exhaustive_matches_analytic_small():
    for N, a, t in [(21, 2, 9), (35, 3, 10), (33, 5, 8)]:
        prob = FactoringProblem.make(N, a, t=t)
        from shorsim.numtheory import multiplicative_order
        ref = distribution(DistributionSpec(multiplicative_order(a, N).value, t))
        assert np.max(np.abs(exhaustive_joint_distribution(prob) - ref)) < 1e-10


def test_exhaustive_with_errors_is_normalized():
    prob = FactoringProblem.make(21, 2, t=7)
    for cfg in (ErrorConfig("classical_measure", 0.1), ErrorConfig("quantum_measure", pauli=(0.05, 0.05, 0)),
                ErrorConfig("bitflip", 0.2), ErrorConfig("phase_init", 0.3)):
        assert exhaustive_joint_distribution(prob, cfg).sum() == pytest.approx(1.0, abs=1e-10)


def test_budget_limits():
    with pytest.raises(BudgetExceeded):
        exhaustive_joint_distribution(FactoringProblem.make(15, 7, t=20))
    with pytest.raises(QubitCeilingExceeded):
        run_iterative_shor(FactoringProblem.make(524137, 5), qubit_ceiling=12)
