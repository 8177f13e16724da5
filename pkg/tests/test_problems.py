import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from table_data import TABLE

from shorsim.problems import (
    FactoringProblem,
    generate_uniform_problem,
    largest_interesting_semiprime,
    pick_base,
    problem_from_record,
    problem_to_record,
    read_manifest,
    recommended_t,
    uniform_problem_set,
    write_manifest,
)


def test_recommended_t_examples():
    assert recommended_t(15) == 8
    assert recommended_t(15707) == 28
    assert recommended_t(549755813701) == 78


@pytest.mark.parametrize("row", [r for r in TABLE if r[0] <= 21])
def test_table_rows_small(row):
    n, N, p, q, t = row
    rec = largest_interesting_semiprime(n)
    assert (rec.N, rec.p, rec.q, rec.t_recommended) == (N, p, q, t)


def test_table_rows_large():
    for n, N, p, q, t in [r for r in TABLE if 22 <= r[0] <= 30]:
        rec = largest_interesting_semiprime(n)
        assert (rec.N, rec.p, rec.q, rec.t_recommended) == (N, p, q, t)


def test_table_has_no_four_qubit_row():
    with pytest.raises(ValueError):
        largest_interesting_semiprime(4)


def test_published_values_are_semiprimes():
    # the frozen rows themselves, checked with an independent factorizer
    for n, N, p, q, t in TABLE:
        assert sympy.factorint(N) == {p: 1, q: 1}
        assert N < 2 ** (n - 1) and t == (N * N - 1).bit_length()


def test_uniform_problem_L4_is_15():
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert generate_uniform_problem(4, rng).N == 15


def test_uniform_problem_L9_support():
    nine_bit = {n for n in range(256, 512)
                if len(f := sympy.factorint(n)) == 2 and set(f.values()) == {1} and 2 not in f}
    rng = np.random.default_rng(1)
    drawn = {generate_uniform_problem(9, rng).N for _ in range(2000)}
    assert drawn <= nine_bit
    assert len(drawn) > 0.9 * len(nine_bit)


@settings(max_examples=50, deadline=None)
@given(st.integers(4, 40), st.integers(0, 2**32))
def test_uniform_problem_invariants(L, seed):
    prob = generate_uniform_problem(L, np.random.default_rng(seed))
    assert prob.N.bit_length() == L and prob.N % 2 == 1
    assert math.gcd(prob.a, prob.N) == 1 and 1 < prob.a < prob.N
    assert prob.p < prob.q and prob.p * prob.q == prob.N
    assert sympy.isprime(prob.p) and sympy.isprime(prob.q)
    assert prob.t == recommended_t(prob.N)


def test_uniform_p_distribution():
    rng = np.random.default_rng(2024)
    L = 16
    primes = [int(x) for x in sympy.primerange(3, math.isqrt(1 << L) + 1)]
    # p is uniform over primes that admit at least one q
    admissible = [p for p in primes if any(
        sympy.isprime(q) and q > p and (p * q).bit_length() == L
        for q in range(-(-(1 << (L - 1)) // p), (1 << L) // p + 1))]
    draws = [generate_uniform_problem(L, rng).p for _ in range(10000)]
    edges = np.quantile(admissible, np.linspace(0, 1, 11))
    expected = np.histogram(admissible, bins=edges)[0] / len(admissible) * len(draws)
    observed = np.histogram(draws, bins=edges)[0]
    assert stats.chisquare(observed, expected).pvalue > 1e-3


def test_pick_base_is_uniform_over_units():
    rng = np.random.default_rng(3)
    seen = {pick_base(15, rng)[0] for _ in range(500)}
    assert seen == {2, 4, 7, 8, 11, 13, 14}


def test_pick_base_reports_classical_hits():
    rng = np.random.default_rng(4)
    hits = []
    for _ in range(200):
        a, h = pick_base(21, rng)
        hits.extend(h)
    assert hits and all(g in (3, 7) for g in hits)


def test_large_base_is_valid():
    FactoringProblem.make(8589933181, 3974323683, p=89597, q=95873)


def test_problem_validation():
    with pytest.raises(ValueError):
        FactoringProblem.make(15, 5)
    with pytest.raises(ValueError):
        FactoringProblem(N=15, a=2, L=5, t=8)
    with pytest.raises(ValueError):
        FactoringProblem.make(15, 2, p=3, q=7)


def test_uniform_problem_set_exhausts_small_lengths():
    probs = uniform_problem_set(5, 50, 50, np.random.default_rng(0))
    pairs = {(p.N, p.a) for p in probs}
    assert len(pairs) == len(probs)
    assert {p.N for p in probs} == {21}
    assert len(probs) == 11  # every unit of Z_21 except 1


def test_uniform_problem_set_sizes():
    rng = np.random.default_rng(0)
    probs = uniform_problem_set(14, 5, 7, rng)
    assert len(probs) == 35
    assert len({(p.N, p.a) for p in probs}) == 35


def test_manifest_roundtrip(tmp_path):
    rng = np.random.default_rng(5)
    probs = [generate_uniform_problem(L, rng) for L in (6, 20, 40)]
    path = tmp_path / "m.jsonl"
    write_manifest(probs, path)
    assert list(read_manifest(path)) == probs
    first = path.read_text().splitlines()[0]
    assert "schema" in first
    rec = problem_to_record(probs[2])
    assert all(isinstance(v, str) for v in rec.values())
    assert problem_from_record(rec) == probs[2]
