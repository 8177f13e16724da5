"""Factoring-problem generation: uniform random semiprimes and the table of
largest interesting semiprimes."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .numtheory import is_probable_prime, primes_up_to

__all__ = [
    "FactoringProblem",
    "SemiprimeRecord",
    "recommended_t",
    "generate_uniform_problem",
    "uniform_problem_set",
    "largest_interesting_semiprime",
    "pick_base",
    "write_manifest",
    "read_manifest",
    "problem_to_record",
    "problem_from_record",
]


@dataclass(frozen=True)
class FactoringProblem:
    N: int
    a: int
    L: int
    t: int
    p: int | None = None
    q: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not 1 < self.a < self.N:
            raise ValueError(f"base a={self.a} outside (1, N)")
        if math.gcd(self.a, self.N) != 1:
            raise ValueError(f"gcd(a, N) != 1 for a={self.a}, N={self.N}")
        if self.N.bit_length() != self.L:
            raise ValueError(f"N={self.N} does not have L={self.L} bits")
        if self.t < 1:
            raise ValueError("t must be positive")
        if (self.p is None) != (self.q is None):
            raise ValueError("give both p and q or neither")
        if self.p is not None:
            if self.p * self.q != self.N or self.p == self.q:
                raise ValueError("p, q must be distinct with p*q = N")
            if not (is_probable_prime(self.p) and is_probable_prime(self.q)):
                raise ValueError("p and q must be prime")

    @property
    def n_qubits(self) -> int:
        return self.L + 1

    @classmethod
    def make(cls, N: int, a: int, t: int | None = None, p: int | None = None,
             q: int | None = None, seed: int = 0) -> "FactoringProblem":
        return cls(N=N, a=a, L=N.bit_length(), t=recommended_t(N) if t is None else t,
                   p=p, q=q, seed=seed)

    def with_t(self, t: int) -> "FactoringProblem":
        return FactoringProblem(self.N, self.a, self.L, t, self.p, self.q, self.seed)


@dataclass(frozen=True)
class SemiprimeRecord:
    n_qubits: int
    N: int
    p: int
    q: int
    t_recommended: int


def recommended_t(N: int) -> int:
    """Smallest t with 2^t >= N^2."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return (N * N - 1).bit_length()


def _draw(rng: np.random.Generator, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi]."""
    return int(rng.integers(lo, hi + 1))


def _draw_q(p: int, L: int, rng: np.random.Generator) -> int | None:
    lo = max(-(-(1 << (L - 1)) // p), p + 1)
    hi = (1 << L) // p
    if hi < lo:
        return None
    if hi - lo < 4096:
        # Small ranges: enumerate, which also detects an empty prime set.
        cands = [x for x in range(lo, hi + 1) if is_probable_prime(x)]
        return cands[_draw(rng, 0, len(cands) - 1)] if cands else None
    while True:
        x = _draw(rng, lo, hi)
        if is_probable_prime(x):
            return x


def pick_base(N: int, rng: np.random.Generator) -> tuple[int, list[int]]:
    """Uniform base coprime to N.

    Returns the base together with the nontrivial divisors hit by rejected
    candidates; each of those is a classical factorization on its own.
    """
    if N < 4:
        raise ValueError("N too small")
    hits = []
    while True:
        a = _draw(rng, 2, N - 1)
        g = math.gcd(a, N)
        if g == 1:
            return a, hits
        hits.append(g)


def generate_uniform_problem(L: int, rng: np.random.Generator) -> FactoringProblem:
    """Random L-bit semiprime p*q (p < q odd primes) with a random coprime base."""
    if L < 4:
        raise ValueError("L must be at least 4")
    p_hi = math.isqrt(1 << L)
    while True:
        p = _draw(rng, 1, (p_hi - 1) // 2) * 2 + 1
        if not is_probable_prime(p):
            continue
        q = _draw_q(p, L, rng)
        if q is None:
            continue
        N = p * q
        if N.bit_length() == L:
            break
    a, _ = pick_base(N, rng)
    seed = int(rng.integers(0, 2**63 - 1))
    return FactoringProblem(N=N, a=a, L=L, t=recommended_t(N), p=p, q=q, seed=seed)


def _all_semiprimes(L: int) -> list[tuple[int, int]]:
    out = []
    for p in primes_up_to(math.isqrt(1 << L)):
        if p == 2:
            continue
        lo = max(-(-(1 << (L - 1)) // p), p + 1)
        for q in range(lo, (1 << L) // p + 1):
            if is_probable_prime(q):
                out.append((p, q))
    return out


def uniform_problem_set(L: int, n_semiprimes: int, n_bases: int,
                        rng: np.random.Generator) -> list[FactoringProblem]:
    """Unique (N, a) problems at bit length L.

    When fewer than ``n_semiprimes`` semiprimes (or fewer than ``n_bases``
    coprime bases) exist, all of them are used.
    """
    if L <= 12:
        pool = _all_semiprimes(L)
        if len(pool) <= n_semiprimes:
            pairs = pool
        else:
            idx = rng.choice(len(pool), size=n_semiprimes, replace=False)
            pairs = [pool[i] for i in sorted(idx)]
    else:
        seen: dict[int, tuple[int, int]] = {}
        while len(seen) < n_semiprimes:
            prob = generate_uniform_problem(L, rng)
            seen.setdefault(prob.N, (prob.p, prob.q))
        pairs = list(seen.values())
    problems = []
    for p, q in pairs:
        N = p * q
        coprime_count = (p - 1) * (q - 1) - 1  # excludes a = 1
        if coprime_count <= n_bases:
            bases = [a for a in range(2, N) if math.gcd(a, N) == 1]
        else:
            chosen: set[int] = set()
            bases = []
            while len(bases) < n_bases:
                a, _ = pick_base(N, rng)
                if a not in chosen:
                    chosen.add(a)
                    bases.append(a)
        for a in bases:
            seed = int(rng.integers(0, 2**63 - 1))
            problems.append(FactoringProblem(N=N, a=a, L=L, t=recommended_t(N), p=p, q=q, seed=seed))
    return problems


def _smallest_factor(n: int, primes: tuple[int, ...]) -> int:
    for p in primes:
        if p * p > n:
            return n
        if n % p == 0:
            return p
    return n


def largest_interesting_semiprime(n_qubits: int) -> SemiprimeRecord:
    """Largest N < 2^(n_qubits - 1) with N = p*q, p < q primes of equal decimal length.

    The argument is the register size n = L + 1 of the circuit that factors N.
    """
    if not 4 <= n_qubits <= 51:
        raise ValueError("n_qubits must be in [4, 51]")
    top = (1 << (n_qubits - 1)) - 1
    primes = primes_up_to(math.isqrt(top) + 1)
    for N in range(top if top % 2 else top - 1, 8, -2):
        p = _smallest_factor(N, primes)
        if p == N:
            continue
        q = N // p
        if q == p or len(str(p)) != len(str(q)):
            continue
        if is_probable_prime(q):
            return SemiprimeRecord(n_qubits, N, p, q, recommended_t(N))
    raise ValueError(f"no interesting semiprime below 2^{n_qubits - 1}")


# -- manifests -----------------------------------------------------------------

_FIELDS = ("N", "p", "q", "a", "L", "t", "seed")


def problem_to_record(problem: FactoringProblem) -> dict[str, str | None]:
    d = asdict(problem)
    return {k: (None if d[k] is None else str(d[k])) for k in _FIELDS}


def problem_from_record(rec: dict) -> FactoringProblem:
    def num(key, default=None):
        v = rec.get(key, default)
        return None if v is None else int(v)

    N = num("N")
    return FactoringProblem(N=N, a=num("a"), L=num("L", N.bit_length()),
                            t=num("t", recommended_t(N)), p=num("p"), q=num("q"),
                            seed=num("seed", 0))


def write_manifest(problems: Iterable[FactoringProblem], path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps({"schema": "shorsim.problems", "version": 1}) + "\n")
        for prob in problems:
            fh.write(json.dumps(problem_to_record(prob)) + "\n")


def read_manifest(path: str | Path) -> Iterator[FactoringProblem]:
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rec = json.loads(line)
                if "schema" in rec:
                    continue
                yield problem_from_record(rec)
