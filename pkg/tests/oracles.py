"""Independent reference computations shared by the unit and acceptance tests."""

import math

import numpy as np
import sympy


def odd_semiprimes(limit):
    """(N, p, q) for distinct odd primes p < q with pq <= limit."""
    primes = list(sympy.primerange(3, limit // 3 + 1))
    out = []
    for i, p in enumerate(primes):
        if p * p > limit:
            break
        for q in primes[i + 1:]:
            if p * q > limit:
                break
            out.append((p * q, p, q))
    return sorted(out)


def order_table(p):
    """ord_p(x) for every x in [0, p), with 0 at x = 0."""
    g = int(sympy.primitive_root(p))
    table = np.zeros(p, dtype=np.int64)
    x = 1
    for e in range(p - 1):
        table[x] = (p - 1) // math.gcd(e, p - 1)
        x = x * g % p
    return table


def vector_pow(base, exp, n):
    """Elementwise base**exp mod n for int64 arrays with n < 2**31."""
    base = base % n
    exp = exp.copy()
    result = np.ones_like(base)
    while exp.any():
        odd = (exp & 1).astype(bool)
        result = np.where(odd, result * base % n, result)
        base = base * base % n
        exp >>= 1
    return result


def vector_gcd(x, n):
    return np.gcd(x, n)


def theorem_counterexamples(N, p, q, tables, split=None):
    """Counterexample counts for the odd-order theorems at one semiprime.

    Returns a dict keyed by theorem name; every entry not ending in
    "_cases" should be zero. ``split`` is the gcd step under test.
    """
    a = np.arange(2, N, dtype=np.int64)
    a = a[np.gcd(a, N) == 1]
    op, oq = tables[p][a % p], tables[q][a % q]
    order = np.lcm(op, oq)
    odd = order % 2 == 1
    a_o, r_o = a[odd], order[odd]
    lo = vector_pow(a_o, (r_o - 1) // 2, N)
    hi = vector_pow(a_o, (r_o + 1) // 2, N)
    minus = np.gcd((lo - 1) % N, N)
    plus = np.gcd((lo + 1) % N, N)
    ceil_minus = np.gcd((hi - 1) % N, N)

    def nontrivial(g):
        return (g > 1) & (g < N)

    unit_residue = (a_o % p == 1) | (a_o % q == 1)
    counts = {
        "odd_order_iff": int((nontrivial(minus) != unit_residue).sum()),
        "plus_branch_vanishes": int(nontrivial(plus).sum()),
        "floor_ceil": int((nontrivial(minus) != nontrivial(ceil_minus)).sum()),
    }
    if split is not None:
        # the package's gcd step must agree with the theorem on every odd-order base
        got = np.array([bool(split(N, y)) for y in lo.tolist()], dtype=bool)
        counts["library_gcd_step"] = int((got != unit_residue).sum())
    small = np.minimum(op, oq) <= 2
    failures = 0
    checked = 0
    for base, r_hat in zip(a[small].tolist(), order[small].tolist()):
        for r in sympy.divisors(r_hat):
            if r % 2 == 0 or r in (1, r_hat):
                continue
            checked += 1
            y = pow(base, r // 2, N)
            if not any(1 < math.gcd(y + s, N) < N for s in (1, -1)):
                failures += 1
    counts["small_order_odd_divisor"] = failures
    counts["small_order_cases"] = checked
    counts["odd_order_cases"] = int(odd.sum())
    return counts


def run_theorem_suite(limit, split=None):
    totals = {}
    semis = odd_semiprimes(limit)
    primes = sorted({p for _, p, q in semis} | {q for _, p, q in semis})
    tables = {p: order_table(p) for p in primes}
    for N, p, q in semis:
        for key, value in theorem_counterexamples(N, p, q, tables, split).items():
            totals[key] = totals.get(key, 0) + value
    totals["semiprimes"] = len(semis)
    return totals


def totients_up_to(n):
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def brute_force_distribution(r, t):
    """|sum over the r-periodic comb|^2, straight from the Fourier sum."""
    q = 1 << t
    out = np.zeros(q)
    k = np.arange(q)
    for x0 in range(r):
        xs = np.arange(x0, q, r)
        amps = np.exp(2j * np.pi * np.outer(k, xs) / q).sum(axis=1)
        out += np.abs(amps) ** 2
    return out / (q * q)
