"""Exact integer arithmetic used by the simulator and the post-processing.

Everything here works on Python integers, so exponents and intermediate
products are unbounded.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "Convergent",
    "OrderRecord",
    "NotInvertible",
    "FactorizationTimeout",
    "gcd",
    "ext_gcd",
    "mod_inverse",
    "mod_pow",
    "multiplicative_order",
    "is_probable_prime",
    "primes_up_to",
    "factorize",
    "convergents",
    "extract_denominator",
    "euler_totient_of_order",
    "two_adic",
]

BRUTE_FORCE_ORDER_LIMIT = 1 << 20
RHO_BUDGET = 10_000_000


class NotInvertible(ArithmeticError):
    """Raised when an inverse is requested for a non-unit; ``divisor`` holds gcd(a, N)."""

    def __init__(self, a: int, n: int, divisor: int):
        super().__init__(f"{a} is not invertible modulo {n} (gcd {divisor})")
        self.divisor = divisor


class FactorizationTimeout(RuntimeError):
    """Pollard rho ran out of its iteration budget."""


@dataclass(frozen=True)
class Convergent:
    k: int
    r: int

    def __post_init__(self):
        if self.r < 1 or self.k < 0:
            raise ValueError(f"invalid convergent {self.k}/{self.r}")


@dataclass(frozen=True)
class OrderRecord:
    value: int
    two_adic_d: int
    odd_part: int

    @classmethod
    def from_value(cls, value: int) -> "OrderRecord":
        d, odd = two_adic(value)
        return cls(value, d, odd)


def two_adic(n: int) -> tuple[int, int]:
    """Return (d, o) with n = 2**d * o and o odd."""
    if n <= 0:
        raise ValueError("two_adic needs a positive integer")
    d = (n & -n).bit_length() - 1
    return d, n >> d


def gcd(a: int, b: int) -> int:
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    return math.gcd(a, b)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Iterative extended Euclid: returns (g, x, y) with a*x + b*y = g."""
    if a == 0 and b == 0:
        raise ValueError("ext_gcd(0, 0) is undefined")
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def mod_inverse(a: int, n: int) -> int:
    g, x, _ = ext_gcd(a % n, n)
    if g != 1:
        raise NotInvertible(a, n, g)
    return x % n


def mod_pow(base: int, exponent: int, n: int) -> int:
    if n < 1:
        raise ValueError("modulus must be positive")
    if exponent < 0:
        raise ValueError("negative exponent")
    return pow(base, exponent, n)


# -- primes and factorization -------------------------------------------------

@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> tuple[int, ...]:
    if limit < 2:
        return ()
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


_SMALL_PRIMES = primes_up_to(1000)
# These twelve bases make Miller-Rabin deterministic below 3.3e24.
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _miller_rabin_witness(n: int, base: int, d: int, s: int) -> bool:
    """True if ``base`` proves n composite."""
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_probable_prime(n: int, rounds: int = 40) -> bool:
    """Miller-Rabin with ``rounds`` bases.

    The first bases are the fixed small primes, which already decide every
    n below 3.3e24; extra rounds use bases derived from n itself so the
    function stays deterministic.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = list(_DETERMINISTIC_BASES[: max(rounds, 0)])
    if rounds > len(bases):
        picker = random.Random(n)
        bases += [picker.randrange(2, n - 1) for _ in range(rounds - len(bases))]
    return not any(_miller_rabin_witness(n, b, d, s) for b in bases)


def _pollard_brent(n: int, seed: int, budget: int) -> tuple[int, int]:
    """One Brent-rho run; returns (factor or n, iterations spent)."""
    picker = random.Random(seed)
    y = picker.randrange(1, n)
    c = picker.randrange(1, n)
    m = 128
    g = r = q = 1
    spent = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        spent += r
        r *= 2
        if spent > budget:
            return n, spent
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g, spent


def _split(n: int, budget: list[int]) -> int:
    seed = 0
    while True:
        g, spent = _pollard_brent(n, seed, budget[0])
        budget[0] -= spent
        if 1 < g < n:
            return g
        if budget[0] <= 0:
            raise FactorizationTimeout(f"rho budget exhausted on {n}")
        seed += 1


def factorize(n: int, rho_budget: int = RHO_BUDGET) -> dict[int, int]:
    """Prime factorization {p: e} by trial division plus Brent's rho."""
    if n < 1:
        raise ValueError("factorize needs a positive integer")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    budget = [rho_budget]
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        root = math.isqrt(m)
        if root * root == m:
            stack += [root, root]
            continue
        g = _split(m, budget)
        stack += [g, m // g]
    return dict(sorted(out.items()))


def euler_totient_of_order(r: int, rho_budget: int = RHO_BUDGET) -> int:
    if r < 1:
        raise ValueError("totient needs r >= 1")
    phi = r
    for p in factorize(r, rho_budget):
        phi = phi // p * (p - 1)
    return phi


# -- orders -------------------------------------------------------------------

def _order_by_divisors(a: int, n: int, multiple: int) -> int:
    """Smallest r dividing ``multiple`` with a^r = 1 (mod n)."""
    r = multiple
    for p in factorize(multiple):
        while r % p == 0 and pow(a, r // p, n) == 1:
            r //= p
    return r


def multiplicative_order(a: int, n: int, p: int | None = None, q: int | None = None) -> OrderRecord:
    """Exact order of a modulo n.

    Small moduli are handled by walking powers of a. Above 2**20 the known
    prime factors p, q are required and the order is found among the
    divisors of lcm(p-1, q-1).
    """
    if n < 2:
        raise ValueError("modulus must be at least 2")
    a %= n
    if math.gcd(a, n) != 1:
        raise NotInvertible(a, n, math.gcd(a, n))
    if n < BRUTE_FORCE_ORDER_LIMIT:
        r, x = 1, a
        while x != 1:
            x = x * a % n
            r += 1
        return OrderRecord.from_value(r)
    if p is None or q is None:
        raise ValueError("orders modulo n >= 2**20 need the prime factors p and q")
    if p * q != n:
        raise ValueError("p * q does not equal n")
    lam = (p - 1) * (q - 1) // math.gcd(p - 1, q - 1)
    return OrderRecord.from_value(_order_by_divisors(a, n, lam))


# -- continued fractions -------------------------------------------------------

def convergents(j: int, q: int) -> list[Convergent]:
    """All continued-fraction convergents of j/q, starting at 0/1."""
    if not 0 <= j < q:
        raise ValueError("need 0 <= j < q")
    out = []
    h_prev, h = 0, 1  # numerators h_{-2}, h_{-1}
    k_prev, k = 1, 0  # denominators
    num, den = j, q
    while den:
        coeff, rem = divmod(num, den)
        h_prev, h = h, coeff * h + h_prev
        k_prev, k = k, coeff * k + k_prev
        out.append(Convergent(h, k))
        num, den = den, rem
    return out


def extract_denominator(j: int, t: int, n: int, limit: str = "N") -> Convergent:
    """Convergent of j/2^t with the largest denominator below the bound.

    ``limit="N"`` uses r < n; ``limit="sqrt"`` stops at r < 2^(t/2).
    """
    if limit == "N":
        ok = lambda r: r < n  # noqa: E731
    elif limit == "sqrt":
        ok = lambda r: r * r < (1 << t)  # noqa: E731
    else:
        raise ValueError(f"unknown limit {limit!r}")
    best = Convergent(0, 1)
    for c in convergents(j, 1 << t):
        if ok(c.r):
            best = c
        else:
            break
    return best
