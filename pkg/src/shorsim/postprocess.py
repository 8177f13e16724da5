"""Classical post-processing of measured bitstrings, plus success bounds.

Two pipelines are provided. ``shor_standard_procedure`` takes one continued
fraction convergent and tries gcd(a^(r//2) +- 1, N), labelling factors found
despite failed textbook conditions as lucky. ``ekera_postprocess`` searches a
neighbourhood of j, lifts the candidate denominator to a verified order, then
splits N from that order with fresh random bases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numtheory import (
    Convergent,
    extract_denominator,
    factorize,
    gcd,
    multiplicative_order,
    primes_up_to,
    two_adic,
)

__all__ = [
    "SUCCESS",
    "LUCKY_NE",
    "LUCKY_NO",
    "LUCKY_OO",
    "FAIL",
    "CLASSIFICATIONS",
    "Checks",
    "PostProcessOutcome",
    "EkeraParams",
    "gcd_split",
    "shor_standard_procedure",
    "classify_lucky",
    "ekera_postprocess",
    "recover_order",
    "factor_from_order",
    "ekera_bound",
    "ShorBoundFactors",
    "shor_bound_factors",
    "shor_bound",
    "rosser_bound",
]

SUCCESS, LUCKY_NE, LUCKY_NO, LUCKY_OO, FAIL = "success", "lucky_ne", "lucky_no", "lucky_oo", "fail"
CLASSIFICATIONS = (SUCCESS, LUCKY_NE, LUCKY_NO, LUCKY_OO, FAIL)
LUCKY = (LUCKY_NE, LUCKY_NO, LUCKY_OO)

EULER_GAMMA = 0.5772156649015329
ROSSER_EXCEPTION = 223092870


@dataclass(frozen=True)
class Checks:
    """Textbook conditions on the denominator r; None means not evaluated."""

    r_even: bool | None = None
    power_is_one: bool | None = None
    half_power_not_minus_one: bool | None = None

    def evaluated(self) -> dict[str, bool]:
        return {k: v for k, v in self.as_dict().items() if v is not None}

    def as_dict(self) -> dict[str, bool | None]:
        return {
            "r_even": self.r_even,
            "power_is_one": self.power_is_one,
            "half_power_not_minus_one": self.half_power_not_minus_one,
        }

    @property
    def all_passed(self) -> bool:
        return all(self.evaluated().values())


@dataclass(frozen=True)
class PostProcessOutcome:
    classification: str
    convergent: Convergent
    factors: frozenset[int] = frozenset()
    checks: Checks = field(default_factory=Checks)
    order_match: bool | None = None
    order: int | None = None
    j_used: int | None = None

    def __post_init__(self):
        if self.classification not in CLASSIFICATIONS:
            raise ValueError(f"unknown classification {self.classification!r}")
        has = bool(self.factors)
        if self.classification == SUCCESS and not (has and self.checks.all_passed):
            raise ValueError("success needs factors and passing checks")
        if self.classification in LUCKY and (not has or self.checks.all_passed):
            raise ValueError("lucky needs factors and a failed check")
        if self.classification == FAIL and has:
            raise ValueError("fail cannot carry factors")

    @property
    def found_factor(self) -> bool:
        return bool(self.factors)

    def record(self, j: int) -> dict:
        return {
            "j": str(j),
            "k": str(self.convergent.k),
            "r": str(self.convergent.r),
            "checks": self.checks.as_dict(),
            "classification": self.classification,
            "factors": sorted(str(f) for f in self.factors),
            "order_match": self.order_match,
            "order": None if self.order is None else str(self.order),
        }


@dataclass(frozen=True)
class EkeraParams:
    """Search radius, smoothness and trial parameters of the neighbourhood pipeline."""

    B: int
    c: float = 1.0
    k: int = 100
    varsigma: float = 1.0
    m: int = 1
    ell: int = 0

    def __post_init__(self):
        if self.B < 1 or self.c < 1 or self.k < 1 or self.varsigma < 1:
            raise ValueError("B, c, k and varsigma must all be >= 1")
        if self.m < 1 or self.ell < 0:
            raise ValueError("need m >= 1 and ell >= 0")

    @property
    def t(self) -> int:
        return self.m + self.ell

    @classmethod
    def default(cls, L: int, t: int) -> "EkeraParams":
        return cls(B=L, c=1.0, k=100, varsigma=1.0, m=L, ell=t - L)

    def valid_for(self, order: int) -> bool:
        return (1 << self.m) > order


def gcd_split(N: int, y: int) -> frozenset[int]:
    """Nontrivial divisors of N among gcd(y - 1, N), gcd(y + 1, N) and their cofactors."""
    found = set()
    for g in (gcd(y - 1, N), gcd(y + 1, N)):
        if 1 < g < N:
            found.update((g, N // g))
    return frozenset(found)


def classify_lucky(r: int, order: int, got_factor: bool, checks: Checks) -> str:
    if not got_factor:
        return FAIL
    if checks.all_passed:
        return SUCCESS
    if r != order:
        return LUCKY_NE if r % 2 == 0 else LUCKY_NO
    if r % 2 == 1:
        return LUCKY_OO
    raise ValueError("factor found from the true even order with a failed check")


def shor_standard_procedure(j: int, t: int, N: int, a: int, order: int | None = None) -> PostProcessOutcome:
    """Continued fractions on j/2^t followed by the gcd step.

    The gcd step always runs. When a factor appears and ``order`` is not given,
    the order used for the lucky label is computed from the recovered factors.
    """
    if not 0 <= j < (1 << t):
        raise ValueError("j out of range")
    conv = extract_denominator(j, t, N)
    r = conv.r
    if r <= 1:
        return PostProcessOutcome(FAIL, conv, order_match=None if order is None else r == order)
    half = pow(a, r // 2, N)
    checks = Checks(
        r_even=r % 2 == 0,
        power_is_one=pow(a, r, N) == 1,
        half_power_not_minus_one=half != N - 1,
    )
    factors = gcd_split(N, half)
    if factors and order is None:
        p = min(factors)
        order = multiplicative_order(a, N, p, N // p).value
    match = None if order is None else r == order
    if not factors:
        return PostProcessOutcome(FAIL, conv, factors, checks, match)
    return PostProcessOutcome(classify_lucky(r, order, True, checks), conv, factors, checks, match)


def _smooth_lift(c: float, m: int) -> int:
    bound = 1 << m
    lift = 1
    for q in primes_up_to(int(c * m)):
        power = q
        while power * q <= bound:
            power *= q
        lift *= power
    return lift


def recover_order(r_candidate: int, a: int, N: int, params: EkeraParams) -> int | None:
    """Lift a denominator by every small prime power, verify, and reduce to the exact order."""
    if r_candidate < 1:
        raise ValueError("r_candidate must be positive")
    lift = _smooth_lift(params.c, params.m)
    R = r_candidate * lift
    if pow(a, R, N) != 1:
        return None
    primes = set(factorize(r_candidate)) | set(factorize(lift))
    for q in sorted(primes):
        while R % q == 0 and pow(a, R // q, N) == 1:
            R //= q
    return R


def _uniform_int(rng: np.random.Generator, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi)."""
    span = hi - lo
    if span < 1 << 62:
        return lo + int(rng.integers(span))
    bits = span.bit_length()
    while True:
        words = rng.integers(0, 1 << 32, size=(bits + 31) // 32, dtype=np.uint64)
        x = int.from_bytes(words.astype("<u4").tobytes(), "little") >> (32 * len(words) - bits)
        if x < span:
            return lo + x


def factor_from_order(N: int, order: int, rng: np.random.Generator, k_trials: int = 100,
                      varsigma: float = 1.0) -> frozenset[int]:
    """Split N given the order of one element, using fresh random bases.

    Each trial raises a random x to the odd part of ``order`` and squares
    repeatedly, checking gcd(y +- 1, N) at every level.
    """
    if order < 1:
        raise ValueError("order must be positive")
    s, odd = two_adic(order)
    levels = s + int(math.ceil(varsigma))
    for _ in range(k_trials):
        x = _uniform_int(rng, 2, N - 1)
        g = gcd(x, N)
        if g > 1:
            return frozenset((g, N // g))
        y = pow(x, odd, N)
        for _ in range(levels + 1):
            if y == 1:
                break
            found = gcd_split(N, y)
            if found:
                small = min(found)
                return frozenset((small, N // small))
            y = y * y % N
    return frozenset()


def _scan_order(j: int, B: int, t: int):
    size = 1 << t
    yield j
    for step in range(1, B + 1):
        yield (j - step) % size
        yield (j + step) % size


def ekera_postprocess(j: int, t: int, N: int, a: int, params: EkeraParams,
                      rng: np.random.Generator, order: int | None = None) -> PostProcessOutcome:
    """Neighbourhood search around j, order recovery, then complete splitting."""
    if not 0 <= j < (1 << t):
        raise ValueError("j out of range")
    tried: dict[int, int | None] = {}
    first = None
    for jp in _scan_order(j, params.B, t):
        conv = extract_denominator(jp, t, N)
        first = first or conv
        if conv.r not in tried:
            tried[conv.r] = recover_order(conv.r, a, N, params)
        found = tried[conv.r]
        if found is None:
            continue
        factors = factor_from_order(N, found, rng, params.k, params.varsigma)
        match = None if order is None else found == order
        checks = Checks(power_is_one=True)
        if not factors:
            return PostProcessOutcome(FAIL, conv, checks=checks, order_match=match, order=found, j_used=jp)
        return PostProcessOutcome(SUCCESS, conv, factors, checks, match, found, jp)
    return PostProcessOutcome(FAIL, first, order_match=None if order is None else False)


def ekera_bound(params: EkeraParams, L: int, n_factors: int = 2) -> float:
    """Lower bound on single-run success of the neighbourhood pipeline, clamped to [0, 1]."""
    if L < 4:
        raise ValueError("L must be at least 4")
    B = params.B
    near_peak = (1 - (2 / B + 1 / B**2 + 1 / (3 * B**2)) / math.pi**2
                 - math.pi**2 * (2 * B + 1) / math.sqrt(2.0**params.t))
    cm = params.c * params.m
    smooth = 1 - 1 / (params.c * math.log(cm)) if cm > 1 else 0.0
    sl = params.varsigma * L
    split = 1 - 2.0**-params.k * math.comb(n_factors, 2) - 1 / (2 * params.varsigma**2 * math.log(sl) ** 2)
    value = max(near_peak, 0.0) * max(smooth, 0.0) * max(split, 0.0)
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class ShorBoundFactors:
    """The three factors of the single-run success estimate for the gcd pipeline."""

    peak: float
    coprime: float
    good_base: float

    @property
    def value(self) -> float:
        return self.peak * self.coprime * self.good_base


def _loglog(N: int, inner: str) -> float:
    if inner == "bits":
        return math.log(math.log2(N))
    if inner == "natural":
        return math.log(math.log(N))
    raise ValueError(f"unknown inner logarithm {inner!r}")


def shor_bound_factors(N: int, n_factors: int = 2, inner: str = "bits") -> ShorBoundFactors:
    """Factors of the estimate; ``inner`` picks the base of the inner logarithm ("bits" = base 2)."""
    if N < 16:
        raise ValueError("N must be at least 16")
    return ShorBoundFactors(
        peak=4 / math.pi**2,
        coprime=math.exp(-EULER_GAMMA) / _loglog(N, inner),
        good_base=1 - 1 / 2 ** (n_factors - 1),
    )


def shor_bound(N: int, inner: str = "bits") -> float:
    return shor_bound_factors(N, 2, inner).value


def rosser_bound(order: int) -> float:
    """Strict lower bound on phi(order)/order."""
    if order == 2:
        return 0.5
    if order < 3:
        raise ValueError("order must be at least 2")
    ll = math.log(math.log(order))
    numerator = 2.50637 if order == ROSSER_EXCEPTION else 2.5
    return 1 / (math.exp(EULER_GAMMA) * ll + numerator / ll)
