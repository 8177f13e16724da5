"""Closed-form bitstring distribution of order finding and a known-order sampler.

For order r and t bits, with s = floor(2^t / r) and rho = 2^t - s*r,

    P(j) = [ r * sin^2(pi s a / 2^t) / sin^2(pi a / 2^t)
             + rho * sin(pi (2s+1) a / 2^t) / sin(pi a / 2^t) ] / 2^(2t)

where a = alpha_j is the centered residue of r*j modulo 2^t. Every admissible
alpha is a multiple of 2^d (d = two-adic valuation of r) and is hit by exactly
2^d bitstrings, so the alpha-marginal is p'(alpha) = 2^d * P(j).

All sine arguments are reduced exactly with integer arithmetic before
conversion to float, so the formulas stay accurate for large t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .common import BitString

__all__ = [
    "DistributionSpec",
    "AlphaValue",
    "NoSolution",
    "shor_distribution_prob",
    "distribution",
    "peak_bitstrings",
    "alpha_of",
    "alpha_mass",
    "bitstrings_for_alpha",
    "sigbits",
    "region_bounds",
    "region_mass",
    "RegionMass",
    "region_mass_detail",
    "KnownOrderSampler",
    "known_order_sample",
]

DIRECT_SUM_LIMIT = 1 << 20
DIRECT_SAMPLE_LIMIT = 1 << 12
SUBREGION_BITS = 6  # 2^6 geometric subregions per region
PANELS_PER_PERIOD = 32
MAX_RESOLVED_PERIODS = 2048


class NoSolution(ValueError):
    """r*j = alpha (mod 2^t) has no solution."""


@dataclass(frozen=True)
class DistributionSpec:
    order: int
    t: int

    def __post_init__(self):
        if self.order < 1 or self.t < 1:
            raise ValueError("order and t must be positive")

    @property
    def s(self) -> int:
        return (1 << self.t) // self.order

    @property
    def rho(self) -> int:
        return (1 << self.t) - self.s * self.order

    @property
    def d(self) -> int:
        """Two-adic valuation of the order, capped at t."""
        return min((self.order & -self.order).bit_length() - 1, self.t)

    @property
    def odd_inverse(self) -> int:
        """Inverse of (order >> d) modulo 2^t."""
        if self.d == self.t:
            return 1  # every j maps to alpha = 0
        return pow((self.order >> self.d) % (1 << self.t), -1, 1 << self.t)


@dataclass(frozen=True)
class AlphaValue:
    alpha: int
    d: int

    def __post_init__(self):
        if self.alpha % (1 << self.d):
            raise ValueError("alpha must be a multiple of 2^d")


def _centered(x: int, t: int) -> int:
    m = x % (1 << t)
    return m - (1 << t) if m >= 1 << (t - 1) else m


def _sin_pi_ratio(num: int, t: int) -> float:
    """sin(pi * num / 2^t), reduced exactly modulo 2^(t+1)."""
    c = _centered(num, t + 1)
    if c % (1 << t) == 0:
        return 0.0
    return math.sin(math.pi * (c / (1 << t)))


def _bracket(spec: DistributionSpec, alpha: int) -> float:
    """2^(2t) * P(j) for any j with alpha_j = alpha."""
    r, s, rho, t = spec.order, spec.s, spec.rho, spec.t
    if alpha % (1 << t) == 0:
        return float(r * s * s + rho * (2 * s + 1))
    den = _sin_pi_ratio(alpha, t)
    first = _sin_pi_ratio(s * alpha, t) / den
    return r * first * first + rho * _sin_pi_ratio((2 * s + 1) * alpha, t) / den


def alpha_of(spec: DistributionSpec, j: int) -> AlphaValue:
    if not 0 <= j < 1 << spec.t:
        raise ValueError("j out of range")
    return AlphaValue(_centered(spec.order * j, spec.t), spec.d)


def shor_distribution_prob(spec: DistributionSpec, j: int) -> float:
    """Probability of measuring j."""
    alpha = alpha_of(spec, j).alpha
    return math.ldexp(_bracket(spec, alpha), -2 * spec.t)


def alpha_mass(spec: DistributionSpec, alpha: int) -> float:
    """p'(alpha): total probability of the 2^d bitstrings mapping to alpha."""
    if alpha % (1 << spec.d):
        return 0.0
    return math.ldexp(_bracket(spec, alpha), spec.d - 2 * spec.t)


def _fractions(base: int, step: int, count: int, t: int) -> np.ndarray:
    """((base + i*step) mod 2^(t+1)) / 2^t for i < count, reduced exactly.

    The index is split into high and low halves so each partial product is
    reduced with Python integers before conversion to float.
    """
    mod = 1 << (t + 1)
    lo_bits = max(1, (count - 1).bit_length() // 2)
    n_lo = 1 << lo_bits
    n_hi = -(-count // n_lo)
    lo = np.array([(i * step) % mod / (1 << t) for i in range(n_lo)])
    hi = np.array([(base + i * n_lo * step) % mod / (1 << t) for i in range(n_hi)])
    frac = np.mod((hi[:, None] + lo[None, :]).ravel()[:count], 2.0)
    return np.where(frac == 1.0, 0.0, frac)  # sin(pi) must vanish exactly


def _bracket_lattice(spec: DistributionSpec, m0: int, count: int) -> np.ndarray:
    """Vectorized bracket at alpha = 2^d * (m0 + i), i < count."""
    t, s, r, rho = spec.t, spec.s, spec.order, spec.rho
    step = 1 << spec.d
    a0 = step * m0
    den = np.sin(np.pi * _fractions(a0, step, count, t))
    n1 = np.sin(np.pi * _fractions(s * a0, s * step, count, t))
    n2 = np.sin(np.pi * _fractions((2 * s + 1) * a0, (2 * s + 1) * step, count, t))
    zero = den == 0.0
    den = np.where(zero, 1.0, den)
    out = r * (n1 / den) ** 2 + rho * n2 / den
    if zero.any():
        out[zero] = float(r * s * s + rho * (2 * s + 1))
    return out


def distribution(spec: DistributionSpec) -> np.ndarray:
    """Full array P(j) for j < 2^t (t <= 26)."""
    t = spec.t
    if t > 26:
        raise ValueError("full distribution limited to t <= 26")
    j = np.arange(1 << t, dtype=np.int64)
    alpha = (spec.order % (1 << t)) * j % (1 << t)
    alpha = np.where(alpha >= 1 << (t - 1), alpha - (1 << t), alpha)
    s, rho, r = spec.s, spec.rho, spec.order
    x = np.pi * alpha / float(1 << t)
    den = np.sin(x)

    def sin_mult(k):
        red = k * alpha % (1 << (t + 1))
        return np.where(red % (1 << t) == 0, 0.0, np.sin(np.pi * red / float(1 << t)))

    zero = alpha == 0
    den_safe = np.where(zero, 1.0, den)
    out = r * (sin_mult(s) / den_safe) ** 2 + rho * sin_mult(2 * s + 1) / den_safe
    out[zero] = float(r * s * s + rho * (2 * s + 1))
    return np.ldexp(out, -2 * t)


def peak_bitstrings(spec: DistributionSpec) -> list[int]:
    """round(k * 2^t / r) for k < r (halves round up)."""
    r, q = spec.order, 1 << spec.t
    if r >= q:
        raise ValueError("peaks need r < 2^t")
    return [(2 * k * q + r) // (2 * r) for k in range(r)]


def bitstrings_for_alpha(spec: DistributionSpec, alpha: int) -> list[int]:
    d, t = spec.d, spec.t
    if alpha % (1 << d):
        raise NoSolution(f"{alpha} is not a multiple of 2^{d}")
    base = (alpha >> d) * spec.odd_inverse
    mask = (1 << t) - 1
    return [(base + (l << (t - d))) & mask for l in range(1 << d)]


def sigbits(alpha: int) -> int:
    if alpha == 0:
        return 0
    return alpha.bit_length() if alpha > 0 else -((-alpha).bit_length())


def region_bounds(spec: DistributionSpec, b: int) -> tuple[int, int]:
    """Inclusive lattice range [m_lo, m_hi] of alpha = 2^d m with sigbits(alpha) = b.

    Empty regions return m_lo > m_hi.
    """
    t, d = spec.t, spec.d
    if b == 0:
        return 0, 0
    if not -t <= b <= t - 1:
        return 1, 0
    k = abs(b)
    lo_abs = 1 << (k - 1)
    hi_abs = min((1 << k) - 1, (1 << (t - 1)) if b < 0 else (1 << (t - 1)) - 1)
    m_lo = -(-lo_abs >> d)  # ceil
    m_hi = hi_abs >> d
    if b > 0:
        return m_lo, m_hi
    return -m_hi, -m_lo


# -- region masses ---------------------------------------------------------------

@dataclass(frozen=True)
class RegionMass:
    b: int
    mass: float
    error_estimate: float
    method: str  # "direct", "simpson", or "simpson+averaged"
    lattice_points: int


def _simpson(y: np.ndarray, h: float) -> float:
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def _bracket_continuous(spec: DistributionSpec, a0_twice: int, h: float, count: int) -> np.ndarray:
    """Bracket at real alpha = a0_twice/2 + i*h, i < count (moderate phase spans only)."""
    t, s, r, rho = spec.t, spec.s, spec.order, spec.rho
    base = _centered(a0_twice, t + 2) / float(1 << (t + 1))  # alpha_0 / 2^t mod 2
    base_s = _centered(s * a0_twice, t + 2) / float(1 << (t + 1))
    base_2s = _centered((2 * s + 1) * a0_twice, t + 2) / float(1 << (t + 1))
    i = np.arange(count, dtype=np.float64)
    step = h / 2.0 ** t
    den = np.sin(np.pi * (base + i * step))
    n1 = np.sin(np.pi * (base_s + i * (s * step)))
    n2 = np.sin(np.pi * (base_2s + i * ((2 * s + 1) * step)))
    return r * (n1 / den) ** 2 + rho * n2 / den


def _averaged_integral(spec: DistributionSpec, lo: float, hi: float) -> float:
    """Integral of r / (2 sin^2(pi alpha / 2^t)) over |alpha| in [lo, hi] (oscillation averaged out)."""
    t = spec.t
    x_lo, x_hi = math.pi * lo / 2.0 ** t, math.pi * hi / 2.0 ** t
    cot_diff = math.sin(x_hi - x_lo) / (math.sin(x_lo) * math.sin(x_hi))
    return spec.order / 2.0 * (2.0 ** t / math.pi) * cot_diff


def region_mass_detail(spec: DistributionSpec, b: int, direct_limit: int = DIRECT_SUM_LIMIT) -> RegionMass:
    m_lo, m_hi = region_bounds(spec, b)
    count = max(0, m_hi - m_lo + 1)
    if count == 0:
        return RegionMass(b, 0.0, 0.0, "direct", 0)
    if spec.rho == 0 and spec.order >> spec.d == 1:
        # r divides 2^t: only alpha = 0 carries weight.
        return RegionMass(b, 1.0 if b == 0 else 0.0, 0.0, "direct", count)
    if count <= direct_limit:
        vals = _bracket_lattice(spec, m_lo, count)
        total = math.fsum(np.sort(vals).tolist())
        return RegionMass(b, math.ldexp(total, spec.d - 2 * spec.t), 0.0, "direct", count)
    return _integrated_region(spec, b, m_lo, m_hi, count)


def _integrated_region(spec: DistributionSpec, b: int, m_lo: int, m_hi: int, count: int) -> RegionMass:
    """Sum over a large region via geometric subregions.

    Each lattice point stands for a cell of width 2^d centred on it, so the
    lattice sum is approximated by the integral of the bracket over the cells.
    Subregions spanning at most MAX_RESOLVED_PERIODS oscillation periods are
    integrated with Simpson's rule plus one Richardson step; wider ones use the
    oscillation-averaged envelope in closed form.
    """
    d, t = spec.d, spec.t
    abs_lo, abs_hi = (m_lo, m_hi) if b > 0 else (-m_hi, -m_lo)
    k = abs(b)
    nsub = 1 << SUBREGION_BITS
    # lattice cut points, then cell edges in doubled-alpha units (exact integers)
    cuts = [abs_lo]
    for xi in range(1, nsub):
        edge = 2.0 ** (k - 1 + xi / nsub) / (1 << d)
        m = max(abs_lo, min(abs_hi + 1, math.ceil(edge)))
        if m > cuts[-1]:
            cuts.append(m)
    cuts.append(abs_hi + 1)
    period = 2.0 ** t / spec.s if spec.s else float("inf")
    total, err, averaged = 0.0, 0.0, False
    for ma, mb in zip(cuts[:-1], cuts[1:]):
        lo2 = (2 * ma - 1) << d  # 2 * alpha at the left cell edge
        hi2 = (2 * mb - 1) << d
        width = (hi2 - lo2) / 2.0
        periods = width / period
        if periods <= MAX_RESOLVED_PERIODS:
            panels = 4 * math.ceil(max(64, PANELS_PER_PERIOD * periods) / 4)
            h = width / panels
            y = _bracket_continuous(spec, lo2, h, panels + 1)
            fine = _simpson(y, h)
            coarse = _simpson(y[::2], 2 * h)
            val = fine + (fine - coarse) / 15.0
            total += val
            err += abs(fine - coarse) / 15.0
        else:
            averaged = True
            val = _averaged_integral(spec, lo2 / 2.0, hi2 / 2.0)
            total += val
            err += abs(val) / (math.pi * periods)
    scale = 2.0 ** (-2 * t)
    method = "simpson+averaged" if averaged else "simpson"
    return RegionMass(b, total * scale, err * scale, method, count)


def region_mass(spec: DistributionSpec, b: int) -> float:
    """Probability that sigbits(alpha_j) = b."""
    return region_mass_detail(spec, b).mass


# -- known-order sampling ----------------------------------------------------------

def _random_bits(rng: np.random.Generator, k: int) -> int:
    if k <= 0:
        return 0
    return int.from_bytes(rng.bytes((k + 7) // 8), "little") & ((1 << k) - 1)


@dataclass
class KnownOrderSampler:
    """Exact sampler for P(j) given the order.

    Regions with at most DIRECT_SAMPLE_LIMIT lattice points are tabulated.
    Larger regions are sampled by rejection from the envelope
    (r + rho) * min((s+1)^2, 1/sin^2(pi alpha / 2^t)), which dominates the
    bracket and has a closed-form integral, so no approximation enters the
    sampled distribution.
    """

    spec: DistributionSpec
    direct_limit: int = DIRECT_SAMPLE_LIMIT
    tables: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        spec = self.spec
        self._only_zero = (spec.rho == 0 and spec.order >> spec.d == 1)
        self._C = float(spec.s + 1)
        self._xstar = math.asin(1.0 / self._C) if self._C > 1 else math.pi / 2
        self._cot_star = math.sqrt(self._C * self._C - 1.0)
        self._env_scale = (spec.order + spec.rho) * (2.0 ** spec.t / math.pi) * 2.0 ** (-2 * spec.t)
        regions, weights = [], []
        for b in range(-spec.t, spec.t):
            m_lo, m_hi = region_bounds(spec, b)
            if m_hi < m_lo:
                continue
            count = m_hi - m_lo + 1
            if self._only_zero and b != 0:
                continue
            if count <= self.direct_limit:
                vals = np.ldexp(_bracket_lattice(spec, m_lo, count), spec.d - 2 * spec.t)
                vals = np.maximum(vals, 0.0)
                cum = np.cumsum(vals)
                self.tables[b] = (m_lo, cum)
                weights.append(float(cum[-1]))
            else:
                abs_lo, abs_hi = (m_lo, m_hi) if b > 0 else (-m_hi, -m_lo)
                weights.append(self._env_mass(abs_lo - 1, abs_hi))
            regions.append(b)
        self.regions = regions
        self.weights = np.array(weights)
        self.cum_weights = np.cumsum(self.weights)

    # envelope helpers in x = pi * alpha / 2^t
    def _x(self, m: int) -> float:
        d, t = self.spec.d, self.spec.t
        return math.pi * ((m << d) / (1 << t))

    def _G(self, x: float) -> float:
        C2 = self._C * self._C
        if x <= self._xstar:
            return C2 * x
        return C2 * self._xstar + self._cot_star - 1.0 / math.tan(x)

    def _G_inv(self, g: float) -> float:
        C2 = self._C * self._C
        if g <= C2 * self._xstar:
            return g / C2
        return math.atan2(1.0, self._cot_star + C2 * self._xstar - g)

    def _env_mass(self, mu_a: int, mu_b: int) -> float:
        xa, xb = self._x(mu_a), self._x(mu_b)
        if xa > self._xstar and xb > self._xstar:
            diff = math.sin(xb - xa) / (math.sin(xa) * math.sin(xb))
        else:
            diff = self._G(xb) - self._G(xa)
        return self._env_scale * diff

    def _propose(self, b: int, rng: np.random.Generator) -> int | None:
        m_lo, m_hi = region_bounds(self.spec, b)
        abs_lo, abs_hi = (m_lo, m_hi) if b > 0 else (-m_hi, -m_lo)
        ga, gb = self._G(self._x(abs_lo - 1)), self._G(self._x(abs_hi))
        x = self._G_inv(ga + rng.random() * (gb - ga))
        mu = x / math.pi * 2.0 ** (self.spec.t - self.spec.d)
        m = math.ceil(mu)
        jitter_bits = m.bit_length() - 45
        if jitter_bits > 0:
            # float resolution is coarser than the lattice here; spread uniformly
            m += _random_bits(rng, jitter_bits) - (1 << (jitter_bits - 1))
        if not abs_lo <= m <= abs_hi:
            return None
        cell = self._env_mass(m - 1, m)
        alpha = m << self.spec.d
        target = alpha_mass(self.spec, alpha)
        if rng.random() * cell >= target:
            return None
        return m if b > 0 else -m

    def sample_alpha(self, rng: np.random.Generator) -> int:
        total = self.cum_weights[-1]
        while True:
            i = int(np.searchsorted(self.cum_weights, rng.random() * total, side="right"))
            i = min(i, len(self.regions) - 1)
            b = self.regions[i]
            if b in self.tables:
                m_lo, cum = self.tables[b]
                k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
                return (m_lo + min(k, cum.size - 1)) << self.spec.d
            m = self._propose(b, rng)
            if m is not None:
                return m << self.spec.d

    def sample(self, rng: np.random.Generator) -> BitString:
        spec = self.spec
        alpha = self.sample_alpha(rng)
        l = _random_bits(rng, spec.d)
        base = (alpha >> spec.d) * spec.odd_inverse
        j = (base + (l << (spec.t - spec.d))) & ((1 << spec.t) - 1)
        return BitString(spec.t, j)

    def samples(self, rng: np.random.Generator, count: int) -> list[int]:
        return [self.sample(rng).j for _ in range(count)]


def known_order_sample(spec: DistributionSpec, rng: np.random.Generator) -> BitString:
    return _sampler(spec).sample(rng)


_SAMPLER_CACHE: dict[DistributionSpec, KnownOrderSampler] = {}


def _sampler(spec: DistributionSpec) -> KnownOrderSampler:
    sampler = _SAMPLER_CACHE.get(spec)
    if sampler is None:
        if len(_SAMPLER_CACHE) > 64:
            _SAMPLER_CACHE.clear()
        sampler = _SAMPLER_CACHE[spec] = KnownOrderSampler(spec)
    return sampler
