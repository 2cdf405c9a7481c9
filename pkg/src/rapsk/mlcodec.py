"""Multilevel encoding and multistage decoding over RAPSK.

Each label bit position gets its own component code of length ``t``. The
decoder resolves the ring index first (least significant bit first), then
uses the decided ring radius to set the angular noise level and resolves
the angle index the same way.

Per level, the soft demapper works in normalised coordinates where the two
bit hypotheses sit on the even and odd integers, so the LLR is
``2 a(sigma_i) cos(pi y_i)`` whatever the constellation size. The radial
axis is not periodic: there the argument is clamped to the span of the
candidates still allowed by the decided prefix, and the overshoot adds the
Gaussian tail slope ``(clamped - y_i) / sigma_i^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .channel import ChannelParams, angular_sigma_a2, transmit
from .codes import ComponentCode
from .constellation import RapskConstellation
from .numerics import kappa_for_sigma

__all__ = [
    "GenieResult",
    "LevelContext",
    "MlcScheme",
    "MsdResult",
    "genie_level_errors",
    "llr_exact",
    "llr_fast",
    "mlc_encode",
    "msd_decode",
    "msd_decode_detailed",
    "normalize_level",
]

# noiseless channels still need a finite level deviation
_SIGMA_FLOOR = 1e-9


@dataclass(frozen=True)
class LevelContext:
    """Normalised inputs of one MSD level (arrays broadcast together).

    ``upper`` is the largest normalised candidate coordinate on a bounded
    axis, or None on a periodic one.
    """

    level: int
    prefix: np.ndarray
    sigma: np.ndarray
    y: np.ndarray
    sigma_i: np.ndarray
    upper: int | None = None


def normalize_level(y_coord, prefix, i: int, sigma, upper: int | None = None) -> LevelContext:
    """y_i = (y - prefix) / 2^(i-1), sigma_i = sigma / 2^(i-1), for level i >= 1."""
    if i < 1:
        raise ValueError("levels are numbered from 1")
    scale = float(2 ** (i - 1))
    y_coord = np.asarray(y_coord, dtype=float)
    prefix = np.asarray(prefix)
    sigma = np.asarray(sigma, dtype=float)
    return LevelContext(i, prefix, sigma, (y_coord - prefix) / scale, sigma / scale, upper)


def llr_fast(ctx: LevelContext):
    """LLR of the current bit (positive favours 0), O(1) per symbol."""
    a = kappa_for_sigma(np.maximum(ctx.sigma_i, _SIGMA_FLOOR))
    if ctx.upper is None:
        return 2.0 * a * np.cos(np.pi * ctx.y)
    yc = np.clip(ctx.y, 0.0, ctx.upper)
    return 2.0 * a * np.cos(np.pi * yc) + (yc - ctx.y) / np.maximum(ctx.sigma_i, _SIGMA_FLOOR) ** 2


def llr_exact(y_coord, prefix: int, i: int, q: int, sigma: float):
    """Exact LLR of bit i on a 2^q-ASK {0..2^q-1} given the lower i-1 bits.

    Sums Gaussian likelihoods over every candidate consistent with the prefix.
    """
    if not 1 <= i <= q:
        raise ValueError("need 1 <= i <= q")
    y = np.asarray(y_coord, dtype=float)
    zeros = prefix + 2 ** i * np.arange(2 ** (q - i))
    ones = zeros + 2 ** (i - 1)
    s2 = 2.0 * sigma * sigma
    l0 = logsumexp(-((y[..., None] - zeros) ** 2) / s2, axis=-1)
    l1 = logsumexp(-((y[..., None] - ones) ** 2) / s2, axis=-1)
    return (l0 - l1)[()]


@dataclass(frozen=True, eq=False)
class MlcScheme:
    """Constellation plus one component code per label bit position.

    ``codes[j]`` protects label bit ``j`` (MSB first, ring bits then angle
    bits). Information words are split and re-joined in that same order.
    """

    constellation: RapskConstellation
    codes: tuple = field()

    def __post_init__(self):
        codes = tuple(self.codes)
        object.__setattr__(self, "codes", codes)
        if len(codes) != self.constellation.m:
            raise ValueError(f"need {self.constellation.m} component codes, got {len(codes)}")
        if len({c.t for c in codes}) != 1:
            raise ValueError("all component codes must share one block length")

    @property
    def t(self) -> int:
        return self.codes[0].t

    @property
    def dims(self) -> list[int]:
        return [c.h for c in self.codes]

    @property
    def info_length(self) -> int:
        return sum(self.dims)

    @property
    def rate(self) -> float:
        """Information bits per coded bit, H / (t m)."""
        return self.info_length / (self.t * self.constellation.m)

    @property
    def level_order(self) -> list[int]:
        """Label bit position decoded at each MSD step."""
        nb, m = self.constellation.n_bits, self.constellation.m
        return list(range(nb - 1, -1, -1)) + list(range(m - 1, nb - 1, -1))

    def split_info(self, info) -> list[np.ndarray]:
        info = np.asarray(info, dtype=np.uint8)
        if info.shape[-1] != self.info_length:
            raise ValueError(f"information word must have {self.info_length} bits, got {info.shape[-1]}")
        bounds = np.cumsum([0, *self.dims])
        return [info[..., bounds[j]: bounds[j + 1]] for j in range(len(self.codes))]


def mlc_encode(info, scheme: MlcScheme) -> np.ndarray:
    """Encode ``(..., H)`` information bits into ``(..., t)`` RAPSK symbols."""
    parts = scheme.split_info(info)
    rows = np.stack([code.encode(u) for code, u in zip(scheme.codes, parts)], axis=-2)  # (..., m, t)
    m = rows.shape[-2]
    weights = (1 << np.arange(m - 1, -1, -1)).astype(np.int64)
    labels = np.tensordot(rows.astype(np.int64), weights, axes=([-2], [0]))
    return scheme.constellation.points[labels]


@dataclass
class MsdResult:
    info: np.ndarray
    rows: np.ndarray  # decided codewords, (..., m, t) in label order
    ring: np.ndarray
    angle: np.ndarray
    success: np.ndarray  # (..., m) component decoder success per label position


def _decode_domain(y_coord, sigma, scheme, positions, bounded_bits, rows, success, infos):
    prefix = np.zeros(y_coord.shape, dtype=np.int64)
    for level, pos in enumerate(positions, start=1):
        upper = 2 ** (bounded_bits - level + 1) - 1 if bounded_bits else None
        ctx = normalize_level(y_coord, prefix, level, sigma, upper)
        code = scheme.codes[pos]
        info, ok = code.decode_soft(llr_fast(ctx), return_success=True)
        cw = code.encode(info)
        infos[pos] = info
        rows[..., pos, :] = cw
        success[..., pos] = ok
        prefix = prefix + (cw.astype(np.int64) << (level - 1))
    return prefix


def msd_decode_detailed(ys, scheme: MlcScheme, p: ChannelParams) -> MsdResult:
    ys = np.asarray(ys, dtype=complex)
    c = scheme.constellation
    if ys.shape[-1] != scheme.t:
        raise ValueError(f"expected blocks of {scheme.t} symbols")
    batch = ys.shape[:-1]
    rows = np.zeros(batch + (c.m, scheme.t), dtype=np.uint8)
    success = np.ones(batch + (c.m,), dtype=bool)
    infos: list = [None] * c.m
    rho_y = np.abs(ys)
    order = scheme.level_order

    if c.n_bits:
        y_r = (rho_y - c.r0) / c.d
        sigma_r = max(np.sqrt(p.sigma_z2) / c.d, _SIGMA_FLOOR)
        ring = _decode_domain(y_r, sigma_r, scheme, order[: c.n_bits], c.n_bits, rows, success, infos)
    else:
        ring = np.zeros(ys.shape, dtype=np.int64)

    rho_x = c.radii[ring]
    var_a = angular_sigma_a2(rho_x, np.maximum(rho_y, 1e-12), p)
    sigma_a = np.maximum(c.k / (2 * np.pi) * np.sqrt(var_a), _SIGMA_FLOOR)
    y_a = np.mod(np.angle(ys) * c.k / (2 * np.pi), c.k)
    angle = _decode_domain(y_a, sigma_a, scheme, order[c.n_bits:], 0, rows, success, infos)

    info = np.concatenate(infos, axis=-1) if infos else np.zeros(batch + (0,), dtype=np.uint8)
    return MsdResult(info, rows, ring, angle, success)


def msd_decode(ys, scheme: MlcScheme, p: ChannelParams) -> np.ndarray:
    """Recover the information bits of one or more received blocks."""
    return msd_decode_detailed(ys, scheme, p).info


@dataclass
class GenieResult:
    """Empirical per-level bit error rates with the true prefix supplied.

    ``radial[j]`` is the rate at radial level j+1; ``angular[j, r]`` the rate
    at angular level j+1 for symbols sent on ring r, and
    ``angular_mean[j]`` its average over rings.
    """

    radial: np.ndarray
    angular: np.ndarray
    trials: int

    @property
    def angular_mean(self) -> np.ndarray:
        return self.angular.mean(axis=1) if self.angular.size else self.angular

    @property
    def levels(self) -> np.ndarray:
        """Per MSD step, radial first then angular (ring-averaged)."""
        return np.concatenate([self.radial, self.angular_mean])


def genie_level_errors(c: RapskConstellation, p: ChannelParams, trials: int,
                       rng: np.random.Generator) -> GenieResult:
    """Monte Carlo level error rates of the fast demapper under genie prefixes.

    Every ring is sent ``trials // n`` times with uniform angles so the
    per-ring angular rates have equal support.
    """
    per_ring = max(trials // c.n, 1)
    ring = np.repeat(np.arange(c.n), per_ring)
    angle = rng.integers(0, c.k, ring.size)
    y = transmit(c.radii[ring] * np.exp(2j * np.pi * angle / c.k), p, rng)

    radial = np.zeros(c.n_bits)
    if c.n_bits:
        y_r = (np.abs(y) - c.r0) / c.d
        sigma_r = max(np.sqrt(p.sigma_z2) / c.d, _SIGMA_FLOOR)
        for level in range(1, c.n_bits + 1):
            prefix = ring & ((1 << (level - 1)) - 1)
            bit = (ring >> (level - 1)) & 1
            llr = llr_fast(normalize_level(y_r, prefix, level, sigma_r, 2 ** (c.n_bits - level + 1) - 1))
            radial[level - 1] = np.mean((llr < 0) != bit)

    var_a = angular_sigma_a2(c.radii[ring], np.maximum(np.abs(y), 1e-12), p)
    sigma_a = np.maximum(c.k / (2 * np.pi) * np.sqrt(var_a), _SIGMA_FLOOR)
    y_a = np.mod(np.angle(y) * c.k / (2 * np.pi), c.k)
    angular = np.zeros((c.k_bits, c.n))
    for level in range(1, c.k_bits + 1):
        prefix = angle & ((1 << (level - 1)) - 1)
        bit = (angle >> (level - 1)) & 1
        err = (llr_fast(normalize_level(y_a, prefix, level, sigma_a)) < 0) != bit
        angular[level - 1] = err.reshape(c.n, per_ring).mean(axis=1)
    return GenieResult(radial, angular, int(ring.size))
