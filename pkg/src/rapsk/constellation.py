"""Regular APSK geometry, labelling and PAPR, plus a square-QAM baseline.

A RAPSK constellation has ``n`` equidistant concentric rings of ``k``
angularly aligned points each. Rings are r_i = r0 + i*D, and D is chosen so
that the mean power is exactly one.

Labels are m = log2(n*k) bits, most significant first: the leading
log2(n) bits are the plain binary ring index and the trailing log2(k) bits
the plain binary angle index. The flat point index ``ring * k + angle`` is
therefore the integer value of the label.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "QamRef",
    "RapskConstellation",
    "RapskParams",
    "bits_to_int",
    "build_qam",
    "build_rapsk",
    "int_to_bits",
    "label_to_point",
    "papr",
    "papr_limit",
    "papr_normalized",
    "point_to_indices",
    "r0_for_normalized_spacing",
    "ring_spacing",
]


def _is_pow2(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


def int_to_bits(values, width: int) -> np.ndarray:
    """MSB-first binary expansion, shape ``values.shape + (width,)``."""
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1)
    return ((values[..., None] >> shifts) & 1).astype(np.uint8)


def bits_to_int(bits) -> np.ndarray:
    """Inverse of :func:`int_to_bits` along the last axis."""
    bits = np.asarray(bits, dtype=np.int64)
    width = bits.shape[-1]
    return (bits << np.arange(width - 1, -1, -1)).sum(axis=-1)


@dataclass(frozen=True)
class RapskParams:
    n: int
    k: int
    r0: float = 1.0

    def __post_init__(self):
        if not _is_pow2(self.n):
            raise ValueError(f"ring count must be a power of two, got {self.n}")
        if not (_is_pow2(self.k) and self.k >= 2):
            raise ValueError(f"points per ring must be a power of two >= 2, got {self.k}")
        if self.n >= 2 and not 0.0 < self.r0 < 1.0:
            raise ValueError("r0 must lie strictly inside (0, 1) when there are several rings")

    @property
    def size(self) -> int:
        return self.n * self.k


def ring_spacing(n: int, r0: float) -> float:
    """Ring spacing D making the mean power exactly one.

    Positive root of r0^2 + (n-1) r0 D + (n-1)(2n-1)/6 D^2 = 1. The form
    below avoids the cancellation in sqrt(1 + e) - 1 when r0 is close to one.
    """
    if n < 2:
        raise ValueError("ring spacing needs at least two rings")
    if not 0.0 < r0 < 1.0:
        raise ValueError("r0 must lie strictly inside (0, 1)")
    e = 2.0 * (1.0 - r0 * r0) * (2 * n - 1) / (3.0 * r0 * r0 * (n - 1))
    return float(3.0 * r0 / (2 * n - 1) * e / (math.sqrt(1.0 + e) + 1.0))


@dataclass(frozen=True, eq=False)
class RapskConstellation:
    params: RapskParams
    d: float
    radii: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def r0(self) -> float:
        return self.params.r0

    @property
    def size(self) -> int:
        return self.params.size

    @property
    def n_bits(self) -> int:
        return self.n.bit_length() - 1

    @property
    def k_bits(self) -> int:
        return self.k.bit_length() - 1

    @property
    def m(self) -> int:
        return self.n_bits + self.k_bits

    @property
    def power(self) -> float:
        return float(np.mean(np.abs(self.points) ** 2))

    def point(self, ring, angle):
        return self.points[np.asarray(ring) * self.k + np.asarray(angle)]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "r0": self.r0,
            "d": self.d,
            "papr": papr(self),
            "points": [[float(p.real), float(p.imag)] for p in self.points],
        }

    def dump_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))


def build_rapsk(params: RapskParams) -> RapskConstellation:
    n, k = params.n, params.k
    if n == 1:
        d = 0.0
        params = RapskParams(1, k, 1.0)
    else:
        d = ring_spacing(n, params.r0)
    radii = params.r0 + d * np.arange(n)
    phases = np.exp(2j * np.pi * np.arange(k) / k)
    points = (radii[:, None] * phases[None, :]).ravel()
    radii.setflags(write=False)
    points.setflags(write=False)
    return RapskConstellation(params, d, radii, points)


def label_to_point(c: RapskConstellation, bits) -> complex:
    """Map an m-bit label (MSB first, ring bits then angle bits) to its point."""
    bits = np.asarray(bits)
    if bits.shape[-1] != c.m:
        raise ValueError(f"label must have {c.m} bits, got {bits.shape[-1]}")
    idx = bits_to_int(bits)
    out = c.points[idx]
    return complex(out) if np.ndim(out) == 0 else out


def point_to_indices(c: RapskConstellation, y):
    """Per-domain hard decision: nearest ring index and nearest angle index.

    Ties go to the lower index (ceil(u - 1/2) rounds halves down).
    """
    y = np.asarray(y, dtype=complex)
    if c.n == 1:
        ring = np.zeros(y.shape, dtype=np.int64)
    else:
        u = (np.abs(y) - c.r0) / c.d
        ring = np.clip(np.ceil(u - 0.5), 0, c.n - 1).astype(np.int64)
    v = np.angle(y) * c.k / (2 * np.pi)
    angle = np.mod(np.ceil(v - 0.5), c.k).astype(np.int64)
    return ring, angle


def papr(c) -> float:
    """Peak-to-average power ratio r_{n-1}^2 / P (or max/mean for QAM)."""
    if isinstance(c, QamRef):
        return c.papr
    p = float(np.mean(c.radii ** 2))
    return float(c.radii[-1] ** 2 / p)


def papr_normalized(n: int, d_tilde: float) -> float:
    """PAPR as a function of the normalised spacing D/r0 alone."""
    rel = 1.0 + np.arange(n) * d_tilde
    return float(n * rel[-1] ** 2 / np.sum(rel ** 2))


def r0_for_normalized_spacing(n: int, d_tilde: float) -> float:
    """Innermost radius giving unit power for a prescribed D/r0."""
    rel = 1.0 + np.arange(n) * d_tilde
    return float(1.0 / np.sqrt(np.mean(rel ** 2)))


def papr_limit(n: int) -> float:
    """PAPR as D/r0 grows without bound: 6(n-1)/(2n-1)."""
    if n < 2:
        raise ValueError("limit defined for at least two rings")
    return 6.0 * (n - 1) / (2 * n - 1)


@dataclass(frozen=True, eq=False)
class QamRef:
    """Square QAM with per-axis Gray labels, unit mean power.

    ``points[label]`` is the point carrying the integer label; the high half
    of the label bits is the in-phase Gray word, the low half the quadrature.
    """

    size: int
    points: np.ndarray = field(repr=False)
    papr: float
    scale: float

    @property
    def side(self) -> int:
        return int(round(np.sqrt(self.size)))

    @property
    def m(self) -> int:
        return self.size.bit_length() - 1

    def detect(self, y) -> np.ndarray:
        """Nearest-neighbour label (per-axis slicing on the square grid)."""
        y = np.asarray(y, dtype=complex)
        side = self.side
        ix = np.clip(np.rint((y.real / self.scale + side - 1) / 2), 0, side - 1).astype(np.int64)
        iq = np.clip(np.rint((y.imag / self.scale + side - 1) / 2), 0, side - 1).astype(np.int64)
        gray = np.arange(side) ^ (np.arange(side) >> 1)
        return gray[ix] * side + gray[iq]


def build_qam(size: int) -> QamRef:
    if not _is_pow2(size) or (size.bit_length() - 1) % 2:
        raise ValueError("square QAM needs an even power of two")
    side = int(round(np.sqrt(size)))
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    gray = np.arange(side) ^ (np.arange(side) >> 1)
    raw = np.empty(size, dtype=complex)
    for ix in range(side):
        for iq in range(side):
            raw[gray[ix] * side + gray[iq]] = levels[ix] + 1j * levels[iq]
    energy = np.abs(raw) ** 2
    scale = 1.0 / np.sqrt(energy.mean())
    points = raw * scale
    points.setflags(write=False)
    return QamRef(size, points, float(energy.max() / energy.mean()), float(scale))
