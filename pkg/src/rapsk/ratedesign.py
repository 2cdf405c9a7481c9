"""Per-level equivalent-BSC error probabilities and code-rate assignment."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from scipy import integrate, special

from .channel import ChannelParams, angular_sigma_a2
from .codes import available_rates
from .constellation import RapskConstellation
from .numerics import kappa_for_sigma, von_mises_pdf

__all__ = [
    "RateDesign",
    "RateRule",
    "binary_entropy",
    "design_rates",
    "level_error_prob",
    "quantize_rates",
]


class RateRule(str, enum.Enum):
    ONE_MINUS_P = "one-minus-p"
    BSC_CAPACITY = "bsc-capacity"


def binary_entropy(p):
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    return np.nan_to_num(h)[()]


def level_error_prob(sigma_i: float) -> float:
    """Crossover probability of one MSD level with normalised deviation sigma_i.

    The period-2 wrapped Gaussian is replaced by its moment-matched Von Mises
    law on the circle; the error event is the half circle away from the
    transmitted bit: 2 * int_{pi/2}^{pi} VM(psi | 0, a(sigma_i)) dpsi.

    For weak concentration the gap 1/2 - p is integrated instead, from
    VM(psi) - VM(pi - psi) on [0, pi/2], so values near 1/2 stay monotone.
    """
    sigma_i = float(sigma_i)
    if not sigma_i > 0:
        raise ValueError("sigma_i must be positive")
    kappa = float(kappa_for_sigma(sigma_i))
    opts = dict(epsabs=1e-12, epsrel=1e-10, limit=200)
    if kappa > 1.0:
        val, _ = integrate.quad(lambda s: von_mises_pdf(s, 0.0, kappa), np.pi / 2, np.pi, **opts)
        p = 2.0 * val
    else:
        norm = np.pi * special.i0(kappa)
        gap, _ = integrate.quad(lambda s: np.sinh(kappa * np.cos(s)) / norm, 0.0, np.pi / 2,
                                epsabs=1e-17, epsrel=1e-12, limit=200)
        p = 0.5 - gap
    return float(np.clip(p, 0.0, 0.5))


def _rate_from_p(p, rule: RateRule):
    p = np.asarray(p, dtype=float)
    return 1.0 - p if rule is RateRule.ONE_MINUS_P else 1.0 - binary_entropy(p)


@dataclass(frozen=True)
class RateDesign:
    """Rates per MSD step (radial levels first, then angular ones).

    ``sigmas`` and ``p`` are per level; angular levels hold one entry per
    ring (radial levels a single entry). ``proposed`` are exact rule rates,
    ``quantized`` the selected supported rates (None before quantisation).
    """

    n_bits: int
    k_bits: int
    rule: RateRule
    sigmas: tuple
    p: tuple
    proposed: tuple
    quantized: tuple | None = None
    margin: float | None = None

    @property
    def p_mean(self) -> list[float]:
        return [float(np.mean(v)) for v in self.p]

    @property
    def overall_rate(self) -> float:
        rates = self.quantized if self.quantized is not None else self.proposed
        return float(np.mean([float(r) for r in rates]))

    def label_rates(self) -> list:
        """Quantised rates re-ordered by label bit position (MSB first)."""
        if self.quantized is None:
            raise ValueError("design has not been quantised")
        nb, kb = self.n_bits, self.k_bits
        out = [None] * (nb + kb)
        for step, r in enumerate(self.quantized):
            pos = nb - 1 - step if step < nb else nb + kb - 1 - (step - nb)
            out[pos] = r
        return out

    def to_dict(self) -> dict:
        levels = []
        for step in range(self.n_bits + self.k_bits):
            radial = step < self.n_bits
            entry = {
                "domain": "radial" if radial else "angular",
                "level": (step if radial else step - self.n_bits) + 1,
            }
            if radial:
                entry["sigma_i"] = float(self.sigmas[step][0])
                entry["p_i"] = float(self.p[step][0])
            else:
                entry["sigma_i_per_ring"] = [float(s) for s in self.sigmas[step]]
                entry["p_i_per_ring"] = [float(v) for v in self.p[step]]
                entry["p_i"] = float(np.mean(self.p[step]))
            entry["proposed_rate"] = float(self.proposed[step])
            if self.quantized is not None:
                q = self.quantized[step]
                entry["quantized_rate"] = float(q)
                entry["quantized_rate_fraction"] = str(q)
            levels.append(entry)
        out = {"rule": self.rule.value, "levels": levels, "overall_rate": self.overall_rate}
        if self.quantized is not None:
            out["proposed_overall_rate"] = float(np.mean(self.proposed))
            out["margin"] = self.margin
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def design_rates(c: RapskConstellation, p: ChannelParams, rule=RateRule.ONE_MINUS_P) -> RateDesign:
    """Capacity-rule rates for every level of ``c`` on channel ``p``.

    Radial levels use sigma = sigma_z / D. Angular levels use, per ring r_j,
    sigma = (k / 2 pi) sqrt(sigma_a2(r_j, r_j)) and average the per-ring rates.
    """
    rule = RateRule(rule)
    sigmas, ps, proposed = [], [], []

    def level_p(sigma_i):
        return np.array([0.0 if s == 0 else level_error_prob(s) for s in np.atleast_1d(sigma_i)])

    if c.n_bits:
        base = np.sqrt(p.sigma_z2) / c.d
        for level in range(1, c.n_bits + 1):
            s = np.array([base / 2 ** (level - 1)])
            pi = level_p(s)
            sigmas.append(tuple(map(float, s)))
            ps.append(tuple(map(float, pi)))
            proposed.append(float(_rate_from_p(pi, rule)[0]))

    base = c.k / (2 * np.pi) * np.sqrt(angular_sigma_a2(c.radii, c.radii, p))
    base = np.broadcast_to(base, c.radii.shape)
    for level in range(1, c.k_bits + 1):
        s = base / 2 ** (level - 1)
        pj = level_p(s)
        sigmas.append(tuple(map(float, s)))
        ps.append(tuple(map(float, pj)))
        proposed.append(float(np.mean(_rate_from_p(pj, rule))))
    return RateDesign(c.n_bits, c.k_bits, rule, tuple(sigmas), tuple(ps), tuple(proposed))


def quantize_rates(design: RateDesign, margin: float = 0.02, rates=None) -> RateDesign:
    """Largest supported rate not above ``proposed - margin`` for every level."""
    rates = sorted(Fraction(r) for r in (rates if rates is not None else available_rates()))
    chosen = []
    for r in design.proposed:
        target = r - margin + 1e-12
        pick = max((q for q in rates if float(q) <= target), default=Fraction(0))
        chosen.append(pick)
    return replace(design, quantized=tuple(chosen), margin=margin)
