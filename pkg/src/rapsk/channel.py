"""White Gaussian plus Von Mises phase-noise channel, y = exp(j phi) x + z.

``sigma_z2`` is the variance of *each* quadrature of z, so with unit-power
constellations the SNR is 1 / (2 sigma_z2).

Besides sampling, the module exposes the Gaussian surrogates the demapper
uses: radial noise ~ N(0, sigma_z2) and angular noise ~ N(0, sigma_a2) with
sigma_a2 = sigma_w2 (white-noise part, ring dependent) + sigma_p2 (phase
noise part).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .numerics import sample_von_mises, von_mises_pdf

__all__ = [
    "AngularModel",
    "ChannelParams",
    "angular_sigma_a2",
    "angular_sigma_p2",
    "angular_sigma_w2",
    "conditional_phase_pdf",
    "radial_noise_sigma",
    "rician_pdf",
    "sigma_z2_from_snr_db",
    "snr_db_from_sigma_z2",
    "transmit",
]


class AngularModel(str, enum.Enum):
    """Gaussian surrogate for a Von Mises law of concentration kappa.

    PAPER uses the curvature match with a 2*pi normaliser, whose high-SNR
    limit is (2*pi)^(1/3) / kappa. SMOOTH uses sqrt(2*pi) and tends to
    1 / kappa. HIGH_SNR is 1 / kappa outright.
    """

    PAPER = "paper"
    SMOOTH = "smooth"
    HIGH_SNR = "highsnr"


@dataclass(frozen=True)
class ChannelParams:
    sigma_z2: float
    kappa_phi: float = math.inf
    angular_model: AngularModel = AngularModel.SMOOTH

    def __post_init__(self):
        if not self.sigma_z2 >= 0:
            raise ValueError("sigma_z2 must be non-negative")
        if not self.kappa_phi > 0:
            raise ValueError("kappa_phi must be positive (inf disables phase noise)")
        object.__setattr__(self, "angular_model", AngularModel(self.angular_model))

    @classmethod
    def from_snr_db(cls, snr_db: float, kappa_phi: float = math.inf, angular_model="smooth"):
        return cls(sigma_z2_from_snr_db(snr_db), kappa_phi, AngularModel(angular_model))

    @property
    def snr_db(self) -> float:
        return snr_db_from_sigma_z2(self.sigma_z2)


def sigma_z2_from_snr_db(snr_db: float) -> float:
    return 0.5 * 10.0 ** (-snr_db / 10.0)


def snr_db_from_sigma_z2(sigma_z2: float) -> float:
    return math.inf if sigma_z2 == 0 else 10.0 * math.log10(1.0 / (2.0 * sigma_z2))


def transmit(x, p: ChannelParams, rng: np.random.Generator) -> np.ndarray:
    """Pass symbols through the channel; one phase and noise draw per symbol.

    The phase draw happens before the Gaussian draw so a fixed stream always
    produces the same sequence.
    """
    x = np.asarray(x, dtype=complex)
    y = x.copy()
    if not math.isinf(p.kappa_phi):
        y = y * np.exp(1j * sample_von_mises(p.kappa_phi, rng, size=x.shape))
    if p.sigma_z2 > 0:
        s = math.sqrt(p.sigma_z2)
        noise = rng.standard_normal(x.shape + (2,))
        y = y + s * (noise[..., 0] + 1j * noise[..., 1])
    return y


def radial_noise_sigma(p: ChannelParams) -> float:
    return math.sqrt(p.sigma_z2)


def _curvature_variance(kappa, norm: float):
    # (kappa e^kappa / (norm I0(kappa)))^(-2/3) = (kappa / (norm i0e(kappa)))^(-2/3)
    return (kappa / (norm * special.i0e(kappa))) ** (-2.0 / 3.0)


def angular_sigma_w2(rho_x, rho_y, p: ChannelParams):
    """Angular variance contributed by white noise at radii (rho_x, rho_y).

    With kappa_rho = rho_x rho_y / sigma_z2. Returns 0 on a noiseless channel.
    """
    rho_x = np.asarray(rho_x, dtype=float)
    rho_y = np.asarray(rho_y, dtype=float)
    if p.sigma_z2 == 0:
        return np.zeros(np.broadcast(rho_x, rho_y).shape)[()]
    kappa = rho_x * rho_y / p.sigma_z2
    if np.any(kappa <= 0):
        raise ValueError("kappa_rho must be positive (radii must be > 0)")
    model = p.angular_model
    if model is AngularModel.HIGH_SNR:
        out = 1.0 / kappa
    elif model is AngularModel.SMOOTH:
        out = _curvature_variance(kappa, math.sqrt(2 * math.pi))
    else:
        out = _curvature_variance(kappa, 2 * math.pi)
    return out[()] if isinstance(out, np.ndarray) else out


def angular_sigma_p2(p: ChannelParams) -> float:
    """Angular variance contributed by phase noise (sqrt(2 pi) curvature form)."""
    if math.isinf(p.kappa_phi):
        return 0.0
    return float(_curvature_variance(p.kappa_phi, math.sqrt(2 * math.pi)))


def angular_sigma_a2(rho_x, rho_y, p: ChannelParams):
    return angular_sigma_w2(rho_x, rho_y, p) + angular_sigma_p2(p)


def rician_pdf(rho_y, rho_x: float, sigma_z2: float):
    """Exact density of |y| given |x| = rho_x, with no phase noise."""
    if not sigma_z2 > 0:
        raise ValueError("sigma_z2 must be positive")
    rho_y = np.asarray(rho_y, dtype=float)
    kappa = rho_x * rho_y / sigma_z2
    # I0(kappa) e^{-(ry^2+rx^2)/2s2} = i0e(kappa) e^{-(ry-rx)^2/2s2}
    val = rho_y / sigma_z2 * special.i0e(kappa) * np.exp(-((rho_y - rho_x) ** 2) / (2 * sigma_z2))
    return val[()]


def conditional_phase_pdf(theta, rho_x: float, rho_y: float, sigma_z2: float):
    """Exact density of the phase error given both radii (Von Mises, kappa_rho)."""
    if not sigma_z2 > 0:
        raise ValueError("sigma_z2 must be positive")
    return von_mises_pdf(theta, 0.0, rho_x * rho_y / sigma_z2)
