"""Monte Carlo sweeps: uncoded SER (RAPSK or QAM) and coded MLC/MSD BER.

Randomness is split per (SNR point, batch) from a master seed, and batches
are reduced in index order with a fixed stopping rule, so a run's output
does not depend on how many worker processes computed it.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .channel import ChannelParams, transmit
from .codes import code_for_rate
from .constellation import RapskParams, build_qam, build_rapsk, int_to_bits, point_to_indices
from .mlcodec import MlcScheme, mlc_encode, msd_decode_detailed
from .ratedesign import design_rates, quantize_rates

__all__ = [
    "CSV_HEADER",
    "ResultRow",
    "SimConfig",
    "build_scheme",
    "emit_results",
    "run",
    "run_coded_ber",
    "run_uncoded_ser",
    "seed_stream",
    "wilson_interval",
]

CSV_HEADER = ["snr_db", "kappa_phi", "trials", "symbol_errors", "ser", "bit_errors", "ber", "wall_seconds", "seed"]


@dataclass(frozen=True)
class SimConfig:
    """One sweep.

    ``trials`` caps symbols per point in uncoded mode and blocks of ``t``
    symbols in coded mode. ``target_errors`` counts symbol errors (uncoded)
    or information-bit errors (coded); a point stops at whichever limit
    comes first, checked after each batch.
    """

    mode: str = "uncoded"
    family: str = "rapsk"
    n: int = 8
    k: int = 32
    r0: float = 0.6
    qam_size: int = 256
    snr_start: float = 20.0
    snr_stop: float = 30.0
    snr_step: float = 1.0
    kappa_phi: float = math.inf
    trials: int = 1_000_000
    target_errors: int = 200
    t: int = 4096
    seed: int = 1
    angular_model: str = "smooth"
    rate_rule: str = "one-minus-p"
    design_snr_db: float | None = None
    margin: float = 0.02
    rates: tuple | None = None
    max_iters: int = 50
    batch_size: int | None = None
    workers: int = 1
    record_timing: bool = False

    def __post_init__(self):
        for name in ("r0", "snr_start", "snr_stop", "snr_step", "kappa_phi", "margin"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.design_snr_db is not None:
            object.__setattr__(self, "design_snr_db", float(self.design_snr_db))
        if self.mode not in ("uncoded", "coded"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.family not in ("rapsk", "qam"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.mode == "coded" and self.family != "rapsk":
            raise ValueError("coded simulation is only available for RAPSK")
        if not self.snr_step > 0:
            raise ValueError("snr_step must be positive")
        if self.snr_stop < self.snr_start:
            raise ValueError("snr_stop must not be below snr_start")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.target_errors < 1:
            raise ValueError("target_errors must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.rates is not None:
            object.__setattr__(self, "rates", tuple(str(Fraction(r)) for r in self.rates))

    @property
    def snr_grid(self) -> list[float]:
        count = int(math.floor((self.snr_stop - self.snr_start) / self.snr_step + 1e-9)) + 1
        return [round(self.snr_start + i * self.snr_step, 10) for i in range(count)]

    @property
    def effective_batch(self) -> int:
        if self.batch_size:
            return int(self.batch_size)
        return 4 if self.mode == "coded" else 65536


@dataclass
class ResultRow:
    snr_db: float
    kappa_phi: float
    trials: int
    symbol_errors: int
    ser: float
    bit_errors: int
    ber: float
    per_level_errors: list | None = None
    wall_seconds: float = 0.0
    seed: int = 0


def seed_stream(master_seed: int, point_index: int, batch_index: int) -> np.random.Generator:
    """Independent Philox stream for one (point, batch) pair."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(point_index), int(batch_index)))
    return np.random.Generator(np.random.Philox(ss))


def wilson_interval(errors: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    p = errors / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@functools.lru_cache(maxsize=8)
def build_scheme(cfg: SimConfig) -> tuple[MlcScheme, object]:
    """Component codes for a coded run (cached per process)."""
    c = build_rapsk(RapskParams(cfg.n, cfg.k, cfg.r0))
    design_snr = cfg.design_snr_db if cfg.design_snr_db is not None else cfg.snr_start
    p = ChannelParams.from_snr_db(design_snr, cfg.kappa_phi, cfg.angular_model)
    design = quantize_rates(design_rates(c, p, cfg.rate_rule), cfg.margin)
    if cfg.rates is not None:
        if len(cfg.rates) != c.m:
            raise ValueError(f"rate override needs {c.m} entries (radial levels first, LSB first)")
        design = replace(design, quantized=tuple(Fraction(r) for r in cfg.rates))
    codes = [code_for_rate(r, cfg.t, seed=pos + 1, max_iters=cfg.max_iters)
             for pos, r in enumerate(design.label_rates())]
    return MlcScheme(c, codes), design


# batch kernels: (errors used for stopping, trials, symbol_errors, bit_errors, bits, per-level)

def _uncoded_batch(cfg: SimConfig, point: int, snr: float, batch: int, size: int):
    rng = seed_stream(cfg.seed, point, batch)
    p = ChannelParams.from_snr_db(snr, cfg.kappa_phi, cfg.angular_model)
    if cfg.family == "qam":
        q = build_qam(cfg.qam_size)
        idx = rng.integers(0, q.size, size)
        det = q.detect(transmit(q.points[idx], p, rng))
        m = q.m
    else:
        c = build_rapsk(RapskParams(cfg.n, cfg.k, cfg.r0))
        idx = rng.integers(0, c.size, size)
        ring, angle = point_to_indices(c, transmit(c.points[idx], p, rng))
        det = ring * c.k + angle
        m = c.m
    wrong = det != idx
    sym = int(np.count_nonzero(wrong))
    bits = int(np.count_nonzero(int_to_bits(det[wrong], m) != int_to_bits(idx[wrong], m)))
    return sym, size, sym, bits, size * m, None


def _coded_batch(cfg: SimConfig, point: int, snr: float, batch: int, size: int):
    rng = seed_stream(cfg.seed, point, batch)
    scheme, _ = build_scheme(cfg)
    p = ChannelParams.from_snr_db(snr, cfg.kappa_phi, cfg.angular_model)
    info = rng.integers(0, 2, (size, scheme.info_length), dtype=np.uint8)
    rows = np.stack([code.encode(u) for code, u in zip(scheme.codes, scheme.split_info(info))], axis=-2)
    res = msd_decode_detailed(transmit(mlc_encode(info, scheme), p, rng), scheme, p)
    wrong = res.rows != rows
    per_level = wrong.sum(axis=(0, 2)).tolist()
    sym = int(np.count_nonzero(wrong.any(axis=-2)))
    bit = int(np.count_nonzero(res.info != info))
    return bit, size * scheme.t, sym, bit, info.size, per_level


def _run_batch(args):
    cfg, point, snr, batch, size = args
    kernel = _coded_batch if cfg.mode == "coded" else _uncoded_batch
    return kernel(cfg, point, snr, batch, size)


def _sweep(cfg: SimConfig, pool) -> list[ResultRow]:
    rows = []
    bsize = cfg.effective_batch
    n_batches = math.ceil(cfg.trials / bsize)
    for point, snr in enumerate(cfg.snr_grid):
        t0 = time.perf_counter()
        stop_count = trials = sym = bits = nbits = 0
        levels = None
        b = 0
        done = False
        while not done and b < n_batches:
            wave = range(b, min(b + cfg.workers, n_batches))
            tasks = [(cfg, point, snr, j, min(bsize, cfg.trials - j * bsize)) for j in wave]
            results = list(pool.map(_run_batch, tasks)) if pool else [_run_batch(t) for t in tasks]
            for res in results:
                e, tr, s, bt, nb, lv = res
                stop_count += e
                trials += tr
                sym += s
                bits += bt
                nbits += nb
                if lv is not None:
                    levels = lv if levels is None else [x + y for x, y in zip(levels, lv)]
                b += 1
                if stop_count >= cfg.target_errors:
                    done = True
                    break
        wall = time.perf_counter() - t0 if cfg.record_timing else 0.0
        rows.append(ResultRow(
            snr_db=snr, kappa_phi=cfg.kappa_phi, trials=trials, symbol_errors=sym,
            ser=sym / trials, bit_errors=bits, ber=bits / nbits if nbits else 0.0,
            per_level_errors=levels, wall_seconds=wall, seed=cfg.seed,
        ))
    return rows


def _execute(cfg: SimConfig) -> list[ResultRow]:
    if cfg.mode == "coded":
        build_scheme(cfg)  # surface construction errors before sampling
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return _sweep(cfg, pool)
    return _sweep(cfg, None)


def run_uncoded_ser(cfg: SimConfig) -> list[ResultRow]:
    if cfg.mode != "uncoded":
        raise ValueError("configuration is not an uncoded sweep")
    return _execute(cfg)


def run_coded_ber(cfg: SimConfig) -> list[ResultRow]:
    if cfg.mode != "coded":
        raise ValueError("configuration is not a coded sweep")
    return _execute(cfg)


def run(cfg: SimConfig) -> list[ResultRow]:
    return run_coded_ber(cfg) if cfg.mode == "coded" else run_uncoded_ser(cfg)


def _fmt(x) -> str:
    if isinstance(x, float):
        return "inf" if math.isinf(x) else repr(x)
    return str(x)


def emit_results(rows, fmt: str = "csv", path=None) -> str:
    """Serialise rows as CSV (fixed header) or JSON; write to ``path`` if given."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])
        text = buf.getvalue()
    elif fmt == "json":
        def enc(v):
            return "inf" if isinstance(v, float) and math.isinf(v) else v
        text = json.dumps([{k: enc(v) for k, v in asdict(r).items()} for r in rows], indent=1) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
