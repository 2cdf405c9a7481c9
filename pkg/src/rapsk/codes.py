"""Binary component codes for the multilevel scheme.

All codes are systematic with block length ``t`` and dimension ``h``, take
channel LLRs with the convention LLR = log P(0)/P(1) and accept a leading
batch axis (``(t,)`` or ``(batch, t)``) in both ``encode`` and
``decode_soft``.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import sparse

__all__ = [
    "AVAILABLE_RATES",
    "ComponentCode",
    "FrozenCode",
    "IraLdpcCode",
    "RepetitionCode",
    "UncodedCode",
    "available_rates",
    "build_ira_ldpc",
    "code_for_rate",
]

AVAILABLE_RATES = tuple(
    Fraction(s) for s in ("1/4", "1/3", "2/5", "1/2", "3/5", "2/3", "3/4", "4/5", "5/6", "8/9")
)


def available_rates() -> list[Fraction]:
    """Coded rates plus 0 (level frozen to zeros) and 1 (uncoded), ascending."""
    return [Fraction(0), *AVAILABLE_RATES, Fraction(1)]


def _as_bits(x, length: int, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint8)
    if x.shape[-1] != length:
        raise ValueError(f"{what} must have {length} bits along the last axis, got {x.shape[-1]}")
    return x


class ComponentCode:
    t: int
    h: int

    @property
    def rate(self) -> float:
        return self.h / self.t

    def encode(self, info) -> np.ndarray:
        raise NotImplementedError

    def decode_soft(self, llrs, return_success: bool = False):
        raise NotImplementedError

    def _check_llrs(self, llrs) -> np.ndarray:
        llrs = np.asarray(llrs, dtype=float)
        if llrs.shape[-1] != self.t:
            raise ValueError(f"expected {self.t} LLRs along the last axis, got {llrs.shape[-1]}")
        return llrs


class UncodedCode(ComponentCode):
    def __init__(self, t: int):
        self.t = self.h = int(t)

    def __repr__(self):
        return f"UncodedCode(t={self.t})"

    def encode(self, info):
        return _as_bits(info, self.h, "info").copy()

    def decode_soft(self, llrs, return_success=False):
        bits = (self._check_llrs(llrs) < 0).astype(np.uint8)
        if return_success:
            return bits, np.ones(bits.shape[:-1], dtype=bool)
        return bits


class FrozenCode(ComponentCode):
    """Rate-0 level: every bit is a known zero, nothing is transmitted on it."""

    def __init__(self, t: int):
        self.t = int(t)
        self.h = 0

    def __repr__(self):
        return f"FrozenCode(t={self.t})"

    def encode(self, info):
        info = _as_bits(info, 0, "info")
        return np.zeros(info.shape[:-1] + (self.t,), dtype=np.uint8)

    def decode_soft(self, llrs, return_success=False):
        llrs = self._check_llrs(llrs)
        bits = np.zeros(llrs.shape[:-1] + (0,), dtype=np.uint8)
        if return_success:
            return bits, np.ones(llrs.shape[:-1], dtype=bool)
        return bits


class RepetitionCode(ComponentCode):
    """Each info bit repeated ``factor`` times in a contiguous run: 10 -> 111000."""

    def __init__(self, t: int, factor: int):
        if factor < 1 or t % factor:
            raise ValueError("repetition factor must divide the block length")
        self.t = int(t)
        self.factor = int(factor)
        self.h = self.t // self.factor

    def __repr__(self):
        return f"RepetitionCode(t={self.t}, factor={self.factor})"

    def encode(self, info):
        return np.repeat(_as_bits(info, self.h, "info"), self.factor, axis=-1)

    def decode_soft(self, llrs, return_success=False):
        llrs = self._check_llrs(llrs)
        sums = llrs.reshape(llrs.shape[:-1] + (self.h, self.factor)).sum(axis=-1)
        bits = (sums < 0).astype(np.uint8)
        if return_success:
            return bits, np.ones(bits.shape[:-1], dtype=bool)
        return bits


class IraLdpcCode(ComponentCode):
    """Systematic irregular repeat-accumulate LDPC code.

    The parity-check matrix is ``[A | B]``: ``A`` is a sparse (t-h) x h
    information part with column weight 3 and ``B`` the dual-diagonal
    accumulator, so check j reads ``A_j u + p_j + p_{j-1} = 0`` and the
    parity bits are a running XOR. Codewords are laid out as ``[u, p]``.

    Decoding is normalised min-sum with early exit on a zero syndrome.
    """

    def __init__(self, t: int, h: int, info_rows: np.ndarray, *, rate=None, seed=None,
                 max_iters: int = 50, scale: float = 0.75):
        self.t, self.h = int(t), int(h)
        self.n_checks = self.t - self.h
        self.rate_label = rate
        self.seed = seed
        self.max_iters = int(max_iters)
        self.scale = float(scale)
        self.info_rows = np.asarray(info_rows, dtype=np.int64)  # (h, 3)

        p = self.n_checks
        w = self.info_rows.shape[1]
        a_rows = self.info_rows.ravel()
        a_cols = np.repeat(np.arange(self.h), w)
        b_rows = np.concatenate([np.arange(p), np.arange(1, p)])
        b_cols = self.h + np.concatenate([np.arange(p), np.arange(p - 1)])
        rows = np.concatenate([a_rows, b_rows])
        cols = np.concatenate([a_cols, b_cols])
        self.a = sparse.csr_matrix((np.ones(a_rows.size, dtype=np.int64), (a_rows, a_cols)), shape=(p, self.h))
        self.pcm = sparse.csr_matrix((np.ones(rows.size, dtype=np.int64), (rows, cols)), shape=(p, self.t))
        self.pcm.sort_indices()
        # edge list ordered by check
        self._edge_var = self.pcm.indices.astype(np.int64)
        self._row_ptr = self.pcm.indptr[:-1].astype(np.int64)
        self._edge_row = np.repeat(np.arange(p), np.diff(self.pcm.indptr))
        n_edges = self._edge_var.size
        # (t, edges) incidence used to gather check messages at variables
        self._gather = sparse.csr_matrix(
            (np.ones(n_edges), (self._edge_var, np.arange(n_edges))), shape=(self.t, n_edges)
        )

    def __repr__(self):
        return f"IraLdpcCode(t={self.t}, h={self.h}, rate={self.rate_label}, seed={self.seed})"

    @property
    def n_edges(self) -> int:
        return self._edge_var.size

    def syndrome(self, words) -> np.ndarray:
        words = np.atleast_2d(np.asarray(words, dtype=np.int64))
        return (self.pcm @ words.T).T % 2

    def encode(self, info):
        info = _as_bits(info, self.h, "info")
        u = np.atleast_2d(info).astype(np.int64)
        s = (self.a @ u.T).T % 2
        parity = np.cumsum(s, axis=1) % 2
        out = np.concatenate([u, parity], axis=1).astype(np.uint8)
        return out.reshape(info.shape[:-1] + (self.t,))

    def decode_soft(self, llrs, return_success=False):
        llrs = self._check_llrs(llrs)
        flat = np.atleast_2d(llrs)
        words, ok = self._min_sum(flat)
        info = words[:, : self.h].reshape(llrs.shape[:-1] + (self.h,))
        if return_success:
            return info, ok.reshape(llrs.shape[:-1])
        return info

    def _min_sum(self, llr: np.ndarray):
        batch = llr.shape[0]
        words = (llr < 0).astype(np.uint8)
        ok = ~self.syndrome(words).any(axis=1)
        active = np.flatnonzero(~ok)
        if active.size == 0:
            return words, ok

        ev, er, rp = self._edge_var, self._edge_row, self._row_ptr
        ch = llr[active]
        hard = words[active]
        v2c = ch[:, ev]
        for _ in range(self.max_iters):
            mag = np.abs(v2c)
            neg = v2c < 0
            min1 = np.minimum.reduceat(mag, rp, axis=1)
            is_min = mag == min1[:, er]
            n_min = np.add.reduceat(is_min, rp, axis=1)
            min2 = np.minimum.reduceat(np.where(is_min, np.inf, mag), rp, axis=1)
            min2 = np.where(n_min > 1, min1, np.minimum(min2, 1e6))
            parity = np.add.reduceat(neg, rp, axis=1) & 1
            c2v = self.scale * np.where(is_min, min2[:, er], min1[:, er])
            c2v = np.where((parity[:, er] ^ neg).astype(bool), -c2v, c2v)

            total = ch + (self._gather @ c2v.T).T
            hard = (total < 0).astype(np.uint8)
            done = ~self.syndrome(hard).any(axis=1)
            if done.any():
                idx = active[done]
                words[idx] = hard[done]
                ok[idx] = True
                keep = ~done
                active, ch, total, c2v, hard = active[keep], ch[keep], total[keep], c2v[keep], hard[keep]
                if active.size == 0:
                    break
            v2c = total[:, ev] - c2v
        else:
            words[active] = hard
        return words, ok

    def write_alist(self, path) -> None:
        """Export the parity-check matrix in alist format (1-based indices)."""
        csc = self.pcm.tocsc()
        csc.sort_indices()
        col_deg = np.diff(csc.indptr)
        row_deg = np.diff(self.pcm.indptr)
        lines = [
            f"{self.t} {self.n_checks}",
            f"{col_deg.max()} {row_deg.max()}",
            " ".join(map(str, col_deg)),
            " ".join(map(str, row_deg)),
        ]
        for j in range(self.t):
            rows = csc.indices[csc.indptr[j]: csc.indptr[j + 1]] + 1
            lines.append(" ".join(map(str, rows)))
        for i in range(self.n_checks):
            cols = self.pcm.indices[self.pcm.indptr[i]: self.pcm.indptr[i + 1]] + 1
            lines.append(" ".join(map(str, cols)))
        Path(path).write_text("\n".join(lines) + "\n")


def _place_info_edges(n_checks: int, h: int, rng: np.random.Generator, weight: int = 3,
                      retries: int = 50) -> np.ndarray:
    """Column-weight-``weight`` info part with balanced check degrees.

    Rows are drawn among the least loaded checks; a draw sharing two checks
    with an earlier column (a 4-cycle, including with the accumulator) is
    redrawn up to ``retries`` times and then accepted.
    """
    used = {(j, j + 1) for j in range(n_checks - 1)}
    deg = np.zeros(n_checks)
    out = np.empty((h, weight), dtype=np.int64)
    pool = min(n_checks, max(4 * weight, 32))
    for col in range(h):
        key = deg + rng.random(n_checks)
        cand = np.argpartition(key, pool - 1)[:pool] if pool < n_checks else np.arange(n_checks)
        cand = cand[np.argsort(key[cand])]
        choice = None
        for attempt in range(retries + 1):
            if attempt == 0:
                pick = cand[:weight]
            else:
                pick = rng.choice(cand, size=weight, replace=False)
            pick = np.sort(pick)
            pairs = [(int(pick[a]), int(pick[b])) for a in range(weight) for b in range(a + 1, weight)]
            if not any(pr in used for pr in pairs):
                choice = pick
                break
        if choice is None:
            choice = pick
        used.update((int(choice[a]), int(choice[b])) for a in range(weight) for b in range(a + 1, weight))
        deg[choice] += 1
        out[col] = choice
    return out


def build_ira_ldpc(rate, t: int, seed: int = 0, max_iters: int = 50) -> IraLdpcCode:
    rate = Fraction(rate).limit_denominator(1000)
    if rate not in AVAILABLE_RATES:
        raise ValueError(f"rate {rate} is not one of the supported coded rates")
    if t < 256:
        raise ValueError("IRA-LDPC construction needs a block length of at least 256")
    h = int(round(float(rate) * t))
    n_checks = t - h
    if h < 1 or n_checks < 3:
        raise ValueError("infeasible IRA-LDPC dimensions")
    rng = np.random.default_rng([int(seed), int(t), rate.numerator, rate.denominator])
    info_rows = _place_info_edges(n_checks, h, rng)
    return IraLdpcCode(t, h, info_rows, rate=rate, seed=seed, max_iters=max_iters)


def code_for_rate(rate, t: int, seed: int = 0, max_iters: int = 50) -> ComponentCode:
    """Map a quantised rate to a component code: 0 frozen, 1 uncoded, else IRA-LDPC."""
    rate = Fraction(rate).limit_denominator(1000)
    if rate == 0:
        return FrozenCode(t)
    if rate == 1:
        return UncodedCode(t)
    return build_ira_ldpc(rate, t, seed, max_iters)
