import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import sparse

from rapsk.codes import (
    AVAILABLE_RATES,
    FrozenCode,
    IraLdpcCode,
    RepetitionCode,
    UncodedCode,
    available_rates,
    build_ira_ldpc,
    code_for_rate,
)


def gf2_rank(m):
    m = m.copy() % 2
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        pivot = np.flatnonzero(m[rank:, c])
        if pivot.size == 0:
            continue
        p = rank + pivot[0]
        m[[rank, p]] = m[[p, rank]]
        others = np.flatnonzero(m[:, c])
        others = others[others != rank]
        m[others] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def bpsk_llrs(words, ebn0_db, rate, rng):
    # unit-energy BPSK, bit 0 -> +1
    sigma2 = 1.0 / (2 * rate * 10 ** (ebn0_db / 10))
    x = 1.0 - 2.0 * words
    y = x + math.sqrt(sigma2) * rng.standard_normal(words.shape)
    return 2 * y / sigma2


@pytest.fixture(scope="module")
def half_rate():
    return build_ira_ldpc(Fraction(1, 2), 1024, seed=3)


def test_available_rates():
    rates = available_rates()
    assert Fraction(8, 9) in rates and Fraction(1) in rates and Fraction(0) in rates
    assert len(AVAILABLE_RATES) == 10
    assert rates == sorted(rates)


def test_uncoded_identity(rng):
    code = UncodedCode(32)
    u = rng.integers(0, 2, 32)
    np.testing.assert_array_equal(code.encode(u), u)
    assert code.h == code.t == 32


def test_repetition_layout_and_combining():
    code = RepetitionCode(6, 3)
    assert "".join(map(str, code.encode([1, 0]))) == "111000"
    assert code.decode_soft([1.0, 1.0, -5.0, 2.0, 2.0, 2.0]).tolist() == [1, 0]
    with pytest.raises(ValueError):
        RepetitionCode(7, 3)


def test_frozen_code():
    code = FrozenCode(16)
    assert code.h == 0 and code.rate == 0
    np.testing.assert_array_equal(code.encode(np.zeros((3, 0))), np.zeros((3, 16)))
    info, ok = code.decode_soft(np.full((3, 16), -4.0), return_success=True)
    assert info.shape == (3, 0) and ok.all()


@pytest.mark.parametrize("code", [UncodedCode(512), RepetitionCode(512, 4), FrozenCode(512),
                                  build_ira_ldpc("3/4", 512, seed=1)], ids=repr)
def test_all_positive_llrs_decode_to_zero(code):
    np.testing.assert_array_equal(code.decode_soft(np.full(512, 10.0)), np.zeros(code.h))


@pytest.mark.parametrize("code", [UncodedCode(512), RepetitionCode(512, 2), FrozenCode(512),
                                  build_ira_ldpc("1/4", 512, seed=2), build_ira_ldpc("8/9", 512, seed=2)],
                         ids=repr)
def test_encode_decode_consistency(code, rng):
    u = rng.integers(0, 2, (5, code.h), dtype=np.uint8)
    words = code.encode(u)
    llr = 20.0 * (1.0 - 2.0 * words)
    np.testing.assert_array_equal(code.decode_soft(llr), u)


def test_length_checks():
    code = build_ira_ldpc("1/2", 512)
    with pytest.raises(ValueError):
        code.encode(np.zeros(100))
    with pytest.raises(ValueError):
        code.decode_soft(np.zeros(100))


@pytest.mark.parametrize("rate", [str(r) for r in AVAILABLE_RATES])
def test_ira_codewords_have_zero_syndrome(rate, rng):
    code = build_ira_ldpc(rate, 1024, seed=5)
    assert code.h == round(Fraction(rate) * 1024)
    u = rng.integers(0, 2, (8, code.h), dtype=np.uint8)
    words = code.encode(u)
    assert not code.syndrome(words).any()
    np.testing.assert_array_equal(words[:, : code.h], u)  # systematic


def test_ira_construction_is_deterministic():
    a = build_ira_ldpc("1/2", 512, seed=7)
    b = build_ira_ldpc("1/2", 512, seed=7)
    c = build_ira_ldpc("1/2", 512, seed=8)
    assert (a.pcm != b.pcm).nnz == 0
    assert (a.pcm != c.pcm).nnz > 0


def test_ira_frame_length_dimensions():
    assert build_ira_ldpc("8/9", 16200, seed=1).h == 14400


def test_ira_structure(half_rate):
    code = half_rate
    acc = code.pcm[:, code.h:].toarray()
    p = code.n_checks
    expected = np.eye(p, dtype=int) + np.eye(p, k=-1, dtype=int)
    np.testing.assert_array_equal(acc, expected)
    col_w = np.asarray(code.pcm[:, : code.h].sum(axis=0)).ravel()
    assert np.all(col_w == 3)
    row_w = np.asarray(code.a.sum(axis=1)).ravel()
    assert row_w.max() - row_w.min() <= 1
    assert gf2_rank(code.pcm.toarray().astype(np.uint8)) == p


@pytest.mark.parametrize("rate", ["1/4", "1/2", "3/4"])
def test_ira_has_no_four_cycles(rate):
    code = build_ira_ldpc(rate, 1024, seed=2)
    h = code.pcm.astype(np.int64)
    overlap = (h.T @ h).tocoo()
    off = overlap.row != overlap.col
    assert overlap.data[off].max() <= 1


def test_ira_alist_round_trip(tmp_path, half_rate):
    path = tmp_path / "code.alist"
    half_rate.write_alist(path)
    lines = path.read_text().splitlines()
    n, mrows = map(int, lines[0].split())
    assert (n, mrows) == (half_rate.t, half_rate.n_checks)
    rows, cols = [], []
    for j, line in enumerate(lines[4: 4 + n]):
        for r in line.split():
            rows.append(int(r) - 1)
            cols.append(j)
    rebuilt = sparse.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(mrows, n))
    assert (rebuilt != half_rate.pcm).nnz == 0


def test_ira_early_exit_on_clean_input(rng):
    code = build_ira_ldpc("2/3", 768, seed=4, max_iters=0)
    u = rng.integers(0, 2, (3, code.h), dtype=np.uint8)
    info, ok = code.decode_soft(6.0 * (1.0 - 2.0 * code.encode(u)), return_success=True)
    assert ok.all()
    np.testing.assert_array_equal(info, u)


def test_ira_reports_failure_on_garbage(rng, half_rate):
    _, ok = half_rate.decode_soft(rng.normal(size=(2, 1024)), return_success=True)
    assert not ok.any()


def test_ira_half_rate_ber_at_3db(rng, half_rate):
    code = half_rate
    blocks = math.ceil(100_000 / code.h)
    u = rng.integers(0, 2, (blocks, code.h), dtype=np.uint8)
    llr = bpsk_llrs(code.encode(u), 3.0, 0.5, rng)
    ber = np.mean(code.decode_soft(llr) != u)
    assert ber < 1e-3


def test_ira_ber_non_increasing_in_snr(half_rate):
    code = half_rate
    blocks = math.ceil(100_000 / code.h)
    bers = []
    for i, ebn0 in enumerate([1.5, 2.0, 2.5]):
        r = np.random.default_rng(100 + i)
        u = r.integers(0, 2, (blocks, code.h), dtype=np.uint8)
        bers.append(np.mean(code.decode_soft(bpsk_llrs(code.encode(u), ebn0, 0.5, r)) != u))
    n = blocks * code.h
    for lo, hi in zip(bers, bers[1:]):
        slack = 2 * math.sqrt(max(lo, 1 / n) / n) + 2 * math.sqrt(max(hi, 1 / n) / n)
        assert hi <= lo + slack


def test_code_for_rate_dispatch():
    assert isinstance(code_for_rate(0, 256), FrozenCode)
    assert isinstance(code_for_rate(1, 256), UncodedCode)
    assert isinstance(code_for_rate("4/5", 256), IraLdpcCode)
    assert isinstance(code_for_rate(0.5, 256), IraLdpcCode)


@pytest.mark.parametrize("rate,t", [("7/8", 1024), ("1/2", 128)])
def test_ira_rejects_bad_parameters(rate, t):
    with pytest.raises(ValueError):
        build_ira_ldpc(rate, t)
