import io

import numpy as np
import pytest
from numpy.random import Philox

from binexpand import (Beta, DomainError, PiecewiseConstant, Trapezoidal, Uniform,
                       bits_from_uniforms, draw_bits, empirical_statistics, expand_array,
                       statistics, uniforms, write_bits)
from binexpand.sampler import BitCounts, SampleRun, iter_bit_chunks, read_bits

from oracles import binomial_band

STEP = PiecewiseConstant([0.0, 0.5, 1.0], [0.5, 1.5])
N = 100_000


def test_injected_uniform_gives_worked_example_row():
    assert bits_from_uniforms(Uniform(), 6, [0.72]).tolist() == [[1, 0, 1, 1, 1, 0]]


def test_stream_definition():
    # independent reading of the documented stream: raw Philox output, top 53 bits
    seed, sub = 12345, 7
    raw = Philox(key=seed + (sub << 64)).random_raw(10)
    expected = (raw >> np.uint64(11)).astype(np.float64) / 2.0 ** 53
    assert np.array_equal(uniforms(seed, 10, substream=sub), expected)
    assert np.all((expected >= 0) & (expected < 1))


@pytest.mark.parametrize("start, count", [(0, 17), (1, 9), (3, 4), (5, 20), (1000, 3)])
def test_uniform_slices_agree_with_full_stream(start, count):
    full = uniforms(99, 1100)
    assert np.array_equal(uniforms(99, count, start=start), full[start:start + count])


@pytest.mark.parametrize("kwargs", [
    dict(count=0), dict(count=-3), dict(count=2.5), dict(count=True),
    dict(seed=-1), dict(seed=2 ** 64), dict(seed=1.0), dict(n=0), dict(n=53),
])
def test_draw_bits_rejects_bad_arguments(kwargs):
    args = dict(model=Uniform(), n=3, count=10, seed=0)
    args.update(kwargs)
    with pytest.raises(DomainError):
        draw_bits(**args)


def test_rows_follow_inverse_transform_of_stream():
    m = Beta(0.7, 2.3)
    run = draw_bits(m, 10, 500, seed=4)
    x = m.inverse_cdf(uniforms(4, 500))
    assert np.array_equal(run.bits, expand_array(x, 10))
    assert run.bits.shape == (500, 10) and run.bits.dtype == np.uint8


def test_uniform_first_bit_mean_band():
    run = draw_bits(Uniform(), 1, N, seed=20240501)
    mean = run.bits[:, 0].mean()
    assert 0.4953 <= mean <= 0.5047


def test_reproducibility():
    a = draw_bits(Beta(2, 2), 5, 1000, seed=11)
    b = draw_bits(Beta(2, 2), 5, 1000, seed=11)
    c = draw_bits(Beta(2, 2), 5, 1000, seed=12)
    assert np.array_equal(a.bits, b.bits)
    assert not np.array_equal(a.bits, c.bits)
    d = draw_bits(Beta(2, 2), 5, 1000, seed=11, substream=1)
    assert not np.array_equal(a.bits, d.bits)


@pytest.mark.parametrize("chunk, workers", [(1, 1), (7, 1), (100, 4), (1000, 3), (5000, 1)])
def test_partitioning_does_not_change_output(chunk, workers):
    m = Trapezoidal(0.2, 0.6)
    ref = draw_bits(m, 6, 1000, seed=3)
    run = draw_bits(m, 6, 1000, seed=3, chunk_size=chunk, workers=workers)
    assert np.array_equal(run.bits, ref.bits)
    assert run.counts.rows == 1000
    assert np.array_equal(run.counts.ones, ref.counts.ones)
    assert np.array_equal(run.counts.both, ref.counts.both)


def test_streaming_chunks_concatenate_to_stored_run():
    ref = draw_bits(Uniform(), 4, 300, seed=8)
    blocks = list(iter_bit_chunks(Uniform(), 4, 300, 8, chunk_size=64))
    assert [b.shape[0] for b in blocks] == [64, 64, 64, 64, 44]
    assert np.array_equal(np.concatenate(blocks), ref.bits)


def test_counts_only_run_gives_same_statistics():
    stored = draw_bits(STEP, 3, 5000, seed=1)
    counted = draw_bits(STEP, 3, 5000, seed=1, store=False)
    assert counted.bits is None
    a, b = empirical_statistics(stored), empirical_statistics(counted)
    assert np.array_equal(a.joint, b.joint)
    assert np.array_equal(a.correlation, b.correlation)


def test_counts_merge_is_order_free():
    bits = draw_bits(Uniform(), 5, 999, seed=2).bits
    parts = [BitCounts(5).update(bits[s:s + 100]) for s in range(0, 999, 100)]
    fwd, rev = BitCounts(5), BitCounts(5)
    for p in parts:
        fwd = fwd.merge(p)
    for p in reversed(parts):
        rev = rev.merge(p)
    whole = BitCounts(5).update(bits)
    for c in (fwd, rev):
        assert c.rows == whole.rows
        assert np.array_equal(c.ones, whole.ones) and np.array_equal(c.both, whole.both)


def test_empirical_statistics_match_direct_formulas():
    run = draw_bits(Beta(0.5, 3.0), 4, 2000, seed=5)
    s = empirical_statistics(run)
    b = run.bits.astype(float)
    p = b.mean(axis=0)
    joint = b.T @ b / len(b)
    assert np.allclose(s.marginals, p, atol=1e-15)
    assert np.allclose(s.joint, joint, atol=1e-15)
    assert np.allclose(s.correlation, np.corrcoef(b, rowvar=False), atol=1e-12)
    assert s.source == "empirical" and s.sample_count == 2000 and s.seed == 5


def test_empirical_zero_variance_column_is_undefined():
    bits = np.zeros((50, 3), dtype=np.uint8)
    bits[::2, 1] = 1
    bits[::3, 2] = 1
    run = SampleRun(Uniform(), 3, 50, 0, bits=bits)
    s = empirical_statistics(run)
    assert s.undefined == (1,)
    assert np.isnan(s.rho(1, 2)) and np.isnan(s.rho(1, 3))
    assert np.isfinite(s.rho(2, 3))


def test_empirical_needs_two_rows():
    with pytest.raises(DomainError):
        BitCounts(2).update(np.ones((1, 2), dtype=np.uint8)).statistics()


def test_uniform_empirical_correlations_small():
    s = empirical_statistics(draw_bits(Uniform(), 3, N, seed=0))
    off = ~np.eye(3, dtype=bool)
    assert np.max(np.abs(s.correlation[off])) <= 0.0095


def test_eq7_first_marginal():
    s = empirical_statistics(draw_bits(STEP, 3, N, seed=0))
    assert abs(s.p(1) - 0.75) <= 0.0041


@pytest.mark.parametrize("model", [Beta(2, 2), Beta(0.5, 0.5), Trapezoidal.symmetric(0.2), Uniform()])
def test_symmetric_models_give_fair_columns(model):
    s = empirical_statistics(draw_bits(model, 8, N, seed=77))
    assert np.all(np.abs(s.marginals - 0.5) <= binomial_band(0.5, N, 4))


@pytest.mark.parametrize("model", [Beta(2, 5), STEP, Trapezoidal(0.1, 0.4)])
def test_monte_carlo_consistency(model):
    exact = statistics(model, 3)
    errors = []
    for count in (1_000, 10_000, 100_000):
        emp = empirical_statistics(draw_bits(model, 3, count, seed=42))
        errors.append(max(np.max(np.abs(emp.marginals - exact.marginals)),
                          np.max(np.abs(emp.correlation - exact.correlation))))
    # the three comparisons 1e3->1e4, 1e4->1e5, 1e3->1e5
    steps = [errors[1] <= errors[0], errors[2] <= errors[1], errors[2] <= errors[0]]
    assert sum(steps) >= 2, errors
    assert np.max(np.abs(emp.marginals - exact.marginals)) <= 0.006
    assert np.max(np.abs(emp.correlation - exact.correlation)) <= 0.015


@pytest.mark.parametrize("binary", [True, False])
def test_write_read_round_trip(binary):
    bits = draw_bits(Uniform(), 7, 40, seed=9).bits
    buf = io.BytesIO() if binary else io.StringIO()
    write_bits(bits, buf)
    buf.seek(0)
    text = buf.getvalue()
    first = text.splitlines()[0]
    assert (first.decode() if binary else first) == "".join(map(str, bits[0]))
    buf.seek(0)
    assert np.array_equal(read_bits(buf), bits)


def test_read_bits_rejects_malformed():
    with pytest.raises(DomainError):
        read_bits(io.StringIO("010\n01\n"))
    with pytest.raises(DomainError):
        read_bits(io.StringIO("012\n"))
