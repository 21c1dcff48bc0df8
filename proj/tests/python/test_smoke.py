"""Smoke tests for the python module (run with PYTHONPATH at the built _core)."""

import math
import os
import sys

import _core as tbt


def test_registry_and_shapes():
    code = tbt.make_code("hamming74")
    assert code.n == 7
    assert code.k == 4
    assert code.num_subtrellises == 4
    assert code.total_states == 36
    assert len(code.generator) == 4

    conv = tbt.make_code("conv35_31_L20")
    assert conv.total_states == 320
    assert conv.num_subtrellises == 16


def test_zero_noise_roundtrip():
    code = tbt.make_code("hamming74")
    for info in ([0, 0, 0, 0], [1, 0, 1, 1], [1, 1, 1, 1]):
        sent = code.encode(info)
        res = tbt.decode(code, tbt.modulate(sent), "exact")
        assert res["codeword"] == sent
        assert res["cost"] < 1e-12
        assert res["winner_source"] == "phase1"
        assert code.info_bits(sent) == info


def test_exact_matches_brute_force():
    code = tbt.make_code("hamming74")
    for frame in range(50):
        sent = code.encode([(frame >> b) & 1 for b in range(4)])
        r = tbt.add_awgn(tbt.modulate(sent), 1.0, 1000 + frame)
        res = tbt.decode(code, r, "exact")
        ml_word, ml_cost = tbt.brute_force_ml(code, r)
        assert abs(res["cost"] - ml_cost) < 1e-9


def test_modes_and_bounds():
    code = tbt.make_code("conv35_31_L20")
    sent = code.encode([0] * 20)
    r = tbt.add_awgn(tbt.modulate(sent), 0.0, 99)
    exact = tbt.decode(code, r, "exact")
    a1 = tbt.decode(code, r, "approx1")
    a2 = tbt.decode(code, r, "approx2")
    assert exact["cost"] <= a2["cost"] + 1e-9 <= a1["cost"] + 2e-9
    assert a1["node_computations"] <= 2 * code.total_states
    assert a2["node_computations"] <= 3 * code.total_states


def test_sweep_determinism():
    kwargs = dict(
        code="hamming74",
        modes=["exact", "approx2"],
        snr_db=[0.0, 2.0],
        frames=200,
        seed=5,
    )
    rows1 = tbt.run_sweep(**kwargs)
    rows2 = tbt.run_sweep(**kwargs)
    assert rows1 == rows2
    assert len(rows1) == 4
    assert all(row["ber"] <= 0.5 for row in rows1)


def test_golay_file_if_present():
    data_dir = os.environ.get("TBT_DATA_DIR", "data")
    path = os.path.join(data_dir, "golay24_tbt.txt")
    if not os.path.exists(path):
        return
    code = tbt.make_code(f"file:{path}")
    assert code.total_states == 192
    assert code.k == 12
    sent = code.encode([1] + [0] * 11)
    res = tbt.decode(code, tbt.modulate(sent), "exact")
    assert res["codeword"] == sent


def test_selftest():
    ok, report = tbt.selftest()
    assert ok, report


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
