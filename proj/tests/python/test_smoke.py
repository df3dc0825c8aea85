import numpy as np
import pytest

import dtsim

LEAK = "a = SECRET @P1\nb = SECRET @P2\nSEND a TO P2\nOUTPUT b @P2\n"


def test_normalize_round_trips():
    text = dtsim.compile_builtin("lt:2")
    assert dtsim.normalize(text) == text
    assert dtsim.parties(text) == ["P1", "P2"]


def test_beaver_adds_dealer():
    assert dtsim.parties(dtsim.compile_builtin("adder:1", "beaver")) == ["P1", "P2", "D"]


def test_views_shapes_and_bits():
    v = dtsim.views(dtsim.compile_builtin("lt:2"), 200, ["P2"], seed=3)
    assert v["L"].shape == (200, 2)
    assert v["I"].shape[0] == v["R"].shape[0] == 200
    assert set(np.unique(v["R"])) <= {0, 1}


def test_leak_is_insecure():
    r = dtsim.test_program(LEAK, ["P2"], iters=16, train=64, test=32)
    assert r["verdict"] == "INSECURE"
    assert r["pValue"] < 0.05
    assert len(r["pairs"]) == 16


def test_views_round_trip_through_table_test():
    v = dtsim.views(LEAK, 16 * 96, ["P2"], seed=1)
    r = dtsim.test_views(v["L"], v["I"], v["R"], iters=16, train=64, test=32)
    assert r["verdict"] == "INSECURE"


def test_errors_are_raised():
    with pytest.raises(dtsim.DtsimError, match="CrossPartyExpression"):
        dtsim.normalize("a = SECRET @P1\nb = SECRET @P2\nc = a + b\n")
    with pytest.raises(dtsim.DtsimError):
        dtsim.compile_builtin("lt:0")


def test_generate_is_deterministic():
    a = dtsim.generate(body_len=50, seed=4)
    assert a == dtsim.generate(body_len=50, seed=4)
    assert dtsim.normalize(a) == a


def test_wilcoxon():
    assert dtsim.wilcoxon_less([(1, 3), (2, 9), (0, 4), (5, 10), (7, 8)]) == pytest.approx(1 / 32)
