from fractions import Fraction
import math

import numpy as np
import pytest

import getzler


def test_volume_supertrace():
    assert getzler.volume_supertrace(2) == (Fraction(0), Fraction(-2))
    assert getzler.volume_supertrace(4) == (Fraction(-4), Fraction(0))


def test_series_oracle():
    assert "x_over_sinh_x" in getzler.series_oracle_names()
    assert getzler.series_oracle("x_over_sinh_x", 4)[:3] == [1, 0, Fraction(-1, 6)]
    with pytest.raises(ValueError):
        getzler.series_oracle("not_a_series", 2)


def test_mehler_matches_landau():
    b, t = 1.0, 0.5
    R = 1j * b * np.array([[0.0, 1.0], [-1.0, 0.0]])
    k = getzler.mehler_kernel(R, np.zeros((1, 1)), t, [0.0, 0.0])
    assert k.shape == (1, 1)
    assert abs(k[0, 0].real - getzler.landau_trace(b, t)) < 1e-10
    flat = getzler.mehler_kernel(np.zeros((2, 2)), np.zeros((1, 1)), t, [0.0, 0.0])
    assert abs(flat[0, 0] - 1 / (4 * math.pi * t)) < 1e-14


def test_lattice_close_to_landau():
    L = 32
    flux = f"2/{L * L}"
    h = math.sqrt(2 * math.pi * 2 / (L * L) / 0.5)
    value = getzler.lattice_heat_trace(L, h, flux, 0.5)
    assert abs(value - getzler.landau_trace(1.0, 0.5)) / value < 0.05


def test_leading_terms_and_sweep():
    lead = getzler.bergman_leading([1.0], [1.0], 0.5, 8)
    assert lead.shape == (2, 2)
    assert getzler.odd_leading(3, 1.0, 0.5) > 0
    rows = getzler.bergman_sweep(p=[2, 4], L=24)
    assert [r["tag"] for r in rows] == ["imp"] * 4
    errors = [max(r["relative_error"] for r in rows if r["parameter"] == p) for p in (2, 4)]
    assert errors[1] < errors[0]


def test_criterion_and_cli(tmp_path):
    result = getzler.run_criterion(1)
    assert result["passed"]
    code, out, err = getzler.cli(["index-density", "--out", str(tmp_path)])
    assert code == 0, err
    assert (tmp_path / "index_density.csv").read_text().startswith("tag,n,power")
    code, _, _ = getzler.cli(["verify", "42"])
    assert code == 2
