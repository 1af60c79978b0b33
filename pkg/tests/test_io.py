import dataclasses
import json

import numpy as np
import pytest

from dmdc import (
    FormatError,
    LengthError,
    ParseError,
    SchemaError,
    dmd_fit,
    dmdc_fit_known_b,
    dmdc_fit_unknown_b,
    gen_sparse_fourier,
)
from dmdc import io as dio
from helpers import EX1_B, EX1_UPS, EX1_X, EX1_XP, consistent_forced_data, random_diagonalizable


def test_csv_trivial_parse(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("1,2\n3,4\n")
    np.testing.assert_array_equal(
        dio.read_matrix_csv(p), [[1.0, 2.0], [3.0, 4.0]]
    )


def test_csv_example1_exact(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("4,2,1,0.5\n7,0.7,0.07,0.007\n")
    np.testing.assert_array_equal(dio.read_matrix_csv(p), EX1_X)
    out = tmp_path / "x_out.csv"
    dio.write_matrix_csv(EX1_X, out)
    np.testing.assert_array_equal(dio.read_matrix_csv(out), EX1_X)


def test_csv_round_trip_random_bitwise(tmp_path):
    rng = np.random.default_rng(101)
    m = rng.standard_normal((10, 10))
    p = tmp_path / "r.csv"
    dio.write_matrix_csv(m, p)
    np.testing.assert_array_equal(dio.read_matrix_csv(p), m)


def test_csv_transpose_flag(tmp_path):
    p = tmp_path / "t.csv"
    dio.write_matrix_csv(np.array([[1.0, 2.0, 3.0]]), p)
    assert dio.read_matrix_csv(p, transpose=True).shape == (3, 1)


def test_csv_ragged_row_reports_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2\n3,4,5\n")
    with pytest.raises(FormatError, match="line 2"):
        dio.read_matrix_csv(p)


def test_csv_bad_cell_reports_coordinates(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2\n3,oops\n")
    with pytest.raises(ParseError, match="line 2, column 2"):
        dio.read_matrix_csv(p)
    p.write_text("1,nan\n3,4\n")
    with pytest.raises(ParseError, match="line 1, column 2"):
        dio.read_matrix_csv(p)


def test_csv_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(FormatError, match="empty"):
        dio.read_matrix_csv(p)


def test_bin_scalar_file_size(tmp_path):
    p = tmp_path / "s.bin"
    dio.write_matrix_bin(np.array([[42.0]]), p)
    assert p.stat().st_size == 32  # 8 magic + 8 rows + 8 cols + 8 payload
    np.testing.assert_array_equal(dio.read_matrix_bin(p), [[42.0]])


def test_bin_round_trip_snapshot_bitwise(tmp_path):
    ds = gen_sparse_fourier(grid=16, n_modes=3, m=8, seed=13)
    p = tmp_path / "snap.bin"
    dio.write_matrix_bin(ds.x, p)
    np.testing.assert_array_equal(dio.read_matrix_bin(p), ds.x)


def test_bin_corrupted_magic(tmp_path):
    p = tmp_path / "bad.bin"
    dio.write_matrix_bin(np.eye(2), p)
    raw = bytearray(p.read_bytes())
    raw[0] ^= 0xFF
    p.write_bytes(bytes(raw))
    with pytest.raises(FormatError, match="magic"):
        dio.read_matrix_bin(p)


def test_bin_truncated_payload(tmp_path):
    p = tmp_path / "short.bin"
    dio.write_matrix_bin(np.eye(3), p)
    raw = p.read_bytes()
    p.write_bytes(raw[:-8])
    with pytest.raises(LengthError):
        dio.read_matrix_bin(p)
    p.write_bytes(raw[:12])
    with pytest.raises(LengthError):
        dio.read_matrix_bin(p)


def _records():
    rng = np.random.default_rng(103)
    a, _ = random_diagonalizable(rng, 3)
    b = rng.standard_normal((3, 2))
    x, xp, ups = consistent_forced_data(rng, a, b, 12)
    prov = {"inputs": {"x": "sha256:00"}, "truncation": {"r": None}, "seed": 7}
    yield dio.ModelRecord.from_model(dmd_fit(x, xp), prov)
    yield dio.ModelRecord.from_model(dmdc_fit_known_b(x, xp, ups, b), prov)
    yield dio.ModelRecord.from_model(dmdc_fit_unknown_b(x, xp, ups)[0], prov)


def test_model_round_trip_bitwise(tmp_path):
    for i, rec in enumerate(_records()):
        p = tmp_path / f"model{i}.json"
        dio.write_model(rec, p)
        back = dio.read_model(p)
        assert back.kind == rec.kind
        assert (back.rank_p, back.rank_r) == (rec.rank_p, rec.rank_r)
        assert back.dt == rec.dt
        np.testing.assert_array_equal(back.a_tilde, rec.a_tilde)
        if rec.b_tilde is None:
            assert back.b_tilde is None
        else:
            np.testing.assert_array_equal(back.b_tilde, rec.b_tilde)
        np.testing.assert_array_equal(back.basis, rec.basis)
        np.testing.assert_array_equal(back.eigenvalues, rec.eigenvalues)
        np.testing.assert_array_equal(back.modes, rec.modes)
        assert back.provenance == rec.provenance


def test_model_kinds_tagged():
    kinds = [rec.kind for rec in _records()]
    assert kinds == ["dmd", "dmdc-known-b", "dmdc-unknown-b"]


def test_example1_model_file_contains_recovered_eigenvalues(tmp_path):
    model = dmdc_fit_known_b(EX1_X, EX1_XP, EX1_UPS, EX1_B)
    p = tmp_path / "ex1.json"
    dio.write_model(dio.ModelRecord.from_model(model, {}), p)
    back = dio.read_model(p)
    np.testing.assert_allclose(
        np.sort(back.eigenvalues.real), [0.1, 1.5], atol=1e-10
    )
    np.testing.assert_allclose(back.eigenvalues.imag, 0.0, atol=1e-10)


def test_model_unknown_kind_rejected(tmp_path):
    rec = next(iter(_records()))
    bogus = dataclasses.replace(rec, kind="spooky")
    p = tmp_path / "bogus.json"
    with pytest.raises(SchemaError):
        dio.write_model(bogus, p)
    dio.write_model(rec, p)
    doc = json.loads(p.read_text())
    doc["kind"] = "spooky"
    p.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="kind"):
        dio.read_model(p)


def test_model_empty_file_is_schema_error(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    with pytest.raises(SchemaError):
        dio.read_model(p)


def test_model_decimal_hex_disagreement_rejected(tmp_path):
    rec = next(iter(_records()))
    p = tmp_path / "m.json"
    dio.write_model(rec, p)
    doc = json.loads(p.read_text())
    doc["dt"][0] = doc["dt"][0] + 1.0  # decimal edited, hex left stale
    p.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="disagrees"):
        dio.read_model(p)


def test_model_missing_field_rejected(tmp_path):
    rec = next(iter(_records()))
    p = tmp_path / "m.json"
    dio.write_model(rec, p)
    doc = json.loads(p.read_text())
    del doc["basis"]
    p.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="basis"):
        dio.read_model(p)


def test_truth_round_trip(tmp_path):
    ds = gen_sparse_fourier(grid=16, n_modes=2, m=6, seed=17)
    p = tmp_path / "truth.json"
    dio.write_truth(ds.truth, p, dt=ds.dt)
    back, dt = dio.read_truth(p)
    assert dt == ds.dt
    assert back.seed == ds.truth.seed
    np.testing.assert_array_equal(back.a_true, ds.truth.a_true)
    np.testing.assert_array_equal(back.b_true, ds.truth.b_true)
    assert back.c_true is None
    np.testing.assert_array_equal(back.eigs_true, ds.truth.eigs_true)
    np.testing.assert_array_equal(back.modes_true, ds.truth.modes_true)


def test_atomic_write_leaves_no_partial_file(tmp_path):
    p = tmp_path / "x.csv"
    dio.write_matrix_csv(np.eye(2), p)
    before = p.read_bytes()
    with pytest.raises(Exception):
        dio.write_matrix_csv(np.array([[np.nan, 1.0]]), p)
    assert p.read_bytes() == before
    assert list(tmp_path.iterdir()) == [p]  # no stray temp files
