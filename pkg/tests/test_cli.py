import io
import json
from pathlib import Path

import numpy as np
import pytest

from shadowlab import cli
from shadowlab.errors import ContractViolation, DimensionError, ParseError
from shadowlab.normalize import normalization_constants
from shadowlab.registry import (
    BUILTINS,
    builtin_names,
    dumps_matrix,
    get_builtin,
    loads_matrix,
    matrix_hash,
    parse_hamiltonian,
    parse_matrix,
)

DATA = Path(__file__).parent / "data"


def run(argv):
    out = io.StringIO()
    code = cli.run(argv, out)
    return code, out.getvalue()


# -- registry and file format -----------------------------------------------

def test_builtin_examples():
    np.testing.assert_allclose(parse_matrix("A2_0"), np.sqrt(2 / 5) * np.array([[1, 1], [0, -1]]), atol=1e-16)
    h = parse_hamiltonian("H21")
    np.testing.assert_array_equal(h, h.conj().T)
    assert h.shape == (3, 3)
    assert {"A2_0", "A3_0", "A4_8", "H21", "D_A1", "D_A2", "D_A3", "A4_8_raw"} <= set(builtin_names())


def test_registry_rescaled_forms_have_unit_alpha():
    for name, a in BUILTINS.items():
        if name.startswith("A") and not name.endswith("_raw"):
            assert abs(normalization_constants(a).alpha - 1) < 1e-12, name


def test_registry_round_trip_bit_exact():
    for name, a in BUILTINS.items():
        b = loads_matrix(dumps_matrix(a))
        assert b.tobytes() == a.tobytes(), name


def test_parse_file(tmp_path):
    a = np.array([[1 + 2j, 0.1], [-3, 1e-300j]])
    f = tmp_path / "m.json"
    f.write_text(dumps_matrix(a))
    assert parse_matrix(str(f)).tobytes() == a.tobytes()


@pytest.mark.parametrize("text,fragment", [
    ('{"n": 2, "rows": [[[1, 0], [0, 0], [1, 1]], [[0, 0], [1, 0]]]}', "row 0 has 3 entries"),
    ('{"n": 2, "rows": [[[1, 0], [0, 0]]]}', "expected 2 rows"),
    ('{"n": 2, "rows": [[[1, 0], [0, 0]], [[0, 0], [NaN, 0]]]}', "not finite"),
    ('{"n": 1, "rows": [[[1e999, 0]]]}', "not finite"),
    ('{"n": 1, "rows": [[[1, "x"]]]}', "must be [re, im]"),
    ('{"n": 1, "rows": [[[true, 0]]]}', "must be [re, im]"),
    ('{"n": 0, "rows": []}', "positive integer"),
    ('[1, 2]', "expected an object"),
    ('{"n": 2,\n "rows": [\n oops', "line 3 column 2"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=None) as info:
        loads_matrix(text, "m.json")
    assert fragment in str(info.value)


def test_ragged_rows_are_dimension_errors():
    text = '{"n": 2,\n "rows": [\n  [[1, 0], [0, 0]],\n  [[0, 0]]\n ]}'
    with pytest.raises(DimensionError) as info:
        loads_matrix(text)
    assert "(line 4)" in str(info.value)


def test_unknown_builtin_and_hamiltonian_check(tmp_path):
    with pytest.raises(ParseError):
        get_builtin("A9_9")
    with pytest.raises(ParseError):
        parse_matrix("no_such_file.json")
    f = tmp_path / "h.json"
    f.write_text(dumps_matrix([[0, 1], [0, 0]]))
    with pytest.raises(ParseError):
        parse_hamiltonian(str(f))


def test_matrix_hash_is_content_hash():
    assert matrix_hash(get_builtin("A2_0")) == matrix_hash(get_builtin("A2_0").copy())
    assert matrix_hash(get_builtin("A2_0")) != matrix_hash(get_builtin("A2_0_raw"))


# -- subcommands ------------------------------------------------------------

def test_shadow_outputs_and_manifest(tmp_path):
    prefix = tmp_path / "a30"
    code, _ = run(["shadow", "--builtin", "A3_0", "--samples", "20000", "--bins", "16x8", "--seed", "7",
                   "--threads", "2", "--out", str(prefix)])
    assert code == 0
    lines = (tmp_path / "a30.csv").read_text().splitlines()
    assert lines[0] == "re_center,im_center,density" and len(lines) == 1 + 16 * 8
    pgm = (tmp_path / "a30.pgm").read_bytes()
    assert pgm.startswith(b"P5\n16 8\n65535\n")
    pix = np.frombuffer(pgm[len(b"P5\n16 8\n65535\n"):], dtype=">u2")
    assert pix.size == 128 and pix.max() == 65535
    meta = json.loads((tmp_path / "a30.json").read_text())
    man = meta["manifest"]
    assert man["subcommand"] == "shadow" and man["seed"] == 7 and man["threads"] == 2
    assert man["matrix_sha256"] == matrix_hash(get_builtin("A3_0"))
    assert meta["samples"] == 20000 and meta["histogram"]["bins"] == [16, 8]
    density = np.array([float(r.split(",")[2]) for r in lines[1:]])
    box = meta["histogram"]["box"]
    area = (box[1] - box[0]) * (box[3] - box[2]) / 128
    assert density.sum() * area == pytest.approx(1.0)


def test_shadow_matches_golden_csv(tmp_path):
    code, _ = run(["shadow", "--builtin", "A3_0", "--samples", "20000", "--bins", "16x16", "--seed", "7",
                   "--threads", "2", "--out", str(tmp_path / "g"), "--format", "csv"])
    assert code == 0
    assert (tmp_path / "g.csv").read_bytes() == (DATA / "a30_small.csv").read_bytes()
    assert not (tmp_path / "g.pgm").exists()


def test_shadow_byte_identical_reruns(tmp_path):
    args = ["shadow", "--builtin", "A4_3", "--samples", "30000", "--seed", "3", "--threads", "3", "--bins", "32x32"]
    run(args + ["--out", str(tmp_path / "x")])
    run(args + ["--out", str(tmp_path / "y")])
    for ext in ("csv", "pgm"):
        assert (tmp_path / f"x.{ext}").read_bytes() == (tmp_path / f"y.{ext}").read_bytes()


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("SHADOWLAB_THREADS", "3")
    code, out = run(["shadow", "--builtin", "A2_0", "--samples", "1000", "--bins", "8"])
    assert code == 0 and json.loads(out)["manifest"]["threads"] == 3
    monkeypatch.setenv("SHADOWLAB_THREADS", "many")
    assert run(["shadow", "--builtin", "A2_0", "--samples", "1000"])[0] == 1


def test_shadow_section_and_log(tmp_path):
    code, _ = run(["shadow", "--builtin", "A2_0", "--samples", "50000", "--seed", "1", "--threads", "1",
                   "--section", "0,0,1,0,0.01", "--log", "--out", str(tmp_path / "s")])
    assert code == 0
    rows = (tmp_path / "s_section.csv").read_text().splitlines()
    assert rows[0] == "s_center,density" and len(rows) == 65
    meta = json.loads((tmp_path / "s.json").read_text())
    assert 0 < meta["section"]["mass"] < 0.1


def test_segment_shadow_pgm_is_one_row(tmp_path):
    code, _ = run(["shadow", "--matrix", str(_write_matrix(tmp_path, np.diag([0.0, 1.0]))), "--samples", "5000",
                   "--bins", "50", "--out", str(tmp_path / "seg"), "--threads", "1"])
    assert code == 0
    assert (tmp_path / "seg.pgm").read_bytes().startswith(b"P5\n50 1\n")
    assert json.loads((tmp_path / "seg.json").read_text())["histogram"]["kind"] == "segment"


def _write_matrix(tmp_path, a):
    f = tmp_path / "m.json"
    f.write_text(dumps_matrix(a))
    return f


def test_mixed_shadow(tmp_path):
    code, out = run(["mixed-shadow", "--builtin", "A3_1", "-K", "2", "--samples", "5000", "--threads", "1",
                     "--check-support"])
    assert code == 0 and json.loads(out)["samples"] == 5000
    assert run(["mixed-shadow", "--builtin", "A3_1", "--samples", "10"])[0] == 1


def test_range_subcommand(tmp_path):
    code, out = run(["range", "--builtin", "A3_2", "--resolution", "64"])
    lines = out.splitlines()
    assert code == 0 and lines[0] == "theta,h,re,im" and len(lines) == 65
    code, _ = run(["range", "--builtin", "A3_2", "--out", str(tmp_path / "r")])
    summary = json.loads((tmp_path / "r.json").read_text())
    assert summary["flat_parts"] == 2 and summary["barycenter"] == [0.0, 0.0]
    assert summary["radius_bound"] <= np.sqrt(2 / 3) + 1e-9
    assert run(["range", "--builtin", "A3_2", "--resolution", "4"])[0] == 2


def test_normalize_subcommand(tmp_path):
    code, out = run(["normalize", "--builtin", "A4_8", "--out", str(tmp_path / "n")])
    assert code == 0
    assert abs(json.loads(out)["alpha"] - 1) < 1e-12
    v1 = loads_matrix((tmp_path / "n_v1.json").read_text())
    assert abs(np.trace(v1 @ v1).real - 1) < 1e-12
    assert run(["normalize", "--matrix", str(_write_matrix(tmp_path, np.eye(2)))])[0] == 2


def test_dynamics_subcommand(tmp_path):
    code, out = run(["dynamics", "--builtin", "D_A2", "--hamiltonian", "H21", "--state", "1,0,0",
                     "--tmax", "10", "--steps", "201"])
    assert code == 0
    rows = np.loadtxt(io.StringIO(out), delimiter=",", skiprows=1)
    golden = np.loadtxt(DATA / "trajectory_D_A2.csv", delimiter=",", skiprows=1)
    np.testing.assert_allclose(rows, golden, atol=1e-12)
    code, out2 = run(["dynamics", "--builtin", "D_A2", "--hamiltonian", "H21", "--state", "1,0,0",
                      "--steps", "201", "--mixed"])
    np.testing.assert_allclose(np.loadtxt(io.StringIO(out2), delimiter=",", skiprows=1), rows, atol=1e-12)
    code, _ = run(["dynamics", "--builtin", "D_A2", "--hamiltonian", "H21", "--state", "0.6,0.8j,0",
                   "--out", str(tmp_path / "d")])
    meta = json.loads((tmp_path / "d.json").read_text())
    assert meta["period"] == pytest.approx(2 * np.pi / np.sqrt(6))
    assert meta["manifest"]["flags"]["state"] == [[0.6, 0.0], [0.0, 0.8], [0.0, 0.0]]
    assert run(["dynamics", "--builtin", "D_A2", "--hamiltonian", "H21", "--state", "1,0"])[0] == 2
    assert run(["dynamics", "--builtin", "D_A2", "--hamiltonian", "D_A2"])[0] == 2
    assert run(["dynamics", "--builtin", "D_A2", "--hamiltonian", "H21", "--state", "1,zero,0"])[0] == 1


def test_spaces_subcommand(tmp_path):
    code, out = run(["spaces", "--builtin", "A3_0"])
    assert code == 0 and json.loads(out) == {"dim_xa": 6, "dim_ha": 1, "d_a": 2}
    code, out = run(["spaces", "--builtin", "A3_0", "--bases"])
    assert len(json.loads(out)["xa_basis"]) == 6


def test_rand_law_subcommand():
    code, out = run(["rand-law", "--which", "unitary", "--n", "4", "--samples", "1000000", "--seed", "1"])
    res = json.loads(out)
    assert code == 0 and res["pass"] and res["law"] == "Beta(1, 3)"
    code, out = run(["rand-law", "--which", "density", "--n", "3", "--k", "2", "--samples", "100000"])
    assert code == 0 and json.loads(out)["law"] == "Beta(2, 4)"


def test_selftest_subcommand():
    code, out = run(["selftest"])
    assert code == 0 and out.strip().endswith("selftest passed")
    assert "FAIL" not in out


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["shadow", "--builtin", "A2_0", "--bins", "12xq"],
    ["shadow", "--builtin", "A2_0", "--samples", "0"],
    ["shadow", "--builtin", "A2_0", "--format", "png"],
    ["shadow", "--builtin", "A2_0", "--section", "0,0,0,0,1"],
    ["shadow", "--builtin", "A2_0", "--matrix", "x.json"],
])
def test_usage_errors(argv):
    assert run(argv)[0] == 1


def test_data_errors(tmp_path):
    assert run(["shadow", "--builtin", "NOPE"])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "rows": [[[1, 0]], [[0, 0], [1, 0]]]}')
    assert run(["range", "--matrix", str(bad)])[0] == 2


def test_contract_violation_exit_code(monkeypatch):
    def broken(*args, **kwargs):
        raise ContractViolation("sample outside W(A)")

    monkeypatch.setattr(cli, "pure_shadow", broken)
    assert run(["shadow", "--builtin", "A2_0", "--samples", "10"])[0] == 3
    monkeypatch.setattr(cli, "check_law", lambda *a, **k: {"pass": False})
    assert run(["rand-law", "--which", "unitary", "--n", "2"])[0] == 3


def test_main_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "shadowlab", "spaces", "--builtin", "A2_0"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0 and json.loads(proc.stdout)["dim_xa"] == 1
    proc = subprocess.run([sys.executable, "-m", "shadowlab", "shadow"], capture_output=True, text=True, timeout=60)
    assert proc.returncode == 1
