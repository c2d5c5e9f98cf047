"""CLI: spec parsing, commands, exit codes, caching, determinism."""

import json
import os

import pytest

from shintani.cli import ConfigError, SessionConfig, main, parse_spec, run_command


def write_spec(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


@pytest.fixture
def z3_spec(tmp_path):
    return write_spec(tmp_path, "z3.json",
                      {"kind": "cyclic", "n": 3, "automorphism": {"images": [2]}})


@pytest.fixture
def ut_spec(tmp_path):
    return write_spec(tmp_path, "ut.json",
                      {"kind": "unitriangular", "n": 3, "field": {"p": 2, "degree": 1},
                       "automorphism": {"frobenius": 1}})


def test_parse_minimal_spec(z3_spec):
    spec, raw, group, frob, mode, warnings = parse_spec(z3_spec)
    assert group.order == 3 and frob.order() == 2 and mode == "finite"
    assert not warnings


def test_parse_missing_automorphism_warns(tmp_path):
    path = write_spec(tmp_path, "g.json", {"kind": "cyclic", "n": 4})
    spec, raw, group, frob, mode, warnings = parse_spec(path)
    assert frob.images == tuple(range(4))
    assert warnings


def test_parse_connected(ut_spec):
    spec, raw, group, frob, mode, warnings = parse_spec(ut_spec)
    assert mode == "connected" and group is None


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ConfigError):
        parse_spec(str(bad))
    with pytest.raises(ConfigError):
        parse_spec(str(tmp_path / "missing.json"))
    p = write_spec(tmp_path, "auto.json",
                   {"kind": "cyclic", "n": 3, "automorphism": {"images": [0]}})
    with pytest.raises(ConfigError):
        parse_spec(p)
    p2 = write_spec(tmp_path, "mode.json", {"kind": "cyclic", "n": 3, "mode": "connected"})
    with pytest.raises(ConfigError):
        parse_spec(p2)


def test_classes_command(z3_spec):
    code, text = run_command("classes", SessionConfig(spec_path=z3_spec))
    assert code == 0
    doc = json.loads(text)
    assert doc["classes"] == [{"orbit": 0, "representative_index": 0, "representative": "0",
                               "size": 3, "stabilizer_order": 1}]
    assert "spec_sha256" in doc["meta"]


def test_s3_classes_table(tmp_path):
    path = write_spec(tmp_path, "s3.json",
                      {"kind": "permutation", "generators": [[1, 0, 2], [1, 2, 0]]})
    code, text = run_command("classes", SessionConfig(spec_path=path, fmt="csv"))
    assert code == 0
    rows = [l for l in text.splitlines() if l and not l.startswith("#")]
    assert len(rows) == 1 + 3  # header + three classes


def test_shintani_and_irreps(z3_spec):
    code, text = run_command("shintani", SessionConfig(spec_path=z3_spec, m=2, fmt="csv"))
    assert code == 0 and text.rstrip().endswith("-1")
    code, text = run_command("irreps", SessionConfig(spec_path=z3_spec, m=1))
    assert code == 0
    doc = json.loads(text)
    assert len(doc["forms"]) == 1  # single inner form, trivial fixed group
    assert doc["forms"][0]["table"]["rows"] == [{"degree": "1", "values": ["1"]}]


def test_scan_command(z3_spec):
    code, text = run_command("scan", SessionConfig(spec_path=z3_spec, m_max=8))
    assert code == 0
    doc = json.loads(text)
    assert doc["m0"] == 2
    assert doc["almost_characters"][0]["theta_eigenvalue"] == {"k": 0, "n": 1}


def test_scan_mmax_too_small(z3_spec):
    code, text = run_command("scan", SessionConfig(spec_path=z3_spec, m_max=2))
    assert code == 2
    assert "m_max too small" in json.loads(text)["error"]


def test_csheaf_command(z3_spec):
    code, text = run_command("csheaf", SessionConfig(spec_path=z3_spec))
    assert code == 0
    doc = json.loads(text)
    assert len(doc["double_simples"]) == 9
    assert doc["integrality"]["pass"]


def test_csheaf_rejected_in_connected_mode(ut_spec):
    code, text = run_command("csheaf", SessionConfig(spec_path=ut_spec))
    assert code == 2


def test_cap_exceeded_exit_code(tmp_path):
    path = write_spec(tmp_path, "big.json", {"kind": "cyclic", "n": 500})
    code, text = run_command("classes", SessionConfig(spec_path=path, group_cap=100))
    assert code == 3
    import shintani.groups
    shintani.groups.GROUP_ORDER_CAP = 200000


def test_verify_command(z3_spec):
    code, text = run_command("verify", SessionConfig(spec_path=z3_spec, m_max=8, fmt="csv"))
    assert code == 0
    assert "result: pass" in text


def test_determinism_and_cache(z3_spec, tmp_path):
    cfg = SessionConfig(spec_path=z3_spec, m_max=8)
    code1, text1 = run_command("scan", cfg)
    code2, text2 = run_command("scan", cfg)
    assert (code1, text1) == (code2, text2)  # byte-identical rerun
    cache = tmp_path / "cache"
    cfg_cached = SessionConfig(spec_path=z3_spec, m_max=8, cache_dir=str(cache))
    code3, text3 = run_command("scan", cfg_cached)
    assert text3 == text1
    stored = list(cache.rglob("*"))
    assert any(p.is_file() for p in stored)
    code4, text4 = run_command("scan", cfg_cached)
    assert (code4, text4) == (code3, text3)  # cache hit replays bit-exactly


def test_tie_break_output_differs_by_root(z3_spec):
    from shintani.cyclotomic import Cyclotomic, vector_ratio_root
    a = run_command("shintani", SessionConfig(spec_path=z3_spec, m=2, tie_break=0))
    b = run_command("shintani", SessionConfig(spec_path=z3_spec, m=2, tie_break=1))
    va = [Cyclotomic.parse(r["orbit0"]) for r in json.loads(a[1])["shintani_basis"]]
    vb = [Cyclotomic.parse(r["orbit0"]) for r in json.loads(b[1])["shintani_basis"]]
    ratio = vector_ratio_root(va, vb)
    assert ratio is not None and ratio.as_root_of_unity()[1] in (1, 2)


def test_main_entrypoint(z3_spec, capsys, tmp_path):
    code = main(["classes", "--spec", z3_spec])
    assert code == 0
    out = capsys.readouterr().out
    assert json.loads(out)["classes"]
    code = main(["classes", "--spec", z3_spec, "--cache", str(tmp_path / "c")])
    assert code == 0


def test_lock_file(z3_spec, tmp_path):
    cache = tmp_path / "locked"
    os.makedirs(cache)
    (cache / "lock").write_text("")
    code = main(["classes", "--spec", z3_spec, "--cache", str(cache)])
    assert code == 2


def test_connected_verify(ut_spec):
    code, text = run_command("verify", SessionConfig(spec_path=ut_spec, m_max=6, fmt="csv"))
    assert code == 0
    assert "result: pass" in text


def test_connected_commands(ut_spec):
    for cmd, kwargs in [("classes", {}), ("irreps", {"m": 2}), ("shintani", {"m": 2}),
                        ("theta", {}), ("scan", {"m_max": 8})]:
        code, text = run_command(cmd, SessionConfig(spec_path=ut_spec, **kwargs))
        assert code == 0, (cmd, text)
    code, text = run_command("classes", SessionConfig(spec_path=ut_spec))
    assert json.loads(text)["meta"]["field"]["modulus"]  # session header carries the modulus


def test_cross_process_determinism(z3_spec):
    import subprocess
    import sys
    cmd = [sys.executable, "-m", "shintani.cli", "scan", "--spec", z3_spec, "--mmax", "8"]
    a = subprocess.run(cmd, capture_output=True, env={**os.environ, "PYTHONHASHSEED": "1"})
    b = subprocess.run(cmd, capture_output=True, env={**os.environ, "PYTHONHASHSEED": "77"})
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_sigma_flag(z3_spec):
    code, _ = run_command("csheaf", SessionConfig(spec_path=z3_spec, sigma="auto"))
    assert code == 0
    code, _ = run_command("csheaf", SessionConfig(spec_path=z3_spec, sigma="other"))
    assert code == 2
