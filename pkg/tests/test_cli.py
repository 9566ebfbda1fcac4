from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from masvscan import cli
from masvscan.cli import atomic_write, main
from masvscan.testing import corpus as C
from masvscan.testing.archives import build_apk


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def config_args(fx, path):
    return ["--config", path.with_name(f"{fx.name}.ini")] if fx.config else []


def test_exit_code_for_every_fixture(corpus, capsys):
    for name, (fx, path) in corpus.items():
        code, out, _ = run(capsys, "scan", path, *config_args(fx, path))
        assert code == fx.exit_code, name
        doc = json.loads(out)
        (report,) = doc["reports"]
        assert report["set"] == fx.set_label
        if fx.set_label != "A":
            got = {f["check"]: f["verdict"] for f in report["findings"]}
            for check, glyph in fx.expected.items():
                state = got[check.value]
                rendered = {"Violation": "V", "Pass": "N", "NotApplicable": "N/A", "Unverifiable": "-"}[state["state"]]
                if "qualifier" in state:
                    rendered += f"({state['qualifier']})"
                assert rendered == glyph, (name, check)


def test_worst_has_14_v_cells(corpus, capsys):
    fx, path = corpus["worst"]
    code, out, _ = run(capsys, "scan", path, "--format", "csv", *config_args(fx, path))
    assert code == 1
    cells = [c for line in out.splitlines() if line.startswith("worst,") for c in line.split(",")[1:]]
    assert len(cells) == 28 and sum(c.startswith("V") for c in cells) == 14


@pytest.mark.parametrize("argv", [
    ["scan", "/nonexistent"],
    ["scan"],
    ["permissions"],
    [],
    ["bogus"],
    ["scan", "--jobs", "0", "x.apk"],
    ["scan", "--checks", "nope", "x.apk"],
    ["scan", "--timeout", "-1", "x.apk"],
    ["replay"],
    ["replay", "/nonexistent.csv"],
])
def test_usage_errors_exit_3(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 3
    assert "error" in err


def test_bad_config_is_usage_error(corpus, tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[bogus]\n")
    assert run(capsys, "scan", corpus["clean"][1], "--config", bad)[0] == 3


def test_config_from_environment(corpus, tmp_path, monkeypatch, capsys):
    fx, path = corpus["worst"]
    monkeypatch.setenv("MASVSCAN_CONFIG", str(path.with_name("worst.ini")))
    _, out, _ = run(capsys, "scan", path, "--format", "csv")
    assert "V(ML)" in out
    monkeypatch.delenv("MASVSCAN_CONFIG")
    _, out, _ = run(capsys, "scan", path, "--format", "csv")
    assert "V(ML)" not in out


def test_checks_subset_renders_dash(corpus, capsys):
    _, out, _ = run(capsys, "scan", corpus["worst"][1], "--checks", "tls", "--format", "csv")
    rows = [line.split(",") for line in out.splitlines() if line.startswith("worst,")]
    headers = [line.split(",") for line in out.splitlines() if line.startswith("app,")]
    for header, row in zip(headers, rows):
        for col, cell in zip(header[1:], row[1:]):
            if col.startswith("TLS"):
                assert cell in ("V", "N", "N/A")
            else:
                assert cell == "-"


def test_out_directory(corpus, tmp_path, capsys):
    out = tmp_path / "out"
    paths = [corpus["clean"][1], corpus["corrupt_container"][1]]
    code, stdout, _ = run(capsys, "scan", *paths, "--out", out, "--format", "ascii")
    assert code == 2 and stdout == ""
    assert sorted(p.name for p in (out / "reports").iterdir()) == ["clean.json", "corrupt_container.json"]
    assert json.loads((out / "reports" / "clean.json").read_text())["schema_version"] == 1
    assert "clean" in (out / "matrix.txt").read_text()
    assert not [p for p in out.rglob("*.tmp")]


def test_svg_output(corpus, capsys):
    code, out, _ = run(capsys, "scan", corpus["clean"][1], "--format", "svg")
    assert code == 0 and out.startswith("<svg")


def test_directory_input_and_duplicate_stems(tmp_path, corpus, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    data = corpus["clean"][1].read_bytes()
    (a / "app.apk").write_bytes(data)
    (b / "app.apk").write_bytes(data)
    _, out, _ = run(capsys, "scan", tmp_path)
    assert [r["app_id"] for r in json.loads(out)["reports"]] == ["app", "app-2"]


def test_atomic_write_leaves_no_partial_file(tmp_path, monkeypatch):
    target = tmp_path / "r.json"
    atomic_write(target, "old")

    def boom(*_):
        raise OSError("disk full")

    monkeypatch.setattr(cli.os, "replace", boom)
    with pytest.raises(OSError):
        atomic_write(target, "new")
    assert target.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]


# -- permissions -------------------------------------------------------------------------


def _perm_apk(tmp_path, name, perms):
    path = tmp_path / f"{name}.apk"
    path.write_bytes(build_apk(C.manifest(f"com.example.{name}", perms)))
    return path


def test_permissions_single_internet(tmp_path, capsys):
    code, out, _ = run(capsys, "permissions", _perm_apk(tmp_path, "one", ("INTERNET",)), "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["permission,one", "INTERNET,x"]


def test_permissions_shared_camera(tmp_path, capsys):
    paths = [_perm_apk(tmp_path, "p1", ("CAMERA", "INTERNET")), _perm_apk(tmp_path, "p2", ("CAMERA",))]
    code, out, _ = run(capsys, "permissions", *paths)
    doc = json.loads(out)
    assert code == 0
    assert doc["permissions"][0] == {"name": "CAMERA", "apps": ["p1", "p2"]}


def test_permissions_with_set_a_exits_2(corpus, capsys):
    assert run(capsys, "permissions", corpus["clean"][1], corpus["corrupt_container"][1])[0] == 2


# -- replay ------------------------------------------------------------------------------


def test_replay_bundled_verdicts(capsys):
    code, out, _ = run(capsys, "replay", "--bundled", "verdicts")
    doc = json.loads(out)
    assert code == 0
    assert doc["per_app_violation_count"]["18"] == 14
    assert doc["per_category_app_count"]["CRYPTO"] == 5


def test_replay_bundled_permissions(capsys):
    code, out, _ = run(capsys, "replay", "--bundled", "permissions", "--format", "csv")
    assert code == 0 and out.splitlines()[0].startswith("permission,1,2,")


def test_replay_scan_output_round_trip(corpus, tmp_path, capsys):
    out = tmp_path / "o"
    run(capsys, "scan", corpus["worst"][1], corpus["clean"][1], "--out", out, "--format", "csv",
        *config_args(*corpus["worst"]))
    code, stdout, _ = run(capsys, "replay", out / "matrix.csv")
    assert code == 0
    assert json.loads(stdout)["per_app_violation_count"] == {"worst": 14, "clean": 0}


def test_replay_schema_mismatch_exits_2(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert run(capsys, "replay", empty)[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("app,DS1\n1,X\n")
    code, _, err = run(capsys, "replay", bad)
    assert code == 2 and "SchemaMismatch" in err


def test_module_entry_point(corpus):
    proc = subprocess.run([sys.executable, "-m", "masvscan", "scan", str(corpus["clean"][1])],
                          capture_output=True, text=True, env={**os.environ, "MASVSCAN_CONFIG": ""})
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["reports"][0]["set"] == "C"
