import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from flatband.cli import main


def schema(name):
    return json.loads(resources.files("flatband").joinpath("schemas", name).read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dispersion_csv(capsys):
    code, out, _ = run(capsys, "dispersion", "--k-min", "0", "--k-max", "1", "--points", "3")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert all("[" in c for c in rows[0])
    assert len(rows) == 4


def test_dos_json_excludes_thresholds(capsys):
    code, out, _ = run(capsys, "dos", "--e-min", "-2", "--e-max", "2", "--points", "5", "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("table.schema.json"))
    assert doc["metadata"]["excluded_energies"] == [-1.0, 1.0]
    assert [r[0] for r in doc["rows"]] == [-2.0, 0.0, 2.0]
    assert doc["rows"][1][2] == 1


def test_green_outputs(capsys):
    code, out, _ = run(capsys, "green", "--z", "0.5", "--x", "0.3", "--xp", "0.3", "--format", "json")
    assert code == 0
    jsonschema.validate(json.loads(out), schema("table.schema.json"))
    code, out, _ = run(capsys, "green", "--z", "2", "--k", "1")
    assert code == 0 and "0.75" in out


def test_bound_json_schema(capsys):
    code, out, _ = run(capsys, "bound", "--v22", "0.5", "--n-max", "3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema("bound.schema.json"))
    for table in doc["solvers"].values():
        jsonschema.validate(table, schema("spectrum.schema.json"))
        assert table["truncated"]
    a, g = (doc["solvers"][k]["states"] for k in ("analytic", "generic"))
    assert [s["n"] for s in a] == [0, 1, 2, 3]
    assert all(abs(x["E"] - y["E"]) < 1e-10 for x, y in zip(a, g))


def test_bound_potential_file(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"kind": "piecewise", "segments": [[-0.5, 0.5, 0.0, 0.5, 0.0]]}))
    jsonschema.validate(json.loads(f.read_text()), schema("potential.schema.json"))
    code, out, _ = run(capsys, "bound", "--potential", str(f), "--n-max", "1", "--solver", "generic")
    assert code == 0 and "0.182443193858" in out


def test_sweep_negative_range(capsys):
    code, out, _ = run(capsys, "bound", "--g", "1", "--sweep", "-1:1:3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    energies = [r[doc["columns"].index("E[m]")] for r in doc["rows"]]
    assert len(energies) == 4  # two nonzero scales times two solvers
    assert min(energies) < 0 < max(energies)


def test_byte_stable(capsys):
    argv = ("bound", "--v11", "-0.4", "--n-max", "4", "--format", "json")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_bad_input_exit_codes(capsys):
    assert run(capsys, "bound", "--potential", "{not json")[0] == 2
    assert run(capsys, "bound", "--potential", '{"kind": "coulomb"}')[0] == 2
    assert run(capsys, "green", "--z", "0.0")[0] == 2
    assert run(capsys, "dos", "--m", "-1")[0] == 2
    with pytest.raises(SystemExit):
        main(["bound", "--sweep", "nonsense"])


def test_validate_json_report(capsys):
    code, out, _ = run(capsys, "validate", "--suite", "greens", "--json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema("validation.schema.json"))
    assert doc["passed"] and doc["checks"][0]["criterion"] == 10


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "flatband.cli", "dispersion", "--points", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("k[")
