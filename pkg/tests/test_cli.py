import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from fieldcheck import kernels
from fieldcheck.cli import main
from fieldcheck.run import assess_convergence
from fieldcheck.scenario import ConfigError, load_scenario, parse_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
EXPECTED = {
    "oscillating-monopole": 0,
    "oscillating-monopole-advanced": 0,
    "oscillating-monopole-mismatched": 1,
    "static-monopole": 0,
    "hertzian-dipole": 0,
    "hertzian-dipole-gauge": 0,
    "static-charge": 0,
    "charge-plus-dipole": 0,
}


def scenario(name):
    return str(SCENARIOS / f"{name}.json")


def write(tmp_path, doc, name="sc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=2))
    return str(path)


def base_doc(**source):
    return {
        "schema": "fieldcheck/1",
        "theory": "scalar",
        "source": {"kind": "oscillating_monopole", "q0": 1.0, "omega": 0.3, "a": 0.1, **source},
        "ladder": {"r0": 20.0, "rungs": 6},
        "quadrature": {"radial": 8, "polar": 8, "azimuthal": 16},
    }


def test_every_bundled_scenario_is_listed():
    assert {p.stem for p in SCENARIOS.glob("*.json")} == set(EXPECTED)


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_bundled_verify(tmp_path, name):
    out = tmp_path / "report.json"
    assert main(["verify", "--scenario", scenario(name), "--out", str(out)]) == EXPECTED[name]
    doc = json.loads(out.read_text())
    assert doc["verdict"] == ("pass" if EXPECTED[name] == 0 else "fail")
    assert doc["schema"] == "fieldcheck-report/1"


def test_mismatch_names_failing_condition(tmp_path):
    out = tmp_path / "report.json"
    main(["verify", "--scenario", scenario("oscillating-monopole-mismatched"), "--out", str(out)])
    failed = json.loads(out.read_text())["failed"]
    assert failed and all(name in ("psi_residual", "sommerfeld") for name in failed)


def test_missing_omega_names_key(tmp_path, capsys):
    doc = base_doc()
    del doc["source"]["omega"]
    assert main(["verify", "--scenario", write(tmp_path, doc)]) == 2
    assert "source.omega" in capsys.readouterr().err


def test_malformed_json_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "schema": "fieldcheck/1",\n  "theory": "scalar",\n  oops\n}\n')
    assert main(["verify", "--scenario", str(path)]) == 2
    assert "line 4" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert main(["verify", "--scenario", str(tmp_path / "nope.json")]) == 2


@pytest.mark.parametrize(
    "mutate, key",
    [
        (lambda d: d["source"].update(kind="quadrupole"), "source.kind"),
        (lambda d: d["source"].update(a=-1.0), "source.a"),
        (lambda d: d["source"].update(q0="one"), "source.q0"),
        (lambda d: d.update(theory="maxwell"), "source.kind"),
        (lambda d: d.update(schema="fieldcheck/9"), "schema"),
        (lambda d: d["ladder"].update(rungs=2), "ladder.rungs"),
        (lambda d: d["quadrature"].update(radial=1), "quadrature.radial"),
        (lambda d: d.update(gauge={"amplitude": 1.0}), "gauge"),
        (lambda d: d.update(thresholds={"bogus": [1, 0.1]}), "thresholds.bogus"),
    ],
)
def test_config_errors_carry_key(mutate, key):
    doc = base_doc()
    mutate(doc)
    with pytest.raises(ConfigError) as err:
        parse_scenario(doc)
    assert err.value.key == key


def test_superposition_source():
    doc = base_doc()
    doc["source"] = [doc["source"], {"kind": "static_monopole", "Q": 1.0, "a": 0.1}]
    assert len(parse_scenario(doc).source.terms) == 2


def test_omega_a_flag():
    sc = parse_scenario(base_doc(omega=6.0))
    assert sc.flags["omega_a_warning"] is True


def test_static_charge_csv(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["sample", "--scenario", scenario("static-charge"), "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 6
    for row in rows:
        r = float(row["r"])
        assert r > 0.2
        assert abs(float(row["A0"]) - 2.0 / r) < 1e-6


def test_monopole_psi_shape(tmp_path):
    out = tmp_path / "psi.csv"
    assert main(["sample", "--scenario", scenario("oscillating-monopole"), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "r,psi"
    assert len(lines) == 13
    assert all(len(line.split(",")) == 2 for line in lines)


@pytest.mark.parametrize("what", ["potential", "gradient", "field", "stress", "psi"])
@pytest.mark.parametrize("name", ["hertzian-dipole", "static-monopole"])
def test_sample_quantities(tmp_path, name, what):
    out = tmp_path / "s.json"
    assert main(["sample", "--scenario", scenario(name), "--what", what, "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert all(len(row) == len(doc["columns"]) for row in doc["rows"])
    assert all(math.isfinite(v) for row in doc["rows"] for v in row)


def test_inside_support_gradient_is_numerical_error(tmp_path, capsys):
    doc = base_doc()
    doc["sample"] = {"what": "gradient", "grid": {"kind": "ray", "radii": [0.05, 1.0], "time": 1.0}}
    assert main(["sample", "--scenario", write(tmp_path, doc)]) == 3
    err = capsys.readouterr().err
    assert "0.05" in err and "sc.json" in err


def test_csv_only_for_sample(tmp_path):
    assert main(["verify", "--scenario", scenario("static-monopole"), "--format", "csv"]) == 2


def test_text_format(tmp_path, capsys):
    assert main(["charge", "--scenario", scenario("static-charge"), "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("charge static-charge")
    assert "e = 2" in out


def test_charge_needs_maxwell():
    assert main(["charge", "--scenario", scenario("static-monopole")]) == 2


def test_flux_command(tmp_path):
    out = tmp_path / "flux.json"
    assert main(["flux", "--scenario", scenario("oscillating-monopole"), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    exact = [row for row in doc["flux"] if row["method"] == "exact-integrand"]
    for row in exact:
        expected = (0.3 * math.cos(0.3 * row["u0"])) ** 2
        assert abs(row["W"][0] - expected) < 0.02 * expected


def test_reports_are_byte_identical(tmp_path):
    paths = [tmp_path / f"r{i}.json" for i in range(2)]
    before = kernels.get_threads()
    try:
        for i, p in enumerate(paths):
            main(["verify", "--scenario", scenario("hertzian-dipole-gauge"), "--out", str(p), "--threads", str(1 + 3 * i)])
    finally:
        kernels.set_threads(before)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_static_convergence_at_floor(tmp_path):
    out = tmp_path / "c.json"
    assert main(["convergence", "--scenario", scenario("static-monopole"), "--out", str(out)]) == 0
    conv = json.loads(out.read_text())["convergence"]
    assert conv["converged"] and all(conv["at_floor"])


def test_coarse_orders_still_converge(tmp_path):
    # N = 4 Gauss-Legendre already resolves the smooth bump well; changes shrink monotonically
    doc = base_doc()
    doc["quadrature"] = {"radial": 4, "polar": 4, "azimuthal": 4}
    doc["ladder"]["u0"] = 2.618
    doc["convergence"] = {"target": "potential"}
    out = tmp_path / "c.json"
    assert main(["convergence", "--scenario", write(tmp_path, doc), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["convergence"]["non_convergence"] is False


def test_assess_convergence_flags_growth():
    assert assess_convergence([1.0, 1.1, 1.3])["non_convergence"]
    assert assess_convergence([1.0, 1.1, 1.101])["converged"]
    assert assess_convergence([1.0, 1.0, 1.0])["converged"]


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "fieldcheck.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "verify" in out.stdout


def test_load_scenario_uses_stem():
    assert load_scenario(scenario("static-charge")).name == "static-charge"


def test_vanishing_quantity_judged_on_reference():
    noise = [1.3e-18, 7.0e-18, -1.6e-18]
    assert assess_convergence(noise)["non_convergence"]
    assert assess_convergence(noise, reference=0.05)["converged"]
