import subprocess
import sys

import pytest

from qexplogic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(out):
    return dict(line.split("\t", 1) for line in out.splitlines() if "\t" in line)


def test_validate(capsys, scenarios):
    code, out, _ = run(capsys, "validate", str(scenarios / "qubit_z.yaml"))
    assert code == 0 and rows(out)["contexts_closed"] == "2"


def test_close_lists_derived_contexts(capsys, scenarios):
    code, out, _ = run(capsys, "close", str(scenarios / "bell_singlet.yaml"))
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 10 and lines[6].split("\t")[3] == "closure"


def test_slattice_stats_counts(capsys, scenarios):
    code, out, _ = run(capsys, "slattice", "stats", str(scenarios / "qubit_zx.yaml"))
    assert code == 0 and rows(out)["elements"] == "8"
    code, out, _ = run(capsys, "slattice", "stats", str(scenarios / "qubit_zxy.yaml"))
    r = rows(out)
    assert r["witness"] == "a=(y,11)\tb=(z,11)\tc=(x,11)"
    assert (r["lhs"], r["rhs"]) == ("(y,11)", "⊥")
    code, out, _ = run(capsys, "slattice", "stats", str(scenarios / "qubit_z.yaml"))
    assert rows(out)["distributive"] == "yes"


def test_hasse_is_dot(capsys, scenarios):
    code, out, _ = run(capsys, "slattice", "hasse", str(scenarios / "qubit_z.yaml"))
    assert code == 0 and out.startswith("digraph S_QM {") and out.endswith("}\n")


def test_lqm_commands(capsys, scenarios):
    path = str(scenarios / "qubit_zx.yaml")
    code, out, _ = run(capsys, "lqm", "enumerate", path)
    assert code == 0 and rows(out)["sections"] == "17" and len(out.splitlines()) == 19
    code, out, _ = run(capsys, "lqm", "lem-audit", path)
    assert code == 0 and rows(out)["lem_holds_for"] == "2"
    code, out, _ = run(capsys, "lqm", "neg", "--element", "z:10", path)
    assert code == 0 and out.splitlines()[1] == "(z,10)\t{C1:0, z:01, x:11}\t{C1:0, z:01, x:11}\tyes"


def test_clqm_commands(capsys, scenarios):
    path = str(scenarios / "qubit_zx.yaml")
    code, out, _ = run(capsys, "clqm", "atoms", path)
    assert code == 0 and len(out.splitlines()) == 6
    code, out, _ = run(capsys, "clqm", "lem-gap", "--element", "z:10", path)
    assert out.splitlines()[1].split("\t")[:4] == ["(z,10)", "{(C1!,1)}", "{}", "no"]
    code, out, _ = run(capsys, "clqm", "no-measurement", path)
    assert code == 0 and rows(out)["image_of_some_section"] == "no"


def test_cps_born_table(capsys, scenarios):
    code, out, _ = run(capsys, "cps", "born", str(scenarios / "qubit_zx_biased.yaml"))
    assert code == 0
    assert "F_z\t(z!,10)\t3/4" in out.splitlines()


def test_cps_paper_family_fails(capsys, scenarios):
    code, out, _ = run(capsys, "cps", "audit", "--family", "paper", str(scenarios / "qubit_zx_biased.yaml"))
    assert code == 1
    assert rows(out)["is_measure"].startswith("FAIL") and "counterexample\tmu_2" in out
    assert rows(out)["generates"] == "PASS"


def test_cps_stratified_family_passes(capsys, scenarios):
    code, out, _ = run(capsys, "cps", "audit", "--family", "stratified", str(scenarios / "qubit_zx_biased.yaml"))
    assert code == 0 and rows(out)["ordered_descending"] == "PASS"


def test_cps_extend_full_and_noncontext(capsys, scenarios):
    code, out, _ = run(capsys, "cps", "extend-full", str(scenarios / "qubit_zx_biased.yaml"))
    assert code == 0 and rows(out)["full"] == "yes"
    code, out, _ = run(capsys, "cps", "noncontext", str(scenarios / "qubit_zx_biased.yaml"))
    assert code == 0
    code, out, _ = run(capsys, "cps", "noncontext", "--reading", "literal", str(scenarios / "qubit_zx_biased.yaml"))
    assert code == 1


def test_cps_counterexamples(capsys, scenarios):
    code, out, _ = run(capsys, "cps", "counterexamples", str(scenarios / "qubit_zx.yaml"))
    assert code == 0 and rows(out)["measurement_conditions_undefined"] == "z,x"


def test_refusal_reports_bound(capsys, scenarios):
    code, out, err = run(capsys, "cps", "audit", "--family", "paper", str(scenarios / "bell_singlet.yaml"))
    assert code == 1 and "bound is 10 atoms" in err
    code, out, err = run(capsys, "lqm", "enumerate", str(scenarios / "bell_singlet.yaml"))
    assert code == 1 and "100000" in err


def test_bell_chsh(capsys, scenarios):
    code, out, _ = run(capsys, "bell", "chsh", str(scenarios / "bell_singlet.yaml"))
    assert code == 0 and rows(out)["|S|"] == "14/5" and rows(out)["S"] == "-14/5"
    code, out, _ = run(capsys, "bell", "chsh", str(scenarios / "bell_mixed.yaml"))
    assert rows(out)["S"] == "0"


def test_bell_locality(capsys, scenarios):
    code, out, _ = run(capsys, "bell", "locality", str(scenarios / "bell_singlet.yaml"))
    assert code == 1 and rows(out)["PI"] == "holds" and rows(out)["OI"] == "fails"
    code, out, _ = run(capsys, "bell", "locality", "--reading", "literal", str(scenarios / "bell_singlet.yaml"))
    assert code == 0 and rows(out)["all_vacuous"] == "yes"
    code, out, _ = run(capsys, "bell", "locality", "--maximally-mixed", str(scenarios / "bell_singlet.yaml"))
    assert code == 0


def test_bell_needs_bell_section(capsys, scenarios):
    code, _, err = run(capsys, "bell", "chsh", str(scenarios / "qubit_z.yaml"))
    assert code == 2 and "no bell section" in err


@pytest.mark.parametrize("argv", [[], ["nope"], ["slattice"], ["bell", "locality", "--reading", "x", "f.yaml"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_missing_file_and_parse_error(capsys, tmp_path):
    assert run(capsys, "validate", str(tmp_path / "absent.yaml"))[0] == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("dim: 2\ncontexts: [\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2 and "line" in err


def test_bad_element_is_usage_error(capsys, scenarios):
    code, _, err = run(capsys, "lqm", "neg", "--element", "q:1", str(scenarios / "qubit_z.yaml"))
    assert code == 2 and "unknown context" in err


def test_module_entry_point(scenarios):
    res = subprocess.run([sys.executable, "-m", "qexplogic", "validate", str(scenarios / "qubit_z.yaml")],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("scenario\tOK")
