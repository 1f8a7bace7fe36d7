import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from lsbounds import cli, suites
from lsbounds.channels import KrausSet
from lsbounds.fileio import channel_to_doc, load_channel, load_state, state_to_doc
from lsbounds.inequalities import SlackReport
from lsbounds.samplers import SeededGenerator, random_density_matrix, random_kraus_set


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@pytest.fixture
def states(tmp_path):
    gen = SeededGenerator(4)
    rho = random_density_matrix(2, 2, gen)
    gamma = random_density_matrix(2, 2, gen)
    return (
        write_json(tmp_path / "rho.json", state_to_doc(rho)),
        write_json(tmp_path / "gamma.json", state_to_doc(gamma)),
    )


class TestVerify:
    def test_passing_suite_and_report(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = cli.main(["verify", "--suite", "ssa", "--trials", "40", "--dims", "2,2,2", "--seed", "7", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["tool"] == "lsbounds" and doc["seed"] == 7
        assert doc["algorithm"] == "PCG64+box-muller"
        assert doc["tolerances"]["slack"] == 1e-9
        suite = doc["suites"][0]
        assert suite["violations"] == 0 and suite["min_slack"] >= -1e-9
        assert len(suite["per_trial"]) == 40
        assert "PASS ssa" in capsys.readouterr().out

    def test_zero_trials_is_usage_error(self):
        assert cli.main(["verify", "--suite", "ssa", "--trials", "0", "--seed", "7"]) == 2

    def test_seed_required(self):
        assert cli.main(["verify", "--suite", "ssa", "--trials", "5"]) == 2

    def test_bad_dims(self):
        assert cli.main(["verify", "--suite", "ssa", "--trials", "5", "--dims", "2,2", "--seed", "1"]) == 2
        assert cli.main(["verify", "--suite", "ssa", "--trials", "5", "--dims", "2,x", "--seed", "1"]) == 2

    def test_corrupted_checker_exits_1(self, monkeypatch):
        def broken(gen, dims, m, fixed, tol):
            return SlackReport("ssa", [("lhs", 1.0), ("rhs", 0.5)], tol)

        monkeypatch.setitem(suites.CHECKERS, "ssa", broken)
        assert cli.main(["verify", "--suite", "ssa", "--trials", "3", "--seed", "7"]) == 1

    def test_internal_inconsistency_exits_1(self, monkeypatch):
        from lsbounds.errors import InternalConsistencyError

        def broken(gen, dims, m, fixed, tol):
            raise InternalConsistencyError("forced")

        monkeypatch.setitem(suites.CHECKERS, "ls9", broken)
        assert cli.main(["verify", "--suite", "ls9", "--trials", "2", "--seed", "7"]) == 1

    def test_reproducible(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for p in (a, b):
            cli.main(["verify", "--suite", "sandwich", "--trials", "5", "--dims", "2,2", "--seed", "3", "--out", str(p)])
        assert a.read_text() == b.read_text()


class TestExplore:
    def test_sandwich(self, tmp_path):
        out = tmp_path / "s.csv"
        code = cli.main(["explore", "--chain", "sandwich", "--trials", "100", "--dims", "2",
                         "--kraus-count", "2", "--seed", "5", "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out)
        assert header == cli.explore_header(3)
        data = [r for r in rows if r[0] == "trial"]
        assert len(data) == 100
        assert [r[0] for r in rows[100:]] == ["min", "mean", "strict_frequency"]
        slacks = [float(x) for r in data for x in r[6:]]
        assert min(slacks) >= -1e-9

    def test_identity_fixture_ls9(self, tmp_path):
        out = tmp_path / "i.csv"
        assert cli.main(["explore", "--chain", "ls9", "--trials", "20", "--channel", "identity",
                         "--seed", "5", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        for r in rows:
            if r[0] == "trial":
                # slack columns follow 3 ids + 4 terms
                assert abs(float(r[7])) <= 1e-9 and abs(float(r[8])) <= 1e-9

    def test_single_trial(self, tmp_path):
        out = tmp_path / "one.csv"
        assert cli.main(["explore", "--chain", "ssa", "--trials", "1", "--seed", "5", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        assert sum(r[0] == "trial" for r in rows) == 1

    def test_summary_reparses_exactly(self, tmp_path):
        out = tmp_path / "r.csv"
        cli.main(["explore", "--chain", "ls-main", "--trials", "30", "--seed", "9", "--out", str(out)])
        header, rows = read_csv(out)
        n_terms = 3
        data = [r for r in rows if r[0] == "trial"]
        summary = {r[0]: r for r in rows if r[0] != "trial"}
        for j in range(3, 3 + n_terms + n_terms - 1):
            col = [float(r[j]) for r in data]
            assert float(summary["min"][j]) == min(col)
            assert float(summary["mean"][j]) == math.fsum(col) / len(col)
        for j in range(3 + n_terms, len(header)):
            col = [float(r[j]) for r in data]
            freq = sum(s > 1e-6 for s in col) / len(col)
            assert float(summary["strict_frequency"][j]) == freq

    def test_bad_chain(self, tmp_path):
        assert cli.main(["explore", "--chain", "nope", "--trials", "1", "--seed", "1", "--out", str(tmp_path / "x")]) == 2

    def test_unwritable(self, tmp_path):
        bad = tmp_path / "missing" / "x.csv"
        assert cli.main(["explore", "--chain", "ssa", "--trials", "1", "--seed", "1", "--out", str(bad)]) == 2


class TestTighten:
    def test_single_operator_channel(self, tmp_path, states):
        ch = write_json(tmp_path / "u.json", channel_to_doc(random_kraus_set(2, 1, SeededGenerator(1))))
        out = tmp_path / "t.json"
        code = cli.main(["tighten", "--channel", ch, "--state", states[0], "--gamma", states[1],
                         "--direction", "maximize", "--budget", "60", "--restarts", "2", "--seed", "3", "--out", str(out)])
        assert code == 0
        run = json.loads(out.read_text())["runs"][0]
        assert run["best_value"] == pytest.approx(run["baseline"], abs=1e-12)

    def test_both_directions(self, tmp_path, states):
        ch = write_json(tmp_path / "k.json", channel_to_doc(random_kraus_set(2, 2, SeededGenerator(2))))
        out = tmp_path / "t.json"
        code = cli.main(["tighten", "--channel", ch, "--state", states[0], "--gamma", states[1],
                         "--direction", "both", "--budget", "120", "--restarts", "3", "--seed", "3", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        hi, lo = doc["runs"]
        assert hi["best_value"] >= hi["baseline"] >= lo["best_value"]
        for run in (hi, lo):
            assert run["contained"]
            lower, mid, upper = (t["value"] for t in run["chain_at_best"]["terms"])
            assert lower - 1e-9 <= run["best_value"] <= upper + 1e-9
            w = np.array(run["best_unitary"])
            w = w[..., 0] + 1j * w[..., 1]
            assert np.max(np.abs(w.conj().T @ w - np.eye(2))) <= 1e-9
        assert doc["seed"] == 3 and doc["algorithm"]

    def test_fixture_channel_name(self, tmp_path, states):
        assert cli.main(["tighten", "--channel", "dephasing", "--state", states[0], "--gamma", states[1],
                         "--budget", "20", "--seed", "1"]) == 0

    def test_malformed_channel_file(self, tmp_path, states):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert cli.main(["tighten", "--channel", str(bad), "--state", states[0], "--gamma", states[1], "--seed", "1"]) == 2

    def test_incomplete_kraus_refused(self, tmp_path, states, capsys):
        doc = channel_to_doc(KrausSet([np.eye(2), np.eye(2)]))
        ch = write_json(tmp_path / "double.json", doc)
        assert cli.main(["tighten", "--channel", ch, "--state", states[0], "--gamma", states[1], "--seed", "1"]) == 2
        assert "deviation" in capsys.readouterr().err

    def test_dimension_mismatch(self, tmp_path, states):
        ch = write_json(tmp_path / "k3.json", channel_to_doc(random_kraus_set(3, 2, SeededGenerator(2))))
        assert cli.main(["tighten", "--channel", ch, "--state", states[0], "--gamma", states[1], "--seed", "1"]) == 2


class TestEntropyCommand:
    def test_bell_marginal(self, tmp_path, capsys):
        f = write_json(tmp_path / "bell.json", {"fixture": "bell"})
        assert cli.main(["entropy", "S", f, "--labels", "A"]) == 0
        assert capsys.readouterr().out.strip() == "0.693147180560"

    def test_identical_files(self, states, capsys):
        assert cli.main(["entropy", "H", states[0], states[0]]) == 0
        assert float(capsys.readouterr().out) == 0.0

    def test_kernel_violation_prints_inf(self, tmp_path, states, capsys):
        g = write_json(tmp_path / "g.json", {"fixture": "product", "factors": [{"label": "A", "diagonal": [1, 0]}]})
        assert cli.main(["entropy", "H", states[0], g]) == 0
        assert capsys.readouterr().out.strip() == "inf"

    def test_conditional_ghz(self, tmp_path, capsys):
        f = write_json(tmp_path / "ghz.json", {"fixture": "ghz"})
        assert cli.main(["entropy", "conditional", f, "--target", "C", "--rest", "A", "B"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(-math.log(2), abs=1e-11)

    def test_malformed_state(self, tmp_path):
        f = write_json(tmp_path / "s.json", {"layout": [["A", 2]], "matrix": [[[1, 0], [0, 0]]]})
        assert cli.main(["entropy", "S", f]) == 2

    def test_unknown_fixture(self, tmp_path):
        f = write_json(tmp_path / "s.json", {"fixture": "cat"})
        assert cli.main(["entropy", "S", f]) == 2


def test_file_round_trip(tmp_path):
    gen = SeededGenerator(12)
    ks = random_kraus_set(3, 2, gen, acting_on="B")
    rho = random_density_matrix(6, 6, gen)
    k2 = load_channel(write_json(tmp_path / "c.json", channel_to_doc(ks)))
    r2 = load_state(write_json(tmp_path / "r.json", state_to_doc(rho)))
    np.testing.assert_array_equal(k2.operators, ks.operators)
    assert k2.acting_on == "B"
    np.testing.assert_array_equal(r2.matrix, rho.matrix)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lsbounds", "verify", "--suite", "ssa", "--trials", "2", "--seed", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "PASS ssa" in proc.stdout
