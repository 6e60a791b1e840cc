import json

import numpy as np
import pytest

import rieszprob as R
from rieszprob import inequalities
from rieszprob.errors import ConfigInvalid
from rieszprob.harness import cli
from rieszprob.harness.config import SuiteConfig
from rieszprob.harness.curves import HEADER, curve_rows, emit_curves, process_from_spec
from rieszprob.harness.instances import gen_instance, split_coins, trial_rng
from rieszprob.harness.properties import PROPERTIES
from rieszprob.harness.suite import replay, run_suite, run_trial

QUARTER_SPEC = {"base_weights": [1.0], "blocks": [[0]], "p": [0.25], "n": 2}


class TestConfig:
    def test_defaults(self):
        cfg = SuiteConfig()
        assert (cfg.seed, cfg.trials, cfg.max_base_blocks, cfg.max_coins) == (42, 100, 4, 12)
        assert cfg.p_range == (0.05, 0.95) and cfg.tol == 1e-9 and cfg.t_grid_size == 16

    @pytest.mark.parametrize(
        "bad",
        [
            {"tol": -1},
            {"seed": -1},
            {"seed": 2**64},
            {"trials": -1},
            {"p_range": (0.5, 0.2)},
            {"p_range": (0.0, 0.5)},
            {"max_coins": 20},
            {"max_base_blocks": 0},
            {"properties": ("no_such_property",)},
            {"workers": 0},
        ],
    )
    def test_invalid(self, bad):
        with pytest.raises(ConfigInvalid):
            SuiteConfig(**bad)

    def test_from_dict(self):
        cfg = SuiteConfig.from_dict({"seed": 7, "p_range": [0.1, 0.9]})
        assert cfg.seed == 7 and cfg.p_range == (0.1, 0.9)
        with pytest.raises(ConfigInvalid):
            SuiteConfig.from_dict({"seeed": 7})
        with pytest.raises(ConfigInvalid):
            SuiteConfig.from_dict([1, 2])

    def test_json_round_trip(self, tmp_path):
        cfg = SuiteConfig(seed=3, trials=5, properties=("chernoff",))
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg.to_dict()))
        assert SuiteConfig.from_json(path) == cfg
        with pytest.raises(ConfigInvalid):
            SuiteConfig.from_json(tmp_path / "missing.json")


class TestInstances:
    def test_same_seed_is_bit_identical(self):
        cfg = SuiteConfig()
        for kind in ("process", "hoeffding", "bennett"):
            a = gen_instance(trial_rng(42, "x", 0), cfg, kind)
            b = gen_instance(trial_rng(42, "x", 0), cfg, kind)
            if kind == "process":
                assert a.product_space.weights.tobytes() == b.product_space.weights.tobytes()
            else:
                assert a.descriptor() == b.descriptor()
                for f, g in zip(a.members, b.members):
                    assert f.values.tobytes() == g.values.tobytes()

    def test_trials_differ(self):
        cfg = SuiteConfig()
        a = gen_instance(trial_rng(42, "x", 0), cfg)
        b = gen_instance(trial_rng(42, "x", 1), cfg)
        assert a.descriptor() != b.descriptor()

    def test_generated_processes_satisfy_invariants(self):
        cfg = SuiteConfig(max_coins=8)
        for trial in range(20):
            proc = gen_instance(trial_rng(1, "inv", trial), cfg)
            assert 1 <= proc.base.block_count <= cfg.max_base_blocks
            assert proc.base.space.atom_count <= cfg.max_base_atoms
            T = proc.lifted_T
            for i in range(1, proc.n + 1):
                np.testing.assert_allclose(T(proc.coin(i)).values, proc.success.values, atol=1e-13)
            assert np.all((proc.p_blocks >= 0.05) & (proc.p_blocks <= 0.95))

    def test_families(self):
        cfg = SuiteConfig()
        for trial in range(20):
            fam = gen_instance(trial_rng(2, "fam", trial), cfg, "hoeffding")
            flat = [c for g in fam.groups for c in g]
            assert len(flat) == len(set(flat))
            for X, (a, b) in zip(fam.members, fam.bounds):
                assert -2 <= a < b <= 2
                assert np.all((X.values >= a) & (X.values <= b))
            fam = gen_instance(trial_rng(2, "ben", trial), cfg, "bennett")
            assert all(np.all(f.values <= 1.0) for f in fam.members)

    def test_split_coins(self, rng):
        for _ in range(50):
            groups = split_coins(rng, 6, 3)
            assert len(groups) == 3 and all(groups)
            flat = [c for g in groups for c in g]
            assert len(flat) == len(set(flat)) and set(flat) <= set(range(1, 7))


class TestSuite:
    def test_zero_trials(self):
        rep = run_suite(SuiteConfig(trials=0))
        assert rep.ok and all(r["trials"] == 0 for r in rep.results)
        assert len(rep.results) == len(PROPERTIES)

    def test_small_run_passes(self):
        rep = run_suite(SuiteConfig(trials=3))
        assert rep.ok, rep.summary_lines()
        for r in rep.results:
            assert r["passes"] + r["failures"] == r["trials"] == 3

    def test_json_is_deterministic(self):
        cfg = SuiteConfig(trials=2, properties=("chernoff", "hoeffding"))
        a, b = run_suite(cfg).to_json(), run_suite(cfg).to_json()
        assert a == b
        data = json.loads(a)
        assert "workers" not in data["config"] and data["all_passed"] is True

    def test_parallel_matches_sequential(self):
        cfg = SuiteConfig(trials=3, properties=("tail_oracle", "bennett", "moment_mgf_factorization"))
        assert run_suite(cfg).to_json() == run_suite(cfg.replace(workers=3)).to_json()

    def test_weakened_bound_is_caught_and_replayed(self, monkeypatch):
        real = inequalities.chernoff_rhs
        monkeypatch.setattr(inequalities, "chernoff_rhs", lambda f, n, t: R.scale(1e-3, real(f, n, t)))
        rep = run_suite(SuiteConfig(trials=10, properties=("chernoff",)))
        assert not rep.ok
        record = rep.results[0]["failure_records"][0]
        assert record["check"]["holds"] is False
        assert record["check"]["lhs_at_atom"] > record["check"]["rhs_at_atom"]
        again = replay(record)
        assert not again.passed and again.failure["check"] == record["check"]
        monkeypatch.undo()
        assert replay(record).passed

    def test_exceptions_become_failures(self, monkeypatch):
        def boom(rng, cfg):
            raise R.ParameterDomain("synthetic")

        prop = PROPERTIES["chernoff"]
        monkeypatch.setitem(PROPERTIES, "chernoff", type(prop)(prop.id, prop.statement, prop.formula, boom))
        out = run_trial(SuiteConfig(), "chernoff", 0)
        assert not out.passed and "synthetic" in out.failure["error"]


class TestCurves:
    def test_quarter_row(self, tmp_path):
        proc = process_from_spec(QUARTER_SPEC)
        rows = curve_rows(proc, [0.25, 1.0, 3.0])
        assert rows[0][2:] == (None, None, None)
        t, tail, cher, ben, hoef = rows[1]
        assert tail == 0.0625
        assert cher == pytest.approx(0.82436063535006407, rel=1e-14)
        assert rows[2][1] == 0.0
        for _, tail, cher, ben, hoef in rows[1:]:
            assert tail <= min(cher, ben, hoef)

    def test_file_is_byte_identical(self, tmp_path):
        proc = process_from_spec(QUARTER_SPEC)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_curves(proc, np.linspace(0, 3, 13).tolist(), a)
        emit_curves(proc, np.linspace(0, 3, 13).tolist(), b)
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().splitlines()[0] == ",".join(HEADER)

    def test_bad_spec(self):
        with pytest.raises(ConfigInvalid):
            process_from_spec({"p": [0.5]})
        with pytest.raises(ConfigInvalid):
            process_from_spec({"base_weights": [1, 1], "blocks": [[0], [1]], "p": [0.5], "n": 2})


class TestCli:
    def test_verify_ok(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code = cli.main(["verify", "--seed", "5", "--trials", "2", "--json", str(out), "--property", "chernoff"])
        assert code == 0
        data = json.loads(out.read_text())
        assert data["config"]["seed"] == 5 and data["all_passed"]
        assert "PASS chernoff" in capsys.readouterr().err

    def test_verify_zero_trials_stdout(self, capsys):
        assert cli.main(["verify", "--trials", "0"]) == 0
        assert json.loads(capsys.readouterr().out)["all_passed"] is True

    def test_verify_failure_exit_code(self, monkeypatch, capsys):
        real = inequalities.chernoff_rhs
        monkeypatch.setattr(inequalities, "chernoff_rhs", lambda f, n, t: R.scale(1e-3, real(f, n, t)))
        assert cli.main(["verify", "--trials", "5", "--property", "chernoff"]) == 1

    def test_config_errors(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"tol": -1}))
        assert cli.main(["verify", "--config", str(bad)]) == 2
        assert cli.main(["verify", "--config", str(tmp_path / "nope.json")]) == 2
        assert cli.main(["verify", "--trials", "0", "--json", str(tmp_path / "no" / "dir.json")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_config_file(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"seed": 9, "trials": 1, "properties": ["tail_oracle"]}))
        assert cli.main(["verify", "--config", str(path)]) == 0
        data = json.loads(capsys.readouterr().out)
        assert [r["id"] for r in data["properties"]] == ["tail_oracle"]

    def test_curves(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(QUARTER_SPEC))
        out = tmp_path / "c.csv"
        args = ["curves", "--spec", str(spec), "--t-min", "0", "--t-max", "2", "--points", "5", "--out", str(out)]
        assert cli.main(args) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,tail,chernoff,bennett,hoeffding"
        row = lines[3].split(",")
        assert float(row[0]) == 1.0 and float(row[1]) == 0.0625
        assert float(row[2]) == pytest.approx(0.8243606353500641, rel=1e-14)
        assert lines[1].endswith(",,,")
        assert cli.main(args[:-1] + [str(tmp_path / "missing" / "c.csv")]) == 2
        assert cli.main(["curves", "--spec", str(tmp_path / "none.json"), "--t-min", "0",
                         "--t-max", "1", "--points", "2", "--out", str(out)]) == 2

    def test_explain(self, capsys):
        assert cli.main(["explain", "chernoff"]) == 0
        text = capsys.readouterr().out
        assert "statement:" in text and "formula:" in text
        assert cli.main(["explain"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == len(PROPERTIES)
        assert cli.main(["explain", "nope"]) == 2
