import json
import pytest
from sopwork import Workbench, gallery, machine, oracle, resources, sopoly, transformers
from sopwork.cli import main
from sopwork.gallery import BRUTEFORCE_CLAIMED_BOUND
from sopwork.sopoly import UniPoly, leaf


def _report(capsys):
    return json.loads(capsys.readouterr().out)


@pytest.fixture
def description(tmp_path):
    def dump(T, name="T.json"):
        path = tmp_path / name
        sopoly.dump_description(T, path)
        return str(path)
    return dump


class TestRun:
    def test_gallery_machine(self, capsys):
        assert main(["run", "gallery:max-length", "--oracle", "doubling", "--input", "00"]) == 0
        report = _report(capsys)
        assert report["output"] == "0000"
        assert report["time"] == 78
        assert report["queries"] == 3
        assert report["revisions"] == 1
        assert report["status"] == "halted"

    def test_writes_trace(self, capsys, tmp_path):
        path = tmp_path / "run.trace"
        assert main(["run", "iterated-apply", "--oracle", "doubling", "--input", "000", "--trace", str(path), "--sparse-trace"]) == 0
        capsys.readouterr()
        tr = resources.load_trace(path)
        assert tr.time == 29
        assert len(tr.queries) == 3

    def test_fuel(self, capsys):
        assert main(["--fuel", "10", "run", "max-length", "--oracle", "doubling", "--input", "00"]) == 3
        assert _report(capsys)["status"] == "fuel-exhausted"
        assert Workbench.fuel != 10

    def test_zero_fuel(self, capsys):
        assert main(["--fuel", "0", "run", "halt", "--oracle", "doubling"]) == 3
        assert _report(capsys)["time"] == 0

    def test_traces_are_deterministic(self, capsys, tmp_path):
        paths = [tmp_path / "a.trace", tmp_path / "b.trace"]
        for path in paths:
            main(["run", "gallery:iterated-apply", "--oracle", "doubling", "--input", "000", "--trace", str(path)])
            assert _report(capsys)["output"] == "0" * 8
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_compose(self, capsys):
        assert main(["run", "identity", "--compose", "identity", "--oracle", "doubling", "--input", "01"]) == 0
        report = _report(capsys)
        assert report["machine"] == "identity∘identity"
        assert report["output"] == "0101"

    def test_clock(self, capsys, tmp_path):
        assert main(["run", "max-length", "--clock-flr", "1", "--clock-poly", "14,20,6", "--oracle", "doubling", "--input", "00"]) == 0
        assert _report(capsys)["output"] == "0000"
        path = tmp_path / "o.json"
        oracle.dump_oracle(oracle.TableOracle({}, "000"), path)
        assert main(["run", "max-length", "--clock-majorant", "declared", "--oracle", str(path), "--input", "0"]) == 0
        assert _report(capsys)["output"] == "000"

    def test_oracle_document(self, capsys, tmp_path):
        path = tmp_path / "o.json"
        oracle.dump_oracle(oracle.TableOracle({"": "111"}, "0"), path)
        assert main(["run", "max-length", "--oracle", str(path), "--input", "0"]) == 0
        assert _report(capsys)["output"] == "000"

    def test_usage_errors(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["run", "max-length", "--oracle", "doubling", "--input", "2"])
        assert e.value.code == 2
        with pytest.raises(SystemExit) as e:
            main(["run", "max-length", "--clock-flr", "1", "--oracle", "doubling"])
        assert e.value.code == 2
        capsys.readouterr()

    def test_unreadable_inputs(self, capsys, tmp_path):
        assert main(["run", str(tmp_path / "missing.json"), "--oracle", "doubling"]) == 2
        assert capsys.readouterr().err.startswith("sopwork: ")
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert main(["run", "halt", "--oracle", str(bad)]) == 2


class TestCheck:
    def test_step_count(self, capsys):
        assert main(["check", "step-count", "iterated-apply", "--oracle", "doubling", "--max-input", "5", "--poly", "6,5,1"]) == 0
        assert _report(capsys)["checked"] == 6

    def test_clock_budget_is_separate(self, capsys):
        t = transformers.clocked_step_count(UniPoly((14, 20, 6)), 1)
        argv = ["check", "step-count", "max-length", "--oracle", "doubling", "--max-input", "2", "--clock-flr", "1", "--clock-poly", "14,20,6"]
        assert main([*argv, "--poly", ",".join(map(str, t.coefficients))]) == 0
        assert _report(capsys)["checked"] == 3
        assert main([*argv, "--poly", "14,20,6"]) == 1
        capsys.readouterr()

    def test_opt_failure(self, capsys):
        assert main(["check", "opt", "iterated-apply", "--oracle", "doubling", "--input", "0000", "--poly", "1"]) == 1
        report = _report(capsys)
        assert report["passed"] is False
        assert report["input_length"] == 4

    def test_running_time(self, capsys, description):
        path = description(leaf(UniPoly((100, 200))))
        assert main(["check", "running-time", "iterated-apply", "--oracle", "doubling", "--max-input", "12", "--description", path]) == 1
        assert _report(capsys)["input_length"] == 11

    def test_trace_file(self, capsys, tmp_path):
        path = tmp_path / "t.trace"
        resources.dump_trace(resources.Trace(0, 5), path)
        assert main(["check", "step-count", "--trace", str(path), "--poly", "2"]) == 1
        assert _report(capsys)["witness"] == 3

    def test_majorant_sweep(self, capsys):
        assert main(["--seed", "4", "check", "majorant", "--count", "50"]) == 0
        assert _report(capsys) == {"passed": True, "checked": 50}

    def test_majorant_samples(self, capsys, tmp_path):
        rows = [{
            "description": sopoly.description_to_json(BRUTEFORCE_CLAIMED_BOUND),
            "length": sopoly.length_fn_to_json(sopoly.LengthFn((1, 3, 9))),
            "n": 2,
        }]
        path = tmp_path / "samples.json"
        path.write_text(json.dumps(rows))
        assert main(["check", "majorant", "--samples", str(path)]) == 0
        assert _report(capsys)["checked"] == 1

    def test_needs_source(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["check", "step-count", "--poly", "1"])
        assert e.value.code == 2
        capsys.readouterr()


class TestPoly:
    def test_eval(self, capsys, description):
        path = description(leaf(UniPoly((6, 5, 1))))
        assert main(["poly", "eval", path, "-n", "3"]) == 0
        assert _report(capsys) == {"value": 30}

    def test_majorant(self, capsys, description):
        assert main(["poly", "majorant", description(BRUTEFORCE_CLAIMED_BOUND)]) == 0
        report = _report(capsys)
        assert report["N"] == 2
        assert report["coefficients"] == [16, 32]

    def test_pn(self, capsys, description):
        path = description(leaf(UniPoly((1, 1))))
        assert main(["poly", "pn", path, "--length", "5", "-n", "3"]) == 0
        # height 0: p_0(n) = p(n)
        assert _report(capsys) == {"i": 0, "value": sopoly.majorant(leaf(UniPoly((1, 1)))).bound(3)}

    def test_sum_to_file(self, capsys, description, tmp_path):
        A = description(leaf(UniPoly((1, 2))), "A.json")
        B = description(leaf(UniPoly((0, 0, 1))), "B.json")
        out = tmp_path / "S.json"
        assert main(["poly", "sum", A, B, "-o", str(out)]) == 0
        capsys.readouterr()
        S = sopoly.load_description(out)
        assert sopoly.eval_description(S, sopoly.LengthFn((0,)), 3) == 7 + 9

    def test_missing_operand(self, capsys, description):
        with pytest.raises(SystemExit) as e:
            main(["poly", "product", description(leaf(1))])
        assert e.value.code == 2
        capsys.readouterr()

    def test_bad_length(self, capsys, description):
        assert main(["poly", "eval", description(leaf(1)), "--length", "3,x"]) == 2
        assert "bad length function" in capsys.readouterr().err


class TestGalleryAndAdversaries:
    def test_list(self, capsys):
        assert main(["gallery", "list"]) == 0
        assert "max-length" in _report(capsys)

    def test_show(self, capsys):
        assert main(["gallery", "show", "identity"]) == 0
        program = machine.loads_program(capsys.readouterr().out)
        assert program.size == gallery.identity_machine().program.size

    def test_flr_stress(self, capsys, tmp_path):
        out = tmp_path / "finalized.json"
        assert main(["adversary", "flr-stress", "max-length", "-N", "2", "-o", str(out)]) == 0
        report = _report(capsys)
        assert report["input"] == "00"
        assert report["revisions"] == 3
        assert report["exceeded"] is True
        assert isinstance(oracle.load_oracle(str(out)), oracle.TableOracle)

    def test_delayed_growth(self, capsys):
        assert main(["adversary", "delayed-growth", "bruteforce-length", "--clock-majorant", "declared"]) == 0
        report = _report(capsys)
        assert report["correct"] is False
        assert report["in_class_A"] is True
