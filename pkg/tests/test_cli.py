import pytest

from valnet.cli import EXIT_INVALID, EXIT_OK, EXIT_PARSE, EXIT_SOLVER, main

from conftest import WILDCATTER_PATH

PROPAGATION = """\
random R { x, y }
random S { u, v, w }
prec R -> S

bpa prior on {R} { {x} = 0.6; {x, y} = 0.4 }

bpa link on {S | R} {
  x : {u} = 1;
  y : {v, w} = 0.5;
  y : {u, v, w} = 0.5
}
"""


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write(tmp_path, text):
    path = tmp_path / "problem.vn"
    path.write_text(text)
    return str(path)


class TestCheck:
    def test_ok(self, capsys):
        code, out, err = run(capsys, "check", str(WILDCATTER_PATH))
        assert code == EXIT_OK
        assert "well-defined" in out
        assert err == ""

    def test_invalid_network(self, capsys, tmp_path, wildcatter_text):
        path = write(tmp_path, wildcatter_text.replace("prec R -> D", ""))
        code, out, err = run(capsys, "check", path)
        assert code == EXIT_INVALID
        assert "p2" in err

    def test_parse_error(self, capsys, tmp_path):
        path = write(tmp_path, "decision D { a, b")
        code, _, err = run(capsys, "check", path)
        assert code == EXIT_PARSE
        assert "parse error" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "check", str(tmp_path / "absent.vn"))
        assert code == EXIT_PARSE
        assert "error" in err


class TestSolve:
    def test_human_output(self, capsys):
        code, out, err = run(capsys, "solve", str(WILDCATTER_PATH))
        assert code == EXIT_OK
        assert "lambda 0.5" in out
        assert "expected value 27500" in out
        assert "Psi[D]: gr -> d" in out
        assert "Psi[T]: t" in out
        assert "strategy: T = t; D(gr) = d; D(nr) = d; D(re) = ~d; D(ye) = ~d" in out

    def test_lambda_flag_overrides_file(self, capsys):
        code, out, _ = run(capsys, "solve", str(WILDCATTER_PATH), "--lambda", "1")
        assert code == EXIT_OK
        assert "expected value 60000" in out

    def test_machine_output_matches_human(self, capsys):
        _, human, _ = run(capsys, "solve", str(WILDCATTER_PATH))
        code, out, _ = run(capsys, "solve", str(WILDCATTER_PATH), "--machine")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "# record\tname\tcontext\tvalue"
        records = [l.split("\t") for l in lines[1:]]
        value = next(float(r[3]) for r in records if r[0] == "value")
        assert value == pytest.approx(27500.0)
        assert "expected value 27500" in human
        psi = {(r[1], r[2]): r[3] for r in records if r[0] == "psi"}
        assert psi[("D", "gr")] == "d"
        assert psi[("T", "")] == "t"
        strategy = {(r[1], r[2]): r[3] for r in records if r[0] == "strategy"}
        assert strategy[("D", "re")] == "~d"

    def test_trace_output(self, capsys):
        code, out, _ = run(capsys, "solve", str(WILDCATTER_PATH), "--trace")
        assert code == EXIT_OK
        assert "step 1: eliminate O (random)" in out
        assert "step 2: eliminate D (decision)" in out
        assert "Psi[D]" in out
        assert "62500" in out  # a per-focal contribution from the first step

    def test_rejects_lambda_outside_range(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["solve", str(WILDCATTER_PATH), "--lambda", "1.5"])
        assert exc.value.code == 2
        assert "outside [0, 1]" in capsys.readouterr().err

    def test_needs_a_lambda_from_somewhere(self, capsys, tmp_path, wildcatter_text):
        path = write(tmp_path, wildcatter_text.replace("lambda = 0.5", ""))
        code, _, err = run(capsys, "solve", path)
        assert code == EXIT_PARSE
        assert "no lambda" in err

    def test_invalid_network(self, capsys, tmp_path, wildcatter_text):
        path = write(tmp_path, wildcatter_text.replace("prec R -> D", ""))
        code, _, err = run(capsys, "solve", path)
        assert code == EXIT_INVALID


class TestSweep:
    def test_grid(self, capsys):
        code, out, err = run(
            capsys, "sweep", str(WILDCATTER_PATH), "--lambdas", "0,0.5,1"
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "lambda  value  strategy"
        assert lines[1].startswith("0  5000  ")
        assert lines[2].startswith("0.5  27500  ")
        assert lines[3].startswith("1  60000  ")
        assert "T=t" in lines[2]
        assert "D(gr)=d" in lines[2]

    def test_machine_grid(self, capsys):
        code, out, _ = run(
            capsys, "sweep", str(WILDCATTER_PATH), "--machine", "--lambdas", "0.5"
        )
        assert code == EXIT_OK
        record = out.splitlines()[1].split("\t")
        assert record[0] == "sweep"
        assert float(record[2]) == pytest.approx(27500.0)

    def test_duplicates_noted(self, capsys):
        code, _, err = run(
            capsys, "sweep", str(WILDCATTER_PATH), "--lambdas", "0.5,0.5"
        )
        assert code == EXIT_OK
        assert "duplicate" in err

    def test_bad_grid(self, capsys):
        code, _, err = run(capsys, "sweep", str(WILDCATTER_PATH), "--lambdas", "0,2")
        assert code == EXIT_PARSE
        code, _, err = run(capsys, "sweep", str(WILDCATTER_PATH), "--lambdas", ",")
        assert code == EXIT_PARSE


class TestMarginal:
    def test_propagates(self, capsys, tmp_path):
        path = write(tmp_path, PROPAGATION)
        code, out, _ = run(capsys, "marginal", path, "--target", "S")
        assert code == EXIT_OK
        assert out.startswith("marginal bpa for S")
        masses = sorted(
            float(line.split()[0]) for line in out.splitlines()[1:] if line.strip()
        )
        assert sum(masses) == pytest.approx(1.0)

    def test_machine_focals(self, capsys, tmp_path):
        path = write(tmp_path, PROPAGATION)
        code, out, _ = run(capsys, "marginal", path, "--machine", "--target", "S")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "# record\tmass\tfocal"
        total = sum(float(l.split("\t")[1]) for l in lines[1:])
        assert total == pytest.approx(1.0)

    def test_decision_networks_rejected(self, capsys):
        code, _, err = run(capsys, "marginal", str(WILDCATTER_PATH), "--target", "O")
        assert code == EXIT_SOLVER
        assert "error" in err

    def test_unknown_target(self, capsys, tmp_path):
        path = write(tmp_path, PROPAGATION)
        code, _, err = run(capsys, "marginal", path, "--target", "Z")
        assert code == EXIT_SOLVER


def test_unknown_subcommand_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
