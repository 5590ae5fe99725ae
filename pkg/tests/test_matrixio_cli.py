import numpy as np
import pytest

from grinterp.cli import main
from grinterp.matrixio import read_matrix, write_csv, write_matrix

from _dense import random_point


class TestMatrixFormat:
    def test_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        m = rng.standard_normal((7, 3)) * np.logspace(-8, 8, 3)
        path = tmp_path / "m.txt"
        write_matrix(path, m)
        assert np.array_equal(read_matrix(path), m)  # 17 digits roundtrip doubles

    def test_header(self, tmp_path):
        path = tmp_path / "m.txt"
        write_matrix(path, np.zeros((2, 4)))
        assert path.read_text().splitlines()[0] == "2 4"

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1\n")
        with pytest.raises(ValueError, match="header"):
            read_matrix(path)

    def test_wrong_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\n1 2 3\n")
        with pytest.raises(ValueError, match="entries"):
            read_matrix(path)


class TestCsv:
    def test_float_precision(self, tmp_path):
        path = tmp_path / "r.csv"
        write_csv(path, ["a", "b"], [[1 / 3, "x"]])
        lines = path.read_text().splitlines()
        assert lines[0] == "a,b"
        assert float(lines[1].split(",")[0]) == 1 / 3


class TestCli:
    def test_exp1_end_to_end(self, tmp_path):
        out = tmp_path / "exp1.csv"
        rc = main(
            ["exp1", "--n", "40", "--p", "3", "--grid", "5", "--seed", "1",
             "--out", str(out)]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t_star,scheme,rel_error,feasibility"
        assert len(lines) == 1 + 5 * 6

    def test_byte_determinism(self, tmp_path):
        args = ["exp1", "--n", "40", "--p", "3", "--grid", "5", "--seed", "1"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_convergence_csv(self, tmp_path):
        out = tmp_path / "conv.csv"
        rc = main(
            ["convergence", "--n", "40", "--p", "3", "--h", "0.4", "0.2",
             "--out", str(out)]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "scheme,slope,intercept"
        assert len(lines) == 7

    def test_bounds_passes(self, capsys):
        assert main(["bounds", "--seed", "7"]) == 0
        out = capsys.readouterr().out
        assert out.count("pass") == 6

    def test_maxvol_singular_block(self, tmp_path, capsys):
        m = np.zeros((12, 3))
        m[-3:] = np.eye(3)
        path = tmp_path / "sing.txt"
        write_matrix(path, m)
        with pytest.warns(UserWarning):
            rc = main(["maxvol", "--in", str(path)])
        assert rc == 0
        assert "inv_norm_after=1.7" in capsys.readouterr().out

    def test_maxvol_report_csv(self, tmp_path):
        u = random_point(np.random.default_rng(2), 20, 3)
        path = tmp_path / "u.txt"
        write_matrix(path, u.u)
        out = tmp_path / "rep.csv"
        assert main(["maxvol", "--in", str(path), "--out", str(out)]) == 0
        header = out.read_text().splitlines()[0]
        assert header == "sample_index,iters,final_max_entry,inv_norm_before,inv_norm_after"

    def test_config_file_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# small run\nn = 40\np = 3\ngrid = 5\nseed = 1\n")
        out = tmp_path / "exp1.csv"
        rc = main(
            ["exp1", "--config", str(cfg), "--grid", "3", "--out", str(out)]
        )
        assert rc == 0
        # flag (grid=3) beats config (grid=5)
        assert len(out.read_text().splitlines()) == 1 + 3 * 6

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bogus = 1\n")
        assert main(["exp1", "--config", str(cfg)]) == 1
        assert "bogus" in capsys.readouterr().err

    def test_outdir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GRINTERP_OUTDIR", str(tmp_path))
        rc = main(
            ["exp1", "--n", "40", "--p", "3", "--grid", "3", "--out", "rel.csv"]
        )
        assert rc == 0
        assert (tmp_path / "rel.csv").exists()

    def test_unknown_flag_exits_1(self):
        with pytest.raises(SystemExit) as exc:
            main(["exp1", "--bogus"])
        assert exc.value.code == 1

    def test_missing_input_exits_1(self):
        assert main(["maxvol"]) == 1
        assert main(["maxvol", "--in", "/nonexistent/file.txt"]) == 1

    def test_numerical_failure_exits_2(self, tmp_path):
        path = tmp_path / "rankdef.txt"
        write_matrix(path, np.ones((6, 2)))  # rank deficient
        assert main(["maxvol", "--in", str(path)]) == 2
