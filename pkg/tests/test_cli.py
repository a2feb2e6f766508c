"""CLIのテスト"""

import argparse
import json

import pytest

from crtrig.cli import (
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    _progress_bar,
    create_parser,
    main,
    parse_fmt_range,
)
from crtrig.models import Func
from crtrig.pipeline import check_report_schema
from crtrig.poly import (
    DOMAIN_REDUCED,
    default_func_polys,
    load_func_polys,
    save_func_polys,
    taylor_seed,
)


class TestParser:
    """引数の解析"""

    def test_fmt_range(self):
        assert parse_fmt_range("32") == [32]
        assert parse_fmt_range("10..12") == [10, 11, 12]

    @pytest.mark.parametrize("text", ["9", "33", "16..12", "abc", "10..x"])
    def test_fmt_range_invalid(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_fmt_range(text)

    def test_bad_fmt_exits_with_usage(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["verify", "--fmt", "40"])
        assert exc_info.value.code == EXIT_USAGE

    def test_unknown_func(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["verify", "--func", "atan"])
        assert exc_info.value.code == EXIT_USAGE

    def test_defaults(self):
        args = create_parser().parse_args(["verify"])
        assert args.fmt == [32]
        assert args.mode == "rne"
        assert args.strategy == "hybrid"
        assert args.scope == "exhaustive"
        assert args.jobs == 1

    def test_generate_degrees(self):
        args = create_parser().parse_args(["generate", "poly", "--degrees", "9", "8"])
        assert args.degrees == [9, 8]

    def test_no_command(self, capsys):
        assert main([]) == EXIT_OK
        assert "verify" in capsys.readouterr().out



class TestProgressBar:
    """進捗表示"""

    def test_updates_are_throttled(self, capsys):
        bar, update = _progress_bar("test", 0)
        for i in range(1, 50_001):
            update(i, 50_000)
        assert bar.n == 50_000
        assert bar.total == 50_000
        bar.close()
        assert capsys.readouterr().err.count("\r") < 1000


class TestVerifyCommand:
    """verify サブコマンド"""

    def test_json_lines(self, tmp_path):
        out = tmp_path / "report.jsonl"
        code = main(
            [
                "verify",
                "--func", "cos",
                "--fmt", "16..17",
                "--mode", "all",
                "--scope", "random:50:1",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert len(records) == 10
        for record in records:
            check_report_schema(record)
            assert record["func"] == "cos"
            assert record["mismatches"] == 0
        assert {r["fmt"] for r in records} == {16, 17}

    def test_stdout(self, capsys):
        code = main(["verify", "--scope", "random:20:2", "--strategy", "all"])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert [json.loads(line)["strategy"] for line in lines] == ["fpv1", "fpv2", "int", "hybrid"]

    def test_bad_scope(self, capsys):
        assert main(["verify", "--scope", "some"]) == EXIT_USAGE
        assert "エラー" in capsys.readouterr().err

    def test_missing_artifacts(self, tmp_path):
        code = main(
            ["verify", "--scope", "random:5:0", "--artifacts", str(tmp_path / "missing")]
        )
        assert code == EXIT_USAGE

    def test_corrupted_coefficients_fail(self, tmp_path, capsys):
        """形式は正しいが不正確な係数では不一致で終了コード1"""
        polys = default_func_polys(Func.SIN).replaced(taylor_seed(1, 0, Func.SIN, DOMAIN_REDUCED))
        save_func_polys(polys, tmp_path / "poly_sin.txt")
        code = main(["verify", "--scope", "random:100:3", "--artifacts", str(tmp_path)])
        assert code == EXIT_FAILED
        record = json.loads(capsys.readouterr().out.splitlines()[0])
        assert record["mismatches"] > 0
        assert record["first_failures"][0]["input_bits"].startswith("0x")
        check_report_schema(record)

    def test_malformed_coefficient_file(self, tmp_path):
        (tmp_path / "poly_sin.txt").write_text("func sin\norder horner-x2-v1\nsin 0 zz\n")
        code = main(["verify", "--scope", "random:5:0", "--artifacts", str(tmp_path)])
        assert code == EXIT_USAGE

    def test_oracle_cache(self, tmp_path):
        cache = tmp_path / "sin.cache"
        args = ["verify", "--scope", "random:30:4", "--oracle-cache", str(cache)]
        assert main(args) == EXIT_OK
        assert cache.stat().st_size % 12 == 0
        assert main(args) == EXIT_OK


class TestBenchCommand:
    """bench サブコマンド"""

    def test_bench(self, tmp_path, capsys):
        out = tmp_path / "bench.json"
        code = main(["bench", "-n", "100", "--strategy", "hybrid", "--out", str(out)])
        assert code == EXIT_OK
        record = json.loads(out.read_text())
        assert [row["name"] for row in record["rows"]] == ["hybrid"]
        assert "ns/call" in capsys.readouterr().err


class TestGenerateCommand:
    """generate サブコマンド"""

    def test_constants(self, tmp_path, capsys):
        assert main(["generate", "constants", "--artifacts", str(tmp_path)]) == EXIT_OK
        text = (tmp_path / "pi_constants.txt").read_text()
        assert "pieces28 0 0x1.45f306cp+6 -21" in text.splitlines()
        record = json.loads(capsys.readouterr().out)
        assert record["artifact"] == "constants"

    def test_table(self, tmp_path, capsys):
        assert main(["generate", "table", "--artifacts", str(tmp_path)]) == EXIT_OK
        lines = (tmp_path / "sin_table.txt").read_text().splitlines()
        assert lines[128] == "128 0x1p+0"
        record = json.loads(capsys.readouterr().out)
        assert len(record["checksum"]) > 0

    def test_requires_directory(self, monkeypatch, capsys):
        monkeypatch.delenv("CRTRIG_ARTIFACTS", raising=False)
        assert main(["generate", "table"]) == EXIT_USAGE
        assert "--artifacts" in capsys.readouterr().err

    def test_directory_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CRTRIG_ARTIFACTS", str(tmp_path / "env"))
        assert main(["generate", "constants"]) == EXIT_OK
        assert (tmp_path / "env" / "pi_constants.txt").exists()

    def test_poly_bad_degree(self, tmp_path):
        code = main(
            ["generate", "poly", "--degrees", "6", "6", "--scope", "random:5:0",
             "--artifacts", str(tmp_path)]
        )
        assert code == EXIT_USAGE

    def test_poly_negative_holdout(self, tmp_path):
        code = main(
            ["generate", "poly", "--holdout", "-1", "--scope", "random:5:0",
             "--artifacts", str(tmp_path)]
        )
        assert code == EXIT_USAGE

    @pytest.mark.slow
    def test_poly(self, tmp_path, capsys):
        out = tmp_path / "report.jsonl"
        code = main(
            ["generate", "poly", "--func", "cos", "--scope", "random:40:0", "--holdout", "100",
             "--artifacts", str(tmp_path), "--out", str(out)]
        )
        assert code == EXIT_OK
        reports = [json.loads(line) for line in out.read_text().splitlines()]
        assert {r["domain"] for r in reports} == {"reduced", "small"}
        assert all(r["ok"] for r in reports)
        assert all(r["holdout_inputs"] > 0 and r["holdout_failures"] == [] for r in reports)
        path = tmp_path / "poly_cos.txt"
        assert path.exists()
        assert load_func_polys(path).reduced.func is Func.COS
