import json

import pytest

from pils.cli import main, outline_from_json, outline_to_json, parse_partition
from reference import (
    REDUCTION_COLS,
    REDUCTION_ROWS,
    REDUCTION_SYMS,
    REFERENCE_OUTLINE_CELLS,
    REFERENCE_SQUARE,
)


@pytest.fixture
def grid_file(tmp_path):
    path = tmp_path / "square.txt"
    path.write_text("\n".join(" ".join(str(v) for v in row)
                              for row in REFERENCE_SQUARE) + "\n")
    return str(path)


class TestParsing:
    def test_comma_notation(self):
        assert parse_partition("3,3,3,2,1").parts == (3, 3, 3, 2, 1)

    def test_exponent_notation(self):
        assert parse_partition("3^3 2 1").parts == (3, 3, 3, 2, 1)
        assert parse_partition(" 2^2,1^3 ").parts == (2, 2, 1, 1, 1)

    def test_garbage_is_usage_error(self, capsys):
        assert main(["exists", "3,x"]) == 64


class TestExists:
    def test_exit_codes(self, capsys):
        assert main(["exists", "1,1"]) == 1
        assert "no" in capsys.readouterr().out
        assert main(["exists", "2^3"]) == 0
        assert "yes" in capsys.readouterr().out
        assert main(["exists", "5,3,2,2,1"]) == 2
        assert "unknown" in capsys.readouterr().out


class TestConstruct:
    def test_json_output_and_dogfood(self, capsys, tmp_path):
        assert main(["construct", "3,3,3,2,1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["order"] == 12
        assert len(payload["blocks"]) == 5
        path = tmp_path / "emitted.txt"
        path.write_text("\n".join(" ".join(str(v) for v in row)
                                  for row in payload["square"]))
        assert main(["verify", str(path), "3,3,3,2,1"]) == 0

    def test_nonexistent(self, capsys):
        assert main(["construct", "2,2"]) == 1

    def test_uniform(self, capsys):
        assert main(["construct", "4^3"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["order"] == 12

    def test_out_of_scope(self, capsys):
        # exists (k=4 characterization) but no constructor covers it
        assert main(["construct", "4,2,2,2"]) == 3

    def test_unknown_is_out_of_scope(self, capsys):
        assert main(["construct", "5,3,2,2,1"]) == 3

    def test_csv_round_trip(self, capsys, tmp_path):
        assert main(["construct", "2^3", "--format", "csv"]) == 0
        text = capsys.readouterr().out
        path = tmp_path / "grid.csv"
        path.write_text(text)
        assert main(["verify", str(path), "2^3"]) == 0

    def test_trace_included(self, capsys):
        assert main(["construct", "3,3,3,2,1", "--trace"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["trace"]["steps"]


class TestVerify:
    def test_reference_square(self, grid_file, capsys):
        assert main(["verify", grid_file, "3,2,2,1,1"]) == 0

    def test_wrong_partition(self, grid_file, capsys):
        assert main(["verify", grid_file, "3,3,1,1,1"]) == 1

    def test_non_latin_grid(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("1 2\n1 2\n")
        assert main(["verify", str(path), "1,1"]) == 1


class TestReduceLift:
    def test_reduce_matches_reference(self, grid_file, capsys):
        assert main(["reduce", grid_file, "1,1,1,2,2,1,1", "3,2,2,1,1",
                     "3,1,1,1,1,1,1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        outline = outline_from_json(payload)
        assert [list(r) for r in outline.cells] == [
            list(r) for r in REFERENCE_OUTLINE_CELLS]

    def test_lift_round_trip(self, grid_file, capsys, tmp_path):
        assert main(["reduce", grid_file, "1,1,1,2,2,1,1", "3,2,2,1,1",
                     "3,1,1,1,1,1,1"]) == 0
        outline_json = capsys.readouterr().out
        path = tmp_path / "outline.json"
        path.write_text(outline_json)
        assert main(["lift", str(path)]) == 0
        grid_text = capsys.readouterr().out
        lifted = tmp_path / "lifted.txt"
        lifted.write_text(grid_text)
        assert main(["reduce", str(lifted), "1,1,1,2,2,1,1", "3,2,2,1,1",
                     "3,1,1,1,1,1,1"]) == 0
        assert json.loads(capsys.readouterr().out) == json.loads(outline_json)

    def test_outline_json_round_trip(self, grid_file, capsys):
        from pils import LatinSquare, Partition, reduce as reduce_square

        outline = reduce_square(LatinSquare(REFERENCE_SQUARE),
                                Partition(REDUCTION_ROWS),
                                Partition(REDUCTION_COLS),
                                Partition(REDUCTION_SYMS))
        data = json.loads(json.dumps(outline_to_json(outline)))
        assert outline_from_json(data).cells == outline.cells


class TestOracleCommand:
    def test_found(self, capsys):
        assert main(["oracle", "1,1,1"]) == 0
        assert "found" in capsys.readouterr().out

    def test_none(self, capsys):
        assert main(["oracle", "2,1,1"]) == 1
        assert "exhaustive" in capsys.readouterr().out

    def test_budget(self, capsys):
        assert main(["oracle", "3,3,3", "--budget", "2"]) == 2


class TestIlsCommand:
    def test_basic(self, capsys):
        assert main(["ils", "20", "3,2,1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["order"] == 20
        assert len(payload["blocks"]) == 3

    def test_below_bound(self, capsys):
        assert main(["ils", "11", "3,2,1"]) == 64
