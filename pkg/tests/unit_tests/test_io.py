import json

import numpy as np
import pandas as pd
import pytest

from robust_loss_lab.core.errors import ParseError
from robust_loss_lab.dataset import SyntheticSpec, make_blobs
from robust_loss_lab.io import ReportWriter, load_csv, load_matrix_csv, save_csv
from robust_loss_lab.io.report import to_jsonable


class TestCsv:
    def setup_method(self):
        self.ds = make_blobs(SyntheticSpec(n_per_class=7, seed=11))

    def test_save_load_is_exact(self, tmp_path):
        path = tmp_path / "blobs.csv"
        save_csv(self.ds, path)
        assert load_csv(path, 3) == self.ds
        assert path.read_text().splitlines()[0] == "f0,f1,f2,label"

    def test_bad_row_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("f0,f1,label\n0.5,1.0,0\n0.1,abc,1\n")
        with pytest.raises(ParseError) as e:
            load_csv(path)
        assert e.value.line == 3
        assert e.value.token == "abc"
        assert "line 3" in str(e.value)

    @pytest.mark.parametrize("body, line", [
        ("0.5,1.0,0\n0.1,0.2,1\n0.3,0.4,2,9\n", 4),
        ("0.5,1.0,0,7\n0.1,0.2,1\n", 2),
    ])
    def test_extra_field_names_line(self, tmp_path, body, line):
        path = tmp_path / "ragged.csv"
        path.write_text("f0,f1,label\n" + body)
        with pytest.raises(ParseError) as e:
            load_csv(path)
        assert e.value.line == line
        assert str(e.value) == f"line {line}: more fields than the header"

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y,label\n0.5,1.0,0\n")
        with pytest.raises(ParseError) as e:
            load_csv(path)
        assert e.value.line == 1

    def test_label_out_of_range(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("f0,label\n0.5,0\n0.1,3\n")
        with pytest.raises(ParseError) as e:
            load_csv(path, n_classes=3)
        assert e.value.line == 3

    def test_missing_field(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("f0,f1,label\n0.5,1.0,0\n0.1,,1\n")
        with pytest.raises(ParseError) as e:
            load_csv(path)
        assert e.value.line == 3

    def test_matrix(self, tmp_path):
        path = tmp_path / "A.csv"
        path.write_text("0.5,0.1\n0.1,0.25\n")
        np.testing.assert_array_equal(load_matrix_csv(path), [[0.5, 0.1], [0.1, 0.25]])


class TestReportWriter:
    def setup_method(self):
        self.table = pd.DataFrame({"alpha": [1.0, 0.3], "ok": [True, False], "n": [1, 2]})

    def _write(self, out_dir):
        report = ReportWriter("sweep-alpha", {"seeds": [0, 1]}, out_dir)
        report.add_table("sweep", self.table)
        report.disclaimer = "evidence, not proof"
        report.set_verdict(True, final=np.float64(0.01))
        return report.write()

    def test_layout(self, tmp_path):
        path = self._write(tmp_path)
        data = json.loads(path.read_text())
        assert data["schema"] == "v1"
        assert data["passed"] is True
        assert data["disclaimer"] == "evidence, not proof"
        assert data["tables"]["sweep"][1] == {"alpha": 0.3, "ok": False, "n": 2}
        assert (tmp_path / "sweep.csv").read_text() == "alpha,ok,n\n1.0,True,1\n0.3,False,2\n"

    def test_rewrite_is_byte_identical(self, tmp_path):
        first = self._write(tmp_path / "a").read_bytes()
        second = self._write(tmp_path / "b").read_bytes()
        assert first == second

    def test_no_out_dir(self):
        assert ReportWriter("check-symmetry", {}).write() is None

    def test_to_jsonable(self):
        assert to_jsonable({"x": np.array([1.5, np.nan]), "k": np.int64(3)}) == {"x": [1.5, None], "k": 3}
