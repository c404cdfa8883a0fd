"""Tests for result rows, persistence and run configuration"""

import json

import pytest

from src.core.exceptions import EmitError, UsageError
from src.data.models import BoundCheckRow, ExperimentConfig, ExperimentKind, RunReport, SummaryRow, Verdict
from src.data.results import check_format, create_metadata, emit, load_rows

META = create_metadata("numpy.random.Philox", 7, 10, "1.0.0", experiment="table_norms")


def summary_rows():
    return [
        SummaryRow("toeplitz", 32, "norm1", 10.5, 12.25, 14.0, 0.1 + 0.2),
        SummaryRow("circulant", 64, "kappa2", 1.0, 1e-300, 3.5e12, 0.0),
    ]


def bound_rows():
    return [
        BoundCheckRow("sv_general", 8, "n=8,mu=0,sigma=1,l=8", 0.0, 0.0, 0.0, 0.0, Verdict.RESPECTED, "sigma_min"),
        BoundCheckRow("norm_general", 8, "n=8,mu=0,sigma=1,h=8", 1.0, 0.0, 0.0, 0.0, Verdict.VACUOUS, "norm2"),
        BoundCheckRow("circulant_norm", 8, "n=8,mu=0,sigma=1", 2.0, 0.1, 0.3, 0.01, Verdict.VIOLATED, "norm2"),
    ]


class TestCsv:
    def test_empty_rows_give_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit([], "csv", str(path), META)
        lines = path.read_text().splitlines()
        data = [line for line in lines if not line.startswith("#")]
        assert data == ["ensemble,n,metric,min,mean,max,std"]
        assert "# seed: 7" in lines

    def test_one_row_in_declared_order(self, tmp_path):
        path = tmp_path / "one.csv"
        emit([SummaryRow("general", 4, "norm2", 1.0, 2.0, 3.0, 0.5)], "csv", str(path))
        lines = path.read_text().splitlines()
        assert lines == ["ensemble,n,metric,min,mean,max,std", "general,4,norm2,1.0,2.0,3.0,0.5"]

    def test_summary_rows_reload_exactly(self, tmp_path):
        path = tmp_path / "rows.csv"
        emit(summary_rows(), "csv", str(path), META)
        assert load_rows(str(path)) == summary_rows()

    def test_bound_rows_reload_exactly(self, tmp_path):
        path = tmp_path / "bounds.csv"
        emit(bound_rows(), "csv", str(path), META)
        assert load_rows(str(path)) == bound_rows()

    def test_stdout(self, capsys):
        assert emit(summary_rows(), "csv", None, META) is None
        out = capsys.readouterr().out
        assert "ensemble,n,metric,min,mean,max,std" in out
        assert "# generator: numpy.random.Philox" in out


class TestJson:
    def test_rows_and_sidecar(self, tmp_path):
        path = tmp_path / "rows.json"
        emit(bound_rows(), "json", str(path), META)
        records = json.loads(path.read_text())
        assert [r["verdict"] for r in records] == ["respected", "vacuous", "violated"]
        meta = json.loads((tmp_path / "rows.json.meta.json").read_text())
        assert meta["seed"] == 7 and meta["trials"] == 10
        assert load_rows(str(path)) == bound_rows()


class TestErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(EmitError):
            load_rows(str(tmp_path / "absent.csv"))

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(EmitError) as info:
            emit(summary_rows(), "csv", str(blocker / "out.csv"))
        assert "path" in info.value.details

    def test_format(self):
        assert check_format("JSON").value == "json"
        with pytest.raises(UsageError):
            check_format("xml")


class TestExperimentConfig:
    def config(self, **overrides):
        values = dict(experiment=ExperimentKind.TABLE_NORMS, ensembles=["toeplitz"], sizes=[8, 16], trials=3)
        values.update(overrides)
        return ExperimentConfig(**values)

    def test_valid(self):
        config = self.config().validate()
        assert config.to_dict()["sizes"] == [8, 16]

    @pytest.mark.parametrize("overrides", [
        dict(trials=0),
        dict(sizes=[]),
        dict(sizes=[16, 8]),
        dict(sizes=[8, 8]),
        dict(sizes=[0, 4]),
        dict(norm=3),
        dict(jobs=0),
        dict(seed=-1),
        dict(experiment=ExperimentKind.BOUND_CHECK, bound=None, grid=[1.0]),
        dict(experiment=ExperimentKind.BOUND_CHECK, bound="sv_general", grid=[]),
    ])
    def test_invalid(self, overrides):
        with pytest.raises(UsageError):
            self.config(**overrides).validate()


def test_report_violation_flag():
    assert not RunReport(rows=summary_rows()).violated
    assert not RunReport(rows=bound_rows()[:2]).violated
    assert RunReport(rows=bound_rows()).violated
