"""Delimited output, plotting, and the eigenmode table."""

import warnings

import numpy as np
import pytest

from circsync.eom import eigenfrequencies, build_system
from circsync.netlist import parse_netlist
from circsync.presets import preset
from circsync.quantum import TimeSeries
from circsync.report import eigen_table, read_csv, write_csv, write_eigen_csv, write_svg
from circsync.runner import run_scenario
from circsync.topology import assemble_matrices

T_RES = 2.0 * np.pi * np.sqrt(1e-9 * 1.01e-12)


@pytest.fixture(scope="module")
def short_run():
    p = preset("regime1")
    series, _, _ = run_scenario(p.netlist, p.config.override(t_end=8 * T_RES))
    return series


@pytest.fixture(scope="module")
def aux_run():
    p = preset("pathological-c")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        series, _, _ = run_scenario(p.netlist,
                                    p.config.override(t_end=8 * T_RES))
    return series


class TestCsv:
    def test_round_trip_is_exact(self, short_run, tmp_path):
        path = tmp_path / "run.csv"
        write_csv(short_run, path)
        back = read_csv(path)
        assert np.array_equal(back.times, short_run.times)
        assert np.array_equal(back.q, short_run.q)
        assert np.array_equal(back.phi, short_run.phi)
        assert np.array_equal(back.energy, short_run.energy)
        assert np.array_equal(back.dissipation, short_run.dissipation)
        assert np.array_equal(back.scales, short_run.scales)
        assert back.t_ref == short_run.t_ref

    def test_metadata_round_trip_with_types(self, short_run, tmp_path):
        path = tmp_path / "run.csv"
        write_csv(short_run, path)
        meta = read_csv(path).metadata
        assert meta["source"] == "netlist"
        assert meta["method"] == "linear-propagator"
        assert isinstance(meta["n_dof"], int) and meta["n_dof"] == 2
        assert isinstance(meta["dt"], float)
        assert meta["dt"] == short_run.metadata["dt"]
        assert meta["k_j"] == short_run.metadata["k_j"]

    def test_layout(self, short_run, tmp_path):
        path = tmp_path / "run.csv"
        write_csv(short_run, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == f"# source: {short_run.metadata['source']}"
        assert lines[1].startswith("# method: ")
        header_idx = next(i for i, line in enumerate(lines)
                          if not line.startswith("#"))
        assert lines[header_idx] == "t,t_norm,q1,phi1,q2,phi2,energy,dissipation"
        first = [float(v) for v in lines[header_idx + 1].split(",")]
        assert first[0] == 0.0 and first[1] == 0.0
        some = [float(v) for v in lines[header_idx + 51].split(",")]
        assert some[1] == pytest.approx(some[0] / short_run.t_ref, rel=1e-12)

    def test_aux_current_column(self, aux_run, tmp_path):
        path = tmp_path / "aux.csv"
        write_csv(aux_run, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        header = next(line for line in lines if not line.startswith("#"))
        assert header.endswith(",aux_current")
        back = read_csv(path)
        assert back.aux_current is not None
        assert np.array_equal(back.aux_current, aux_run.aux_current)

    def test_empty_series_rejected(self, tmp_path):
        empty = TimeSeries(times=np.array([]), q=np.zeros((0, 1)),
                           phi=np.zeros((0, 1)), energy=np.array([]),
                           dissipation=np.array([]), scales=np.ones((1, 3)))
        with pytest.raises(ValueError):
            write_csv(empty, tmp_path / "empty.csv")

    def test_read_rejects_headerless_file(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# only: comments\n", encoding="utf-8")
        with pytest.raises(ValueError, match="no data"):
            read_csv(path)


class TestSvg:
    def test_writes_valid_svg(self, short_run, tmp_path):
        path = tmp_path / "plot.svg"
        write_svg(short_run, (1, 2), path)
        text = path.read_text(encoding="utf-8")
        assert text.lstrip().startswith("<?xml")
        assert "<svg" in text and "</svg>" in text

    def test_too_short_rejected(self, tmp_path):
        stub = TimeSeries(times=np.array([0.0]), q=np.zeros((1, 1)),
                          phi=np.zeros((1, 1)), energy=np.zeros(1),
                          dissipation=np.zeros(1), scales=np.ones((1, 3)))
        with pytest.raises(ValueError):
            write_svg(stub, (1, 1), tmp_path / "x.svg")

    def test_dof_out_of_range_rejected(self, short_run, tmp_path):
        with pytest.raises(ValueError, match="range"):
            write_svg(short_run, (1, 5), tmp_path / "x.svg")


class TestEigenTable:
    def test_table_layout(self, tmp_path):
        model = assemble_matrices(parse_netlist(preset("regime1").netlist))
        eigen = eigenfrequencies(build_system(model))
        table = eigen_table(eigen)
        lines = table.strip().splitlines()
        assert lines[0] == "mode,damping_rate,angular_frequency,frequency_hz"
        assert len(lines) == 1 + len(eigen.modes)
        for line, (damping, omega) in zip(lines[1:], eigen.modes):
            cells = line.split(",")
            assert float(cells[1]) == damping
            assert float(cells[2]) == omega
            assert float(cells[3]) == pytest.approx(omega / (2 * np.pi),
                                                    rel=1e-15)
        path = tmp_path / "eigen.csv"
        write_eigen_csv(eigen, path)
        assert path.read_text(encoding="utf-8") == table
