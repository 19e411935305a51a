import json
import math

import numpy as np
import pytest

from dickebh import cli
from dickebh.cli import parse_args, execute, main, SCHEMAS


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


class TestParse:
    def test_spectrum_example(self):
        cfg = parse_args(["spectrum", "--atoms", "2", "--omega", "10",
                          "--n-max", "30", "-o", "spec.csv"])
        assert cfg.subcommand == "spectrum"
        assert cfg.get("atoms") == 2
        assert cfg.get("omega") == 10.0
        assert cfg.get("n_max") == 30
        assert cfg.get("output") == "spec.csv"
        assert cfg.get("format") == "csv"

    def test_phase_diagram_example(self):
        cfg = parse_args([
            "phase-diagram", "--atoms", "2", "--omega", "10", "--kappa-max", "0.2",
            "--mu-rel-min", "-1", "--mu-rel-max", "0", "--nk", "200", "--nmu", "200",
            "-o", "fig.csv",
        ])
        assert cfg.get("nk") == cfg.get("nmu") == 200
        assert cfg.get("kappa_min") == 0.0

    def test_zero_atoms_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["spectrum", "--atoms", "0", "--omega", "10", "-o", "x.csv"])
        assert exc.value.code == 2

    def test_unknown_flag_rejected(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["rabi", "--omega", "10", "--frobnicate", "3", "-o", "x.csv"])
        assert exc.value.code == 2

    def test_missing_required_flag(self):
        with pytest.raises(SystemExit):
            parse_args(["solve", "--kappa", "0.1", "-o", "x.csv"])  # no --mu-rel

    def test_non_numeric_value(self):
        with pytest.raises(SystemExit):
            parse_args(["rabi", "--omega", "ten", "-o", "x.csv"])

    def test_closed_forms_require_two_atoms(self):
        with pytest.raises(SystemExit):
            parse_args(["rabi", "--atoms", "3", "--omega", "10", "-o", "x.csv"])

    @pytest.mark.parametrize("argv", [
        ["spectrum", "--atoms", "2", "--omega", "10", "--n-max", "4", "-o", "s.csv"],
        ["mu-crit", "--omega", "10", "--omega-max", "20", "--n-min", "2", "--n-max", "5",
         "-o", "m.csv", "--format", "json"],
        ["solve", "--kappa", "0.05", "--mu-rel", "-0.85", "-o", "p.csv"],
        ["phase-diagram", "--kappa-max", "0.06", "--mu-rel-min", "-1.1",
         "--mu-rel-max", "-0.6", "--nk", "8", "--nmu", "9", "--jobs", "2", "-o", "g.csv"],
        ["lobe-tips", "--atoms-list", "2,3", "--lobe", "first", "-o", "t.csv"],
    ])
    def test_round_trip(self, argv):
        cfg = parse_args(argv)
        assert parse_args(cfg.to_argv()) == cfg

    def test_jobs_env_default(self, monkeypatch):
        monkeypatch.setenv("DICKEBH_JOBS", "3")
        cfg = parse_args(["phase-diagram", "--kappa-max", "0.1", "--mu-rel-min", "-1",
                          "--mu-rel-max", "0", "-o", "x.csv"])
        assert cfg.get("jobs") == 3


class TestExecute:
    def test_spectrum_schema_and_values(self, tmp_path):
        out = tmp_path / "spec.csv"
        assert main(["spectrum", "--omega", "10", "--omega-points", "3",
                     "--n-max", "2", "-o", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == SCHEMAS["spectrum"]
        assert len(rows) == 9  # manifolds 0..2 x 3 frequencies
        by_key = {(r[0], r[1]): r for r in rows}
        row = by_key[("2", "10")]
        assert float(row[3]) == pytest.approx(20.0)  # center branch 2x
        # vacuum and two-state manifolds carry nan where branches are absent
        assert math.isnan(float(by_key[("0", "10")][2]))
        assert math.isnan(float(by_key[("1", "10")][3]))

    def test_rabi_schema(self, tmp_path):
        out = tmp_path / "r.csv"
        assert main(["rabi", "--omega", "4", "--omega-points", "2", "--n-max", "2",
                     "-o", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == SCHEMAS["rabi"]
        assert float(rows[-1][2]) == pytest.approx(math.sqrt(40))  # n=2, x=4

    def test_mu_crit_emits_both_routes(self, tmp_path):
        out = tmp_path / "m.csv"
        assert main(["mu-crit", "--omega", "10", "--n-min", "2", "--n-max", "3",
                     "-o", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == SCHEMAS["mu-crit"]
        n2 = rows[0]
        assert float(n2[2]) == pytest.approx(-0.05656986, abs=1e-6)
        assert float(n2[3]) == pytest.approx(10 - 1 / math.sqrt(2), abs=1e-8)

    def test_mu_crit_absent_boundary_gives_nan(self, tmp_path):
        out = tmp_path / "m.csv"
        assert main(["mu-crit", "--omega", "0.5", "--n-min", "2", "--n-max", "2",
                     "-o", str(out)]) == 0
        _, rows = read_csv(out)
        assert math.isnan(float(rows[0][3]))

    def test_converge_schema_and_monotonicity(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["converge", "--kappa", "0.05", "--mu-rel", "-0.85",
                     "--cutoff-min", "8", "--cutoff-max", "14", "-o", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == SCHEMAS["converge"]
        energies = [float(r[1]) for r in rows]
        assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))

    def test_solve_writes_phase_row_and_sidecar(self, tmp_path):
        out = tmp_path / "sol.csv"
        assert main(["solve", "--kappa", "0.05", "--mu-rel", "-0.85", "-o", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == SCHEMAS["phase"]
        assert rows[0][5] == "SF"
        meta = json.loads((tmp_path / "sol.json").read_text())
        assert meta["tool"] == "dickebh"
        assert meta["subcommand"] == "solve"
        assert meta["params"]["kappa"] == 0.05

    def test_phase_diagram_csv_and_sidecar(self, tmp_path):
        out = tmp_path / "g.csv"
        assert main(["phase-diagram", "--kappa-max", "0.05", "--mu-rel-min", "-1.05",
                     "--mu-rel-max", "-0.75", "--nk", "6", "--nmu", "7",
                     "--n-max", "25", "--jobs", "2", "-o", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == SCHEMAS["phase"]
        assert len(rows) == 42
        # kappa-major ordering, mu fastest
        assert [r[1] for r in rows[:7]] == sorted({r[1] for r in rows}, key=float)
        meta = json.loads((tmp_path / "g.json").read_text())
        assert meta["grid"]["nk"] == 6
        assert any(b["n_below"] == 0 for b in meta["zero_hopping_boundaries"])
        assert isinstance(meta["lobes"], list)

    def test_determinism_across_jobs(self, tmp_path):
        args = ["phase-diagram", "--kappa-max", "0.04", "--mu-rel-min", "-1.0",
                "--mu-rel-max", "-0.8", "--nk", "5", "--nmu", "5", "--n-max", "20"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--jobs", "1", "-o", str(out1)]) == 0
        assert main(args + ["--jobs", "2", "-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_density_float_format_is_full_precision(self, tmp_path):
        out = tmp_path / "d.csv"
        assert main(["density", "--kappa-max", "0.002", "--mu-rel-min", "-0.9",
                     "--mu-rel-max", "-0.8", "--nk", "2", "--nmu", "3",
                     "--n-max", "20", "-o", str(out)]) == 0
        _, rows = read_csv(out)
        rho = float(rows[0][4])
        assert rows[0][4] == f"{rho:.17g}"  # 17 significant digits round-trip
        assert 2.3 < rho < 2.5

    def test_json_format_writes_records(self, tmp_path):
        out = tmp_path / "r.json"
        assert main(["rabi", "--omega", "2", "--omega-points", "2", "--n-max", "1",
                     "--format", "json", "-o", str(out)]) == 0
        records = json.loads(out.read_text())
        assert records[0]["n"] == 1
        assert (tmp_path / "r.meta.json").exists()

    def test_unwritable_output_exits_4(self, tmp_path):
        code = main(["rabi", "--omega", "2", "--omega-points", "2", "--n-max", "1",
                     "-o", str(tmp_path / "missing_dir" / "r.csv")])
        assert code == 4

    def test_numeric_failure_exits_3(self, monkeypatch):
        import dickebh.cli as climod
        from dickebh.eig import SolverError

        def boom(cfg):
            raise SolverError("synthetic")

        monkeypatch.setitem(climod._RUNNERS, "rabi", boom)
        assert main(["rabi", "--omega", "2", "-o", "r.csv"]) == 3

    def test_lobe_tips_small_run(self, tmp_path):
        out = tmp_path / "tips.csv"
        assert main(["lobe-tips", "--atoms-list", "2", "--lobe", "first",
                     "--nk", "10", "--nmu", "8", "--jobs", "2", "-o", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == SCHEMAS["lobe-tips"]
        assert rows[0][0] == "2"
        assert rows[0][1] == "2"  # first lobe above the vacuum is the doubly-excited manifold
        assert rows[0][3] == "true"
        assert float(rows[0][2]) == pytest.approx(0.046, abs=0.012)
