import json
import os

import numpy as np
import pytest

from fermicirc.cli import main


def write_config(path, **kw):
    cfg = dict(model_kind="incoherent", values=[0.05, 0.3], M_values=[4],
               L_values=[8], realizations=2, base_seed=3)
    cfg.update(kw)
    path.write_text(json.dumps(cfg))
    return str(path)


class TestExitCodes:
    def test_missing_config_is_usage_error(self, tmp_path):
        rc = main(["scan-entanglement", "--config", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path / "out")])
        assert rc == 2

    def test_bad_json_is_usage_error(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{broken")
        rc = main(["scan-entanglement", "--config", str(cfg),
                   "--out", str(tmp_path / "out")])
        assert rc == 2

    def test_wrong_task_is_usage_error(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", task="conductivity")
        rc = main(["scan-entanglement", "--config", cfg,
                   "--out", str(tmp_path / "out")])
        assert rc == 2

    def test_unknown_figure_is_usage_error(self, tmp_path):
        rc = main(["reproduce-figure", "fig99", "--out", str(tmp_path / "out")])
        assert rc == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2


class TestScans:
    def test_entanglement_scan_writes_outputs(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        out = tmp_path / "out"
        assert main(["scan-entanglement", "--config", cfg, "--out", str(out)]) == 0
        assert (out / "entanglement.csv").exists()
        assert (out / "summary.csv").exists()
        assert (out / "manifest.json").exists()

    def test_rerun_identical_csv(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["scan-entanglement", "--config", cfg, "--out", str(a)]) == 0
        assert main(["scan-entanglement", "--config", cfg, "--out", str(b)]) == 0
        assert (a / "entanglement.csv").read_bytes() == (b / "entanglement.csv").read_bytes()

    def test_seed_override(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        a, b = tmp_path / "a", tmp_path / "b"
        main(["scan-entanglement", "--config", cfg, "--out", str(a)])
        main(["scan-entanglement", "--config", cfg, "--out", str(b), "--seed", "99"])
        assert (a / "entanglement.csv").read_bytes() != (b / "entanglement.csv").read_bytes()

    def test_conductivity_scan(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", model_kind="coherent",
                           values=[0.08 * np.pi], M_values=[10], L_values=[2],
                           realizations=2)
        out = tmp_path / "out"
        assert main(["scan-conductivity", "--config", cfg, "--out", str(out)]) == 0
        header = (out / "transport.csv").read_text().split("\n")[0]
        assert header.startswith("realization,M,L,p_or_phi,g_sample")

    def test_invariant_scan(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", values=[0.03], M_values=[8],
                           L_values=[30], realizations=2)
        out = tmp_path / "out"
        assert main(["scan-invariant", "--config", cfg, "--out", str(out)]) == 0
        rows = (out / "transport.csv").read_text().strip().split("\n")[1:]
        assert all(row.split(",")[8] in ("-1", "1") for row in rows)


class TestCollapseCommand:
    def test_collapse_on_synthetic_summary(self, tmp_path):
        rows = ["p_or_phi,M,mean_S_half,stderr2_S_half"]
        for phi, factor in [(0.1, 1.0), (0.2, 2.0)]:
            for M in np.geomspace(5, 120, 10):
                rows.append(f"{phi},{M},{np.log1p(M / factor)},0.01")
        src = tmp_path / "summary.csv"
        src.write_text("\n".join(rows) + "\n")
        out = tmp_path / "out"
        rc = main(["collapse", "--input", str(src), "--out", str(out)])
        assert rc == 0
        assert (out / "collapse.csv").exists()
        assert (out / "master_curve.csv").exists()
        assert (out / "plot_collapse.gp").exists()
        table = dict(line.split(",") for line
                     in (out / "collapse.csv").read_text().strip().split("\n")[1:])
        ratio = float(table["0.2"]) / float(table["0.1"])
        assert abs(ratio - 2.0) / 2.0 < 0.1

    def test_missing_column_is_usage_error(self, tmp_path):
        src = tmp_path / "summary.csv"
        src.write_text("a,b\n1,2\n")
        rc = main(["collapse", "--input", str(src), "--out", str(tmp_path / "o")])
        assert rc == 2


class TestVerify:
    def test_verify_passes_quickly(self, capsys):
        import time
        t0 = time.time()
        rc = main(["verify"])
        elapsed = time.time() - t0
        out = capsys.readouterr().out
        assert rc == 0
        assert elapsed < 60
        assert out.count("[PASS]") == 5

    def test_verify_reports_identically_twice(self, capsys):
        main(["verify"])
        first = capsys.readouterr().out
        main(["verify"])
        second = capsys.readouterr().out
        strip = lambda s: [line.split(" (")[0] for line in s.strip().split("\n")]
        assert strip(first) == strip(second)

    def test_fault_injection_fails_oracle_suite(self, monkeypatch, capsys):
        # corrupt the gate convention and expect the oracle check to catch it
        import fermicirc.verify as verify_mod
        import fermicirc.gaussian as gaussian_mod

        def corrupted(z):
            A, B = original(z)
            return -A, B

        original = gaussian_mod.gate_blocks
        monkeypatch.setattr(gaussian_mod, "gate_blocks", corrupted)
        results = verify_mod.run_verification(verbose=False)
        by_name = {name: ok for name, ok, _d in results}
        assert not by_name["oracle equivalence (M<=4)"]


class TestReproduceFigure:
    def test_preset_tables_exist(self):
        from fermicirc.presets import FIGURES
        assert set(FIGURES) == {"fig4", "fig5", "fig6", "fig7", "figB"}
        specs = FIGURES["fig4"]()
        assert specs["entanglement"].M_values == [20, 32, 40]
        assert FIGURES["fig5"]()["conductivity"].aspect == "M=5L"

    def test_shrunken_preset_runs_end_to_end(self, tmp_path, monkeypatch):
        # shrink fig4 to seconds while exercising the full figure pipeline
        import fermicirc.presets as presets
        from fermicirc.ensemble import ScanSpec, TASK_ENTANGLEMENT

        def tiny_fig4(base_seed=1):
            return {"entanglement": ScanSpec(
                task=TASK_ENTANGLEMENT, model_kind="incoherent",
                values=[0.05], M_values=[4], L_values=[8],
                realizations=2, base_seed=base_seed)}

        monkeypatch.setitem(presets.FIGURES, "fig4", tiny_fig4)
        monkeypatch.setattr("fermicirc.cli.FIGURES", presets.FIGURES)
        out = tmp_path / "fig4"
        rc = main(["reproduce-figure", "fig4", "--out", str(out)])
        assert rc == 0
        assert (out / "entanglement" / "summary.csv").exists()
        assert (out / "plot_fig4.gp").exists()
