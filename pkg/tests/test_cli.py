import csv
import json

import numpy as np
import pytest

from dnlfm_isac.cli import main


def read(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_gen_waveform_dnlfm(tmp_path, capsys):
    assert main(["gen-waveform", "--out", str(tmp_path)]) == 0
    rows = read(tmp_path / "waveform_dnlfm_hamming.csv")
    assert len(rows) == 1024
    assert list(rows[0]) == ["n", "t_n", "f_n", "phase_rad", "re", "im"]
    mag = np.array([abs(complex(float(r["re"]), float(r["im"]))) for r in rows])
    np.testing.assert_allclose(mag, 1.0, atol=1e-14)
    assert "spectral_nmse" in capsys.readouterr().out
    manifest = json.loads((tmp_path / "gen-waveform.manifest.json").read_text())
    assert {"config_sha256", "master_seed", "tool_version"} <= set(manifest)


def test_rect_dnlfm_file_equals_lfm_file(tmp_path):
    main(["gen-waveform", "--out", str(tmp_path), "--kind", "dnlfm", "--window", "rectangular"])
    main(["gen-waveform", "--out", str(tmp_path), "--kind", "lfm", "--window", "rectangular"])
    a = read(tmp_path / "waveform_dnlfm_rectangular.csv")
    b = read(tmp_path / "waveform_lfm_rectangular.csv")
    for ra, rb in zip(a, b):
        assert abs(complex(float(ra["re"]), float(ra["im"])) - complex(float(rb["re"]), float(rb["im"]))) < 1e-10


def test_lfm_small_phase_column(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("waveform: {N: 8}\nframe: {cp_len: 2}\nofdm_segments: 8\n")
    main(["gen-waveform", "--config", str(cfg), "--out", str(tmp_path), "--kind", "lfm"])
    rows = read(tmp_path / "waveform_lfm_hamming.csv")
    n = np.arange(8)
    np.testing.assert_allclose([float(r["phase_rad"]) for r in rows], np.pi * n**2 / 8 - np.pi * n, atol=1e-12)


def test_unknown_kind_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["gen-waveform", "--out", str(tmp_path), "--kind", "square"])
    assert info.value.code == 2


def test_bad_config_is_usage_error(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("cfar: {pfa: 2}\n")
    with pytest.raises(SystemExit) as info:
        main(["fig4", "--config", str(cfg), "--out", str(tmp_path)])
    assert info.value.code == 2


def test_fig4_and_beam_pattern(tmp_path):
    main(["fig4", "--out", str(tmp_path)])
    metrics = {r["mode"]: r for r in read(tmp_path / "fig4_metrics.csv")}
    assert float(metrics["delta"]["pslr_db"]) > 20 and float(metrics["delta"]["islr_db"]) > 20
    assert len(read(tmp_path / "fig4_beam.csv")) == 4096
    main(["beam-pattern", "--out", str(tmp_path), "--window", "rectangular", "--mode", "rx_only", "--elements", "8"])
    assert len(read(tmp_path / "beam_rx_only_rectangular_L8.csv")) == 4096


def test_mismatch_loss_command(tmp_path, capsys):
    main(["mismatch-loss", "--out", str(tmp_path), "--window", "hann", "--length", "64"])
    assert "1.7609" in capsys.readouterr().out


def test_fig2_rows(tmp_path):
    main(["fig2", "--out", str(tmp_path)])
    rows = read(tmp_path / "fig2_cm.csv")
    assert len(rows) == 28
    sweep = [r for r in rows if r["window"].startswith("cosine_alpha")]
    assert len(sweep) == 26
    assert len({r["cm_dnlfm_db"] for r in rows}) == 1


def test_fig3_ordering(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("fig3: {granularity_factors: [1, 4, 16], repeats: 1}\n")
    main(["fig3", "--config", str(cfg), "--out", str(tmp_path)])
    rows = read(tmp_path / "fig3_efficiency.csv")
    nmse = {(r["method"], int(r["parameter"])): float(r["spectral_nmse"]) for r in rows}
    assert nmse[("dnlfm", 1024)] <= nmse[("ofdm_nlfm", 16)] / 100
    assert nmse[("nlfm_oracle", 1024)] > nmse[("dnlfm", 1024)]


def test_fig1_byte_stable(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("preset: desk\nfig1: {schemes: [lfm_rx, dnlfm], snr_db: [-56, -52], trials: 12}\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        main(["fig1", "--config", str(cfg), "--out", str(out), "--seed", "9"])
        outs.append((out / "fig1_pd.csv").read_bytes())
    assert outs[0] == outs[1]
    rows = read(tmp_path / "run0" / "fig1_pd.csv")
    assert [r["scheme"] for r in rows] == ["lfm_rx", "lfm_rx", "dnlfm", "dnlfm"]
    assert all(r["trials"] == "12" for r in rows)
