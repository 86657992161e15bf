import csv

import numpy as np
import pytest


@pytest.fixture()
def series_csv(tmp_path):
    """Synthetic run directory: series.csv (straight-line ier) + plateaus.json."""
    run = tmp_path / "run_a"
    run.mkdir()
    t = np.arange(0.0, 10.0001, 0.1)
    path = run / "series.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "ipr", "ier", "imb", "svn"] + [f"n_{i}" for i in range(1, 5)])
        for tv in t:
            ier = 0.3 * tv + 2.0
            writer.writerow([f"{tv:.12g}", "", f"{ier:.12g}", f"{0.1 * tv:.12g}", ""]
                            + [f"{0.25 * (k + tv):.12g}" for k in range(4)])
    (run / "plateaus.json").write_text(
        '{"plateaus": [{"t_start": 2.0, "t_end": 5.0, "height": 2.9}]}\n')
    return str(path)


@pytest.fixture()
def summary_csv(tmp_path):
    """Synthetic sweep summary over h x r_c x nu with one beyond-horizon tau."""
    path = tmp_path / "sweep_summary.csv"
    rows = []
    for h in (0.5, 10.0):
        for rc in (0.1, 0.5, 1.0):
            for nu in (1.0, 100.0):
                tau = "inf" if (h == 10.0 and rc <= 0.5) else f"{5.0 / rc:.12g}"
                rows.append([f"{h:g}", f"{rc:g}", f"{nu:g}", "2.5",
                             f"{1.0 / rc:.12g}", "0.2", f"{0.2 / rc:.12g}",
                             f"{h * rc:.12g}", tau,
                             "True" if tau == "inf" else "False", "0.1"])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "r_c", "nu", "delta", "D", "Z_J", "area", "P_h",
                         "tau", "horizon_flag", "ier_final"])
        writer.writerows(rows)
    return str(path)


@pytest.fixture()
def histogram_csv(tmp_path):
    path = tmp_path / "histogram.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["site", "bin_start", "count"])
        for site in range(3):
            for k in range(12):
                writer.writerow([site + 1, f"{0.25 * k:g}", (site + k) % 4])
    return str(path)


@pytest.fixture()
def out_png(tmp_path):
    return str(tmp_path / "out.png")

