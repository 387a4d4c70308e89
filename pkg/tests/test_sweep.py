"""Sweep driver, persistence, and grid-series analysis."""

import os

import numpy as np
import pytest

from broucke.stability import StabilityRecord
from broucke.sweep import (CSV_COLUMNS, SweepConfig, analyze_mass,
                           degeneracy_census, emit_outputs, mass_grid,
                           read_records_csv, run_sweep, series_crossings,
                           write_records_csv)


def small_cfg(tmp_path, **kw):
    defaults = dict(m1_min=0.64, m1_max=0.66, step=0.01,
                    out_dir=str(tmp_path / "out"), svg=True)
    defaults.update(kw)
    return SweepConfig(**defaults)


@pytest.fixture(scope="module")
def small_records(tmp_path_factory):
    cfg = SweepConfig(m1_min=0.64, m1_max=0.66, step=0.01,
                      out_dir=str(tmp_path_factory.mktemp("sweep")))
    return cfg, run_sweep(cfg)


def test_default_grid():
    grid = mass_grid(SweepConfig())
    assert len(grid) == 293
    assert grid[0] == 0.005 and grid[-1] == 1.465
    assert np.allclose(np.diff(grid), 0.005)


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        SweepConfig(m1_min=0.0)
    with pytest.raises(ValueError):
        SweepConfig(m1_min=0.8, m1_max=0.5)
    with pytest.raises(ValueError):
        SweepConfig(step=0.0)


def test_run_sweep_small(small_records):
    _, records = small_records
    assert [r.m1 for r in records] == [0.64, 0.65, 0.66]
    assert all(r.status == "ok" for r in records)
    assert all(r.spectral_4df for r in records)
    assert all(2.0 * r.m1 + r.m2 == 3.0 for r in records)


def test_failed_point_isolated(tmp_path):
    # A grid containing an out-of-range mass yields a failure record but
    # the sweep still completes.
    cfg = small_cfg(tmp_path, m1_min=1.46, m1_max=1.48, step=0.02, svg=False)
    records = run_sweep(cfg)
    assert len(records) == 2
    assert records[0].status == "ok"
    assert records[1].status.startswith("failed:")
    assert np.isnan(records[1].zeta4)


def test_emit_outputs(small_records, tmp_path):
    cfg, records = small_records
    written = emit_outputs(records, cfg)
    names = {os.path.basename(p) for p in written}
    assert {"records.csv", "zeta4.dat", "k11.dat", "e.dat", "eig2.dat",
            "e_eig2.dat", "zeta4.svg", "k11.svg", "e.svg", "eig2.svg",
            "e_eig2.svg"} <= names
    csv_path = os.path.join(cfg.out_dir, "records.csv")
    with open(csv_path) as fh:
        lines = fh.read().splitlines()
    assert len(lines) == len(records) + 1
    assert lines[0] == ",".join(CSV_COLUMNS)
    pair = os.path.join(cfg.out_dir, "e_eig2.dat")
    with open(pair) as fh:
        row = fh.readline().split()
    assert len(row) == 3

    import xml.etree.ElementTree as ET
    for name in names:
        if name.endswith(".svg"):
            ET.parse(os.path.join(cfg.out_dir, name))


def test_csv_round_trip(small_records, tmp_path):
    _, records = small_records
    path = str(tmp_path / "records.csv")
    write_records_csv(records, path)
    back = read_records_csv(path)
    for a, b in zip(records, back):
        assert a == b


def test_csv_determinism(small_records, tmp_path):
    cfg, _ = small_records
    cfg_a = SweepConfig(m1_min=cfg.m1_min, m1_max=cfg.m1_max, step=cfg.step,
                        out_dir=str(tmp_path / "a"), svg=False)
    cfg_b = SweepConfig(m1_min=cfg.m1_min, m1_max=cfg.m1_max, step=cfg.step,
                        out_dir=str(tmp_path / "b"), svg=False)
    emit_outputs(run_sweep(cfg_a), cfg_a)
    emit_outputs(run_sweep(cfg_b), cfg_b)
    with open(os.path.join(cfg_a.out_dir, "records.csv"), "rb") as fh:
        blob_a = fh.read()
    with open(os.path.join(cfg_b.out_dir, "records.csv"), "rb") as fh:
        blob_b = fh.read()
    assert blob_a == blob_b


def test_resume_recomputes_only_failures(small_records, tmp_path):
    cfg, records = small_records
    out = str(tmp_path / "resume")
    cfg2 = SweepConfig(m1_min=cfg.m1_min, m1_max=cfg.m1_max, step=cfg.step,
                       out_dir=out, svg=False)
    broken = [StabilityRecord(**{f: getattr(r, f) for f in
                                 StabilityRecord.__dataclass_fields__})
              for r in records]
    broken[1].status = "failed: synthetic"
    emit_outputs(broken, cfg2)
    cfg3 = SweepConfig(m1_min=cfg.m1_min, m1_max=cfg.m1_max, step=cfg.step,
                       out_dir=out, svg=False, resume=True)
    resumed = run_sweep(cfg3)
    assert all(r.status == "ok" for r in resumed)
    # Untouched rows come back from the CSV bit-for-bit.
    assert resumed[0] == read_records_csv(
        os.path.join(out, "records.csv"))[0]


def test_analyze_mass_failure_record():
    rec = analyze_mass(1.49)
    assert rec.status.startswith("failed: OrbitError")
    assert rec.m1 == 1.49


def test_worker_pool_matches_serial(small_records, tmp_path):
    cfg, serial = small_records
    cfg2 = SweepConfig(m1_min=cfg.m1_min, m1_max=cfg.m1_max, step=cfg.step,
                       out_dir=str(tmp_path / "pool"), svg=False, workers=2)
    pooled = run_sweep(cfg2)
    assert pooled == serial


# ---------------------------------------------------------------------------
# series analysis on synthetic records
# ---------------------------------------------------------------------------

def _fake_records(ms, es, eig2s):
    out = []
    for m, e, g in zip(ms, es, eig2s):
        r = StabilityRecord(m1=m, m2=3 - 2 * m)
        r.e, r.eig2 = e, g
        r.spectral_4df = abs(e) <= 1 and abs(g) <= 1
        out.append(r)
    return out


def test_series_crossings_synthetic():
    ms = [0.70, 0.705, 0.71, 0.715]
    recs = _fake_records(ms, [0.90, 0.90, 0.90, 0.90],
                         [0.85, 0.89, 0.905, 0.95])
    assert series_crossings(recs, 0.70, 0.715) == [(0.705, 0.71)]


def test_census_detects_sign_change_roots():
    # e + eig2 crosses zero between the first two points (kind d), and
    # e - eig2 between the last two (kind a); e stays away from 0, +-1.
    ms = [0.595, 0.600, 0.705, 0.710]
    recs = _fake_records(ms, [0.95, 0.95, 0.90, 0.90],
                         [-0.97, -0.91, 0.88, 0.92])
    census = degeneracy_census(recs, 0.595, 0.715, delta=1e-3)
    assert [(k, lo, hi) for k, lo, hi in census] == \
        [("d", 0.595, 0.600), ("a", 0.705, 0.710)]


def test_census_merges_pointwise_and_interval_hits():
    ms = [0.70, 0.705, 0.71]
    recs = _fake_records(ms, [0.9, 0.9, 0.9], [0.85, 0.8995, 0.93])
    census = degeneracy_census(recs, 0.70, 0.71, delta=1e-3)
    # Pointwise |e - eig2| < delta at 0.705 merges with the adjacent
    # sign-change interval (0.705, 0.71).
    assert len(census) == 1
    kinds, lo, hi = census[0]
    assert "a" in kinds and lo == 0.705 and hi == 0.71


def test_census_ignores_failed_records():
    ms = [0.60, 0.605, 0.61]
    recs = _fake_records(ms, [0.95, 0.95, 0.95], [0.2, 2.0, 0.3])
    recs[1].status = "failed: synthetic"
    # The failed middle record would fake two e - eig2 sign changes; with
    # it dropped the remaining pair brackets no root at all.
    assert degeneracy_census(recs, 0.6, 0.61, delta=1e-3) == []
    recs[1].status = "ok"
    assert len(degeneracy_census(recs, 0.6, 0.61, delta=1e-3)) > 0
