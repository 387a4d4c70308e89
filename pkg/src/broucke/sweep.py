"""Mass-grid sweep driver, persistence, and series analysis.

The sweep walks the m1 grid with warm-start continuation (outward from
m1 = 0.5, each converged zeta4 seeding its neighbor), then analyzes each
grid point independently, optionally on a worker pool.  Output is a
deterministic CSV (fixed column order, fixed float formatting, no
timestamps) plus per-figure two-column plot data and minimal SVG plots.
"""

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import MassParams
from .errors import BrouckeError
from .orbit import find_orbit
from .stability import DEGENERACY_DELTA, StabilityRecord, analyze_orbit

CSV_COLUMNS = [
    "m1", "m2", "zeta4", "s0", "t_period", "k11", "a", "b", "c", "d",
    "e", "eig2", "res_left_eig", "res_sparsity", "res_symplectic",
    "gamma_drift", "a2_drift", "stable_2df", "spectral_4df", "linear_4df",
    "degenerate_cause", "status",
]

_BOOL_COLUMNS = frozenset({"stable_2df", "spectral_4df", "linear_4df"})
_STR_COLUMNS = frozenset({"degenerate_cause", "status"})

ENV_OUT_DIR = "BROUCKE_OUT_DIR"


@dataclass
class SweepConfig:
    m1_min: float = 0.005
    m1_max: float = 1.465
    step: float = 0.005
    E: float = -1.0
    tol: float = 1e-12
    delta: float = DEGENERACY_DELTA
    out_dir: str = None
    workers: int = 1
    resume: bool = False
    svg: bool = True

    def __post_init__(self):
        if not (0.0 < self.m1_min <= self.m1_max < 1.5):
            raise ValueError("need 0 < m1_min <= m1_max < 1.5")
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.out_dir is None:
            self.out_dir = os.environ.get(ENV_OUT_DIR, "broucke_out")


def mass_grid(cfg):
    """Grid values m1_min, m1_min + step, ... up to m1_max inclusive."""
    n = int(math.floor((cfg.m1_max - cfg.m1_min) / cfg.step + 1e-9)) + 1
    return np.array([round(cfg.m1_min + k * cfg.step, 12) for k in range(n)])


def analyze_mass(m1, E=-1.0, guess=None, tol=1e-12, delta=DEGENERACY_DELTA):
    """Solve and classify one grid point; failures become failed records."""
    try:
        orb = find_orbit(MassParams(m1=m1, E=E), guess=guess, tol=tol)
        _, _, record = analyze_orbit(orb, tol=tol, delta=delta)
        return record
    except BrouckeError as exc:
        rec = StabilityRecord(m1=m1, m2=3.0 - 2.0 * m1)
        rec.status = f"failed: {type(exc).__name__}: {exc}"
        return rec


def _analyze_args(args):
    return analyze_mass(*args)


def continuation_guesses(cfg, grid, known=None, log=None):
    """Sequential warm-start pre-pass: zeta4 guesses for every grid mass.

    Starts at the grid point nearest m1 = 0.5 and walks outward in both
    directions, seeding each solve with its neighbor's zeta4.  A failed
    point passes the last good guess onward (find_orbit falls back to a
    fresh bracketing scan when the warm start misleads).  ``known`` maps
    rounded grid masses to already-converged zeta4 values (resume case);
    those points are not re-solved.
    """
    anchor = int(np.argmin(np.abs(grid - 0.5)))
    guesses = [None] * len(grid)
    known = known or {}

    def walk(indices):
        prev = None
        for i in indices:
            key = round(float(grid[i]), 12)
            if key in known:
                guesses[i] = prev = known[key]
                continue
            try:
                orb = find_orbit(MassParams(m1=float(grid[i]), E=cfg.E),
                                 guess=prev, tol=cfg.tol)
                guesses[i] = prev = orb.zeta4
            except BrouckeError as exc:
                guesses[i] = prev
                if log:
                    log(f"continuation failed at m1={grid[i]}: {exc}")

    walk(range(anchor, len(grid)))
    walk(range(anchor - 1, -1, -1))
    return guesses


def run_sweep(cfg, log=None):
    """One StabilityRecord per grid mass, ordered by m1.

    Failed solves appear as records with a failure cause, never as
    omissions; a failed point cannot abort the sweep.  Output is
    deterministic for a fixed config regardless of worker count (the
    warm-start guesses come from the sequential pre-pass).
    """
    grid = mass_grid(cfg)

    done = {}
    if cfg.resume:
        path = os.path.join(cfg.out_dir, "records.csv")
        if os.path.exists(path):
            for rec in read_records_csv(path):
                if rec.status in ("ok", "unreliable"):
                    done[round(rec.m1, 12)] = rec

    todo = [m for m in grid if round(float(m), 12) not in done]
    records = dict(done)
    if todo:
        known = {key: rec.zeta4 for key, rec in done.items()
                 if np.isfinite(rec.zeta4)}
        guesses = continuation_guesses(replace(cfg, resume=False), grid,
                                       known=known, log=log)
        guess_of = {round(float(m), 12): g for m, g in zip(grid, guesses)}
        tasks = [(float(m), cfg.E, guess_of[round(float(m), 12)], cfg.tol,
                  cfg.delta) for m in todo]
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(_analyze_args, tasks, chunksize=4))
        else:
            results = []
            for task in tasks:
                results.append(_analyze_args(task))
                if log:
                    r = results[-1]
                    log(f"m1={task[0]:.3f} e={r.e:+.6f} eig2={r.eig2:+.6f} "
                        f"[{r.status}]")
        for rec in results:
            records[round(rec.m1, 12)] = rec

    return [records[round(float(m), 12)] for m in grid]


# --------------------------------------------------------------------------
# Persistence.
# --------------------------------------------------------------------------

def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return f"{float(value):.17g}"


def write_records_csv(records, path):
    """Deterministic CSV: fixed columns, 17 significant digits."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([_format_value(getattr(rec, col))
                             for col in CSV_COLUMNS])


def read_records_csv(path):
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            kwargs = {}
            for col in CSV_COLUMNS:
                raw = row[col]
                if col in _BOOL_COLUMNS:
                    kwargs[col] = raw == "true"
                elif col in _STR_COLUMNS:
                    kwargs[col] = raw
                else:
                    kwargs[col] = float(raw)
            records.append(StabilityRecord(**kwargs))
    return records


def emit_outputs(records, cfg):
    """Write the CSV, two-column plot data, and optional SVG plots.

    Returns the list of file paths written.  The CSV is the canonical
    artifact; plot data files pair m1 with one series each, and the
    superimposed file carries both eigenvalue curves for the crossing
    figure.
    """
    if not records:
        raise ValueError("no records to emit")
    out = cfg.out_dir
    os.makedirs(out, exist_ok=True)
    written = []

    csv_path = os.path.join(out, "records.csv")
    write_records_csv(records, csv_path)
    written.append(csv_path)

    series = {
        "zeta4": [(r.m1, r.zeta4) for r in records],
        "k11": [(r.m1, r.k11) for r in records],
        "e": [(r.m1, r.e) for r in records],
        "eig2": [(r.m1, r.eig2) for r in records],
    }
    for name, rows in series.items():
        path = os.path.join(out, f"{name}.dat")
        with open(path, "w") as fh:
            for m, v in rows:
                fh.write(f"{m:.17g} {v:.17g}\n")
        written.append(path)

    pair_path = os.path.join(out, "e_eig2.dat")
    with open(pair_path, "w") as fh:
        for r in records:
            fh.write(f"{r.m1:.17g} {r.e:.17g} {r.eig2:.17g}\n")
    written.append(pair_path)

    if cfg.svg:
        from .plotting import write_line_svg
        m = [r.m1 for r in records]
        for name, label in (("zeta4", "Q4(0)"), ("k11", "k11"),
                            ("e", "e"), ("eig2", "a+d+1")):
            path = os.path.join(out, f"{name}.svg")
            write_line_svg(path, m, {label: [v for _, v in series[name]]},
                           xlabel="m1", ylabel=label)
            written.append(path)
        path = os.path.join(out, "e_eig2.svg")
        write_line_svg(path, m, {"e": [r.e for r in records],
                                 "a+d+1": [r.eig2 for r in records]},
                       xlabel="m1", ylabel="eigenvalue",
                       ylim=(-1.5, 1.5))
        written.append(path)
    return written


# --------------------------------------------------------------------------
# Series analysis over the grid.
# --------------------------------------------------------------------------

def _reliable(records, lo, hi):
    eps = 1e-9
    return [r for r in records
            if lo - eps <= r.m1 <= hi + eps
            and r.status in ("ok", "unreliable")
            and np.isfinite(r.e) and np.isfinite(r.eig2)]


def series_crossings(records, lo, hi):
    """Sign changes of e - eig2 between adjacent grid records in [lo, hi].

    Returns a list of (m_left, m_right) bracketing intervals; an exact
    grid-point zero counts as a degenerate bracket (m, m).
    """
    rs = _reliable(records, lo, hi)
    crossings = []
    for r0, r1 in zip(rs, rs[1:]):
        f0 = r0.e - r0.eig2
        f1 = r1.e - r1.eig2
        if f0 == 0.0:
            crossings.append((r0.m1, r0.m1))
        elif f0 * f1 < 0.0:
            crossings.append((r0.m1, r1.m1))
    if rs and (rs[-1].e - rs[-1].eig2) == 0.0:
        crossings.append((rs[-1].m1, rs[-1].m1))
    return crossings


def degeneracy_census(records, lo=0.595, hi=0.715, delta=DEGENERACY_DELTA):
    """Neighborhoods of repeated unit-circle multipliers on [lo, hi].

    A degeneracy occurs where one of the indicator functions has a root:
    e - eig2 (kind "a"), e -/+ 1 (kind "b"), e (kind "c"), e + eig2
    (kind "d", the supplementary-angle collision).  Roots are detected
    by sign change between adjacent grid records or by a pointwise hit
    |f| < delta; touching detections merge into one neighborhood.

    Returns a list of (kinds, m_lo, m_hi) with kinds a sorted string.
    """
    rs = _reliable(records, lo, hi)
    indicators = [
        ("a", lambda r: r.e - r.eig2),
        ("b", lambda r: r.e - 1.0),
        ("b", lambda r: r.e + 1.0),
        ("c", lambda r: r.e),
        ("d", lambda r: r.e + r.eig2),
    ]
    events = []  # (m_lo, m_hi, kind)
    for kind, f in indicators:
        vals = [f(r) for r in rs]
        for i, v in enumerate(vals):
            if abs(v) < delta:
                events.append((rs[i].m1, rs[i].m1, kind))
        for i in range(len(vals) - 1):
            if vals[i] * vals[i + 1] < 0.0:
                events.append((rs[i].m1, rs[i + 1].m1, kind))

    events.sort()
    clusters = []
    eps = 1e-9
    for m_lo, m_hi, kind in events:
        if clusters and m_lo <= clusters[-1][2] + eps:
            kinds, c_lo, c_hi = clusters[-1]
            clusters[-1] = (kinds | {kind}, c_lo, max(c_hi, m_hi))
        else:
            clusters.append(({kind}, m_lo, m_hi))
    return [("".join(sorted(kinds)), c_lo, c_hi)
            for kinds, c_lo, c_hi in clusters]
