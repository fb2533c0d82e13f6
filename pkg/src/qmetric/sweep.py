"""Parameter sweeps: distances of a family of ground states from a reference.

A sweep solves a reference state and a list of varied states of one model,
and records the wave-function distance D_psi and density distance D_rho of
each varied state from the reference. :func:`analyze` condenses a curve of
D_rho against D_psi into slope, linearity and monotonicity statistics.
"""

from __future__ import annotations

import csv
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import helium, hooke, hubbard, metric, numerics

CSV_HEADER = ["param", "d_psi", "d_rho", "d_psi_norm", "d_rho_norm", "overlap", "energy_ref", "energy_var", "flags"]
MONOTONIC_TOL = 1e-9
INITIAL_POINTS = 5
LINEAR_WINDOW = 0.8


class SweepValidationError(ValueError):
    """The sweep specification is inconsistent."""


class SolverFailure(RuntimeError):
    """A model solver failed for one parameter point."""

    def __init__(self, model: str, params: dict, cause: Exception):
        super().__init__(f"{model} solver failed at {params}: {cause}")
        self.model = model
        self.params = params
        self.cause = cause


@dataclass(frozen=True)
class Model:
    name: str
    params_type: type
    solve: Callable
    overlap: Callable
    density: Callable
    grid: Callable[[list], Any]
    label: Callable[[Any], str]
    sector: Callable[[Any], Any]


def _hubbard_solve(p: hubbard.HubbardParams, accuracy: dict):
    return hubbard.ground_state(p, seed=accuracy.get("seed", 0))


def _hooke_solve(p: hooke.HookeParams, accuracy: dict):
    return hooke.solve(p, n_points=accuracy.get("n_points", 4000))


def _helium_solve(p: helium.HeliumParams, accuracy: dict):
    return helium.solve_helium(p)


MODELS = {
    "hubbard": Model(
        "hubbard",
        hubbard.HubbardParams,
        _hubbard_solve,
        hubbard.lattice_overlap,
        lambda state, grid: hubbard.site_density(state),
        lambda params: None,
        lambda p: f"omega={p.omega:.6g}",
        lambda p: p.sector,
    ),
    "hooke": Model(
        "hooke",
        hooke.HookeParams,
        _hooke_solve,
        hooke.hooke_overlap,
        hooke.hooke_density,
        lambda params: hooke.default_density_grid([p.omega for p in params]),
        lambda p: f"omega={p.omega:.6g}",
        lambda p: 2,
    ),
    "helium": Model(
        "helium",
        helium.HeliumParams,
        _helium_solve,
        helium.helium_overlap,
        helium.helium_density,
        lambda params: helium.default_density_grid([p.Z for p in params]),
        lambda p: f"Z={p.Z:.6g}",
        lambda p: 2,
    ),
}


@dataclass
class SweepSpec:
    """Declarative sweep. ``reference`` and each ``varied`` entry are keyword
    dictionaries for the model's parameter type; ``accuracy`` holds solver
    settings merged into every point (e.g. ``K``, ``trials`` for helium)."""

    model: str
    reference: dict
    varied: list[dict]
    normalize: bool = True
    accuracy: dict = field(default_factory=dict)
    label: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        try:
            return cls(
                model=data["model"],
                reference=dict(data["reference"]),
                varied=[dict(v) for v in data["varied"]],
                normalize=bool(data.get("normalize", True)),
                accuracy=dict(data.get("accuracy", {})),
                label=str(data.get("label", "")),
            )
        except (KeyError, TypeError) as exc:
            raise SweepValidationError(f"malformed sweep spec: {exc}") from exc

    @classmethod
    def load(cls, path) -> "SweepSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def _params(self, entry: dict):
        model = get_model(self.model)
        settings = {k: v for k, v in self.accuracy.items() if k in model.params_type.__dataclass_fields__}
        try:
            return model.params_type(**{**settings, **entry})
        except (TypeError, ValueError) as exc:
            raise SweepValidationError(f"invalid {self.model} parameters {entry}: {exc}") from exc

    def reference_params(self):
        return self._params(self.reference)

    def varied_params(self) -> list:
        return [self._params(v) for v in self.varied]


@dataclass(frozen=True)
class DistanceRecord:
    param: str
    d_psi: float
    d_rho: float
    d_psi_norm: float
    d_rho_norm: float
    overlap: float
    energy_ref: float
    energy_var: float
    flags: tuple[str, ...] = ()

    def row(self) -> list[str]:
        return [self.param] + [_fmt(getattr(self, name)) for name in CSV_HEADER[1:-1]] + [";".join(self.flags)]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def get_model(name: str) -> Model:
    try:
        return MODELS[name]
    except KeyError:
        raise SweepValidationError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None


_STATE_CACHE: dict = {}


def solve_point(model: Model, params, accuracy: dict | None = None):
    """Solve one parameter point, memoized on (model, params, accuracy)."""
    accuracy = accuracy or {}
    key = (model.name, params, json.dumps(accuracy, sort_keys=True))
    if key not in _STATE_CACHE:
        try:
            _STATE_CACHE[key] = model.solve(params, accuracy)
        except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
            raise SolverFailure(model.name, asdict(params), exc) from exc
    return _STATE_CACHE[key]


def clear_cache():
    _STATE_CACHE.clear()


def run_sweep(spec: SweepSpec) -> list[DistanceRecord]:
    """Distance records of every varied point from the reference, in spec order.

    Every record is checked against the analytic distance bounds; a
    violation raises :class:`metric.BoundViolation`.
    """
    model = get_model(spec.model)
    ref_params = spec.reference_params()
    varied = spec.varied_params()
    if not varied:
        raise SweepValidationError("sweep has no varied points")
    for p in varied:
        if model.sector(p) != model.sector(ref_params):
            raise SweepValidationError(f"sector {model.sector(p)} differs from reference {model.sector(ref_params)}")

    grid = model.grid([ref_params] + varied)
    n = ref_params.n_particles
    ref = solve_point(model, ref_params, spec.accuracy)
    rho_ref = model.density(ref, grid)

    records = []
    for p in varied:
        state = solve_point(model, p, spec.accuracy)
        try:
            rho = model.density(state, grid)
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            raise SolverFailure(model.name, asdict(p), exc) from exc
        s = model.overlap(ref, state)
        dp = metric.d_psi(n, s)
        dr = metric.d_rho(rho_ref, rho)
        metric.check_bounds(dp, dr, n)
        flags = tuple(
            name for name, st in (("degenerate_ref", ref), ("degenerate", state)) if getattr(st, "degenerate", False)
        )
        records.append(
            DistanceRecord(
                model.label(p),
                dp,
                dr,
                dp / math.sqrt(2 * n),
                dr / (2 * n),
                min(s.modulus, 1.0),
                ref.energy,
                state.energy,
                flags,
            )
        )
    return records


def _geometric(start: float, stop: float, count: int) -> list[float]:
    return [float(start * (stop / start) ** (k / count)) for k in range(1, count + 1)]


def _stepped(start: float, stop: float, step: float) -> list[float]:
    count = int(round(abs(stop - start) / step))
    sign = 1.0 if stop > start else -1.0
    return [round(start + sign * step * k, 10) for k in range(1, count + 1)]


@dataclass(frozen=True)
class PresetSweep:
    key: str
    panel: str
    spec: SweepSpec


def preset_sweeps() -> list[PresetSweep]:
    """The eleven preset sweeps, grouped into panels a (helium), b (Hooke) and c (Hubbard).

    Each varied list starts with the reference point itself.
    """
    out = []

    def add(key, panel, model, reference, values, name, label, **extra):
        varied = [dict(reference)] + [{**extra, name: v} for v in values]
        out.append(PresetSweep(key, panel, SweepSpec(model, dict(reference), varied, True, {}, label)))

    add("helium_Z3_down", "a", "helium", {"Z": 3.0}, _stepped(3.0, helium.Z_MIN, 0.05), "Z", "He-like, ref Z=3, decreasing Z")
    add("helium_Z2_up", "a", "helium", {"Z": 2.0}, _stepped(2.0, 10.0, 0.25), "Z", "He-like, ref Z=2, increasing Z")
    add("helium_Z2_down", "a", "helium", {"Z": 2.0}, _stepped(2.0, helium.Z_MIN, 0.05), "Z", "He-like, ref Z=2, decreasing Z")
    add("hooke_up", "b", "hooke", {"omega": 0.5}, _geometric(0.5, 20.0, 24), "omega", "Hooke, ref omega=0.5, increasing")
    add("hooke_down", "b", "hooke", {"omega": 0.5}, _geometric(0.5, 0.01, 24), "omega", "Hooke, ref omega=0.5, decreasing")
    for n in (2, 4, 8):
        for U in (2.0, 6.0):
            base = {"L": 8, "n_up": n // 2, "n_down": n // 2, "t": 1.0, "U": U}
            add(
                f"hubbard_N{n}_U{U:g}",
                "c",
                "hubbard",
                {**base, "omega": 4.0},
                _geometric(4.0, 0.05, 20),
                "omega",
                f"Hubbard L=8, N={n}, U={U:g}",
                **base,
            )
    return out


@dataclass(frozen=True)
class AnalysisReport:
    n_points: int
    initial_slope: float
    linear_slope: float
    linear_r2: float
    monotonic: bool
    min_step: float
    tail_slope_ratio: float
    max_d_psi: float
    max_d_rho: float
    max_d_psi_norm: float
    max_d_rho_norm: float

    def as_dict(self) -> dict:
        return asdict(self)


def _normalized(records: Sequence[DistanceRecord]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([r.d_psi_norm for r in records])
    y = np.array([r.d_rho_norm for r in records])
    order = np.argsort(x, kind="stable")
    return x[order], y[order]


def _secant(x: np.ndarray, y: np.ndarray) -> float:
    dx = x[-1] - x[0]
    return float((y[-1] - y[0]) / dx) if dx > 0 else math.nan


def analyze(records: Sequence[DistanceRecord], n: int) -> AnalysisReport:
    """Shape statistics of one D_rho(D_psi) curve in normalized axes.

    initial_slope
        least-squares slope through the first five points by D_psi
    linear_r2
        R^2 of a line through all points with D_psi <= 0.8 sqrt(2N)
    monotonic
        no decrease of D_rho larger than 1e-9 as D_psi grows
    tail_slope_ratio
        secant slope over the last decile of points divided by the secant
        slope of the whole curve
    """
    if len(records) < 6:
        raise ValueError(f"need at least 6 records, got {len(records)}")
    x, y = _normalized(records)
    init = numerics.linear_fit(np.column_stack([x[:INITIAL_POINTS], y[:INITIAL_POINTS]]))[0]
    window = x <= LINEAR_WINDOW + 1e-12
    if window.sum() >= 2 and np.ptp(x[window]) > 0:
        lin_slope, _, r2 = numerics.linear_fit(np.column_stack([x[window], y[window]]))
    else:
        lin_slope, r2 = math.nan, math.nan
    steps = np.diff(y)
    tail = max(2, math.ceil(0.1 * len(x)))
    ratio = _secant(x[-tail:], y[-tail:]) / _secant(x, y)
    return AnalysisReport(
        len(records),
        init,
        lin_slope,
        r2,
        bool(np.all(steps >= -MONOTONIC_TOL)),
        float(steps.min()),
        ratio,
        float(max(r.d_psi for r in records)),
        float(max(r.d_rho for r in records)),
        float(x.max()),
        float(y.max()),
    )


def superposition_check(records_a: Sequence[DistanceRecord], records_b: Sequence[DistanceRecord]) -> float:
    """Largest |difference| of normalized D_rho between two curves over the
    D_psi range they share, interpolating curve b at curve a's abscissae."""
    xa, ya = _normalized(records_a)
    xb, yb = _normalized(records_b)
    lo, hi = max(xa.min(), xb.min()), min(xa.max(), xb.max())
    inside = (xa >= lo) & (xa <= hi)
    if not lo < hi or not np.any(inside):
        raise ValueError("curves share no D_psi range")
    return float(np.max(np.abs(ya[inside] - np.interp(xa[inside], xb, yb))))


def emit_csv(records: Sequence[DistanceRecord], path) -> None:
    if not records:
        raise ValueError("no records to write")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow(r.row())


def read_csv(path) -> list[DistanceRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise SweepValidationError(f"unexpected CSV header {header}")
        out = []
        for row in reader:
            flags = tuple(f for f in row[8].split(";") if f)
            out.append(DistanceRecord(row[0], *(float(v) for v in row[1:8]), flags))
    return out


def particle_number(records: Iterable[DistanceRecord]) -> int:
    """Recover N from the raw and normalized D_psi columns."""
    for r in records:
        if r.d_psi_norm > 1e-6:
            return int(round(0.5 * (r.d_psi / r.d_psi_norm) ** 2))
    raise ValueError("cannot infer particle number from an all-zero sweep")


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]


def emit_svg(panels: dict[str, list[tuple[str, Sequence[DistanceRecord]]]], path, normalized: bool = True) -> None:
    """Write one scatter/polyline plot per panel side by side.

    ``panels`` maps a panel title to ``(series label, records)`` pairs.
    """
    if not panels:
        raise ValueError("nothing to plot")
    width, height, pad = 360, 320, 50
    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(width * len(panels)),
        height=str(height),
        viewBox=f"0 0 {width * len(panels)} {height}",
    )
    xname, yname = ("D_psi / sqrt(2N)", "D_rho / 2N") if normalized else ("D_psi", "D_rho")
    for i, (title, series) in enumerate(panels.items()):
        g = ET.SubElement(svg, "g", transform=f"translate({i * width},0)")
        pts_all = [
            (r.d_psi_norm, r.d_rho_norm) if normalized else (r.d_psi, r.d_rho) for _, recs in series for r in recs
        ]
        xmax = max((p[0] for p in pts_all), default=1.0) or 1.0
        ymax = max((p[1] for p in pts_all), default=1.0) or 1.0
        if normalized:
            xmax = ymax = 1.0
        x0, y0, w, h = pad, height - pad, width - 1.5 * pad, height - 2 * pad

        def to_px(px, py):
            return f"{x0 + w * px / xmax:.2f},{y0 - h * py / ymax:.2f}"

        ET.SubElement(g, "rect", x=str(x0), y=str(y0 - h), width=f"{w:.2f}", height=f"{h:.2f}", fill="none", stroke="black")
        ET.SubElement(g, "text", x=str(x0), y="20", **{"font-size": "13"}).text = title
        ET.SubElement(g, "text", x=f"{x0 + w / 2:.2f}", y=str(height - 12), **{"font-size": "11", "text-anchor": "middle"}).text = xname
        ET.SubElement(
            g, "text", x="14", y=f"{y0 - h / 2:.2f}", transform=f"rotate(-90 14 {y0 - h / 2:.2f})",
            **{"font-size": "11", "text-anchor": "middle"},
        ).text = yname
        for j, (label, recs) in enumerate(series):
            color = _PALETTE[j % len(_PALETTE)]
            pts = sorted((r.d_psi_norm, r.d_rho_norm) if normalized else (r.d_psi, r.d_rho) for r in recs)
            ET.SubElement(g, "polyline", points=" ".join(to_px(*p) for p in pts), fill="none", stroke=color)
            for p in pts:
                cx, cy = to_px(*p).split(",")
                ET.SubElement(g, "circle", cx=cx, cy=cy, r="2", fill=color)
            ET.SubElement(g, "text", x=f"{x0 + 6}", y=f"{y0 - h + 14 + 12 * j}", fill=color, **{"font-size": "9"}).text = label
    ET.ElementTree(svg).write(path, encoding="utf-8", xml_declaration=True)


def reproduce_fig2(outdir, log: Callable[[str], None] = print) -> dict:
    """Run every preset sweep, write CSV/SVG/JSON artifacts into ``outdir``
    and return the analysis summary."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    results: dict[str, list[DistanceRecord]] = {}
    presets = preset_sweeps()
    summary: dict[str, Any] = {"sweeps": {}}
    panels: dict[str, list] = {}
    for preset in presets:
        log(f"running {preset.key} ({len(preset.spec.varied)} points)")
        records = run_sweep(preset.spec)
        results[preset.key] = records
        emit_csv(records, outdir / f"{preset.key}.csv")
        n = preset.spec.reference_params().n_particles
        report = analyze(records, n)
        summary["sweeps"][preset.key] = {"panel": preset.panel, "label": preset.spec.label, "N": n, **report.as_dict()}
        panels.setdefault(f"({preset.panel})", []).append((preset.spec.label, records))

    deviation = superposition_check(results["helium_Z2_down"], results["hooke_down"])
    summary["superposition"] = {
        "curve_a": "helium_Z2_down",
        "curve_b": "hooke_down",
        "max_deviation": deviation,
        "threshold": 0.1,
        "pass": deviation < 0.1,
    }
    emit_svg(panels, outdir / "fig2.svg")
    with open(outdir / "analysis.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
