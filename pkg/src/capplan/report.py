"""Scenario documents in, CSV tables and SVG line plots out."""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any
from xml.sax.saxutils import escape

from .model import ModelModes, NetworkConfig, PerformanceMetrics
from .scenario import ComparisonResult, SweepResult, ThresholdCriteria, UpgradePlan, metric_values

CSV_COLUMNS = (
    "n_users",
    "rho",
    "r_total_rps",
    "r_served_rps",
    "d_queue_s",
    "d_processing_s",
    "d_transmission_s",
    "d_propagation_s",
    "d_total_s",
    "utilization_pct",
    "throughput_bps",
    "queue_drops_pps",
    "server_drops_rps",
    "saturated",
)
CSV_HEADER = ",".join(CSV_COLUMNS)
METRIC_COLUMNS = CSV_COLUMNS[1:-1]

UNITS = {
    "rho": "dimensionless",
    "r_total_rps": "requests/s",
    "r_served_rps": "requests/s",
    "d_queue_s": "s",
    "d_processing_s": "s",
    "d_transmission_s": "s",
    "d_propagation_s": "s",
    "d_total_s": "s",
    "utilization_pct": "%",
    "throughput_bps": "bits/s",
    "queue_drops_pps": "packets/s",
    "server_drops_rps": "requests/s",
}


class ScenarioError(ValueError):
    """Malformed or invalid scenario document."""


# ---------------------------------------------------------------- scenarios

@dataclass(frozen=True)
class ScenarioDocument:
    n_from: int
    n_to: int
    network: NetworkConfig = field(default_factory=NetworkConfig)
    modes: ModelModes = field(default_factory=ModelModes)
    upgrade: UpgradePlan | None = None
    criteria: ThresholdCriteria = field(default_factory=ThresholdCriteria)

    @property
    def upgrade_or_default(self) -> UpgradePlan:
        return self.upgrade if self.upgrade is not None else UpgradePlan.paper()


_SECTIONS = {
    "network": NetworkConfig,
    "modes": ModelModes,
    "upgrade": UpgradePlan,
    "criteria": ThresholdCriteria,
}
_SWEEP_KEYS = ("from", "to")


def section_keys(section: str) -> tuple[str, ...]:
    if section == "sweep":
        return _SWEEP_KEYS
    return tuple(f.name for f in dataclasses.fields(_SECTIONS[section]))


def load_scenario_dict(text: str) -> dict[str, Any]:
    """Syntax-level parse (JSON).  Raises ScenarioError with line/column."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ScenarioError("scenario document must be an object at top level")
    return raw


def build_scenario(raw: dict[str, Any]) -> ScenarioDocument:
    unknown = set(raw) - set(_SECTIONS) - {"sweep"}
    if unknown:
        raise ScenarioError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if "sweep" not in raw:
        raise ScenarioError("missing required section 'sweep' (with 'from' and 'to')")

    built: dict[str, Any] = {}
    for section, cls in _SECTIONS.items():
        if section not in raw:
            continue
        body = raw[section]
        if not isinstance(body, dict):
            raise ScenarioError(f"section '{section}' must be an object")
        keys = set(section_keys(section))
        extra = set(body) - keys
        if extra:
            raise ScenarioError(f"unknown key(s) in '{section}': {', '.join(sorted(extra))}")
        kwargs = dict(body)
        if section == "network" and "queue_limit_packets" in kwargs:
            kwargs["queue_limit_packets"] = _as_int(kwargs["queue_limit_packets"], "network.queue_limit_packets")
        try:
            built[section] = cls(**kwargs)
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"invalid '{section}' section: {exc}") from None

    sweep = raw["sweep"]
    if not isinstance(sweep, dict):
        raise ScenarioError("section 'sweep' must be an object")
    extra = set(sweep) - set(_SWEEP_KEYS)
    missing = set(_SWEEP_KEYS) - set(sweep)
    if extra:
        raise ScenarioError(f"unknown key(s) in 'sweep': {', '.join(sorted(extra))}")
    if missing:
        raise ScenarioError(f"missing key(s) in 'sweep': {', '.join(sorted(missing))}")
    n_from = _as_int(sweep["from"], "sweep.from")
    n_to = _as_int(sweep["to"], "sweep.to")
    if n_from < 0 or n_to < n_from:
        raise ScenarioError(f"invalid sweep range: from={n_from}, to={n_to}")

    return ScenarioDocument(
        n_from=n_from,
        n_to=n_to,
        network=built.get("network", NetworkConfig()),
        modes=built.get("modes", ModelModes()),
        upgrade=built.get("upgrade"),
        criteria=built.get("criteria", ThresholdCriteria()),
    )


def _as_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ScenarioError(f"{name} must be a whole number, got {value!r}")
    return int(value)


def parse_scenario(text: str) -> ScenarioDocument:
    return build_scenario(load_scenario_dict(text))


def scenario_to_dict(doc: ScenarioDocument) -> dict[str, Any]:
    def plain(obj) -> dict[str, Any]:
        return {k: (v.value if hasattr(v, "value") else v) for k, v in dataclasses.asdict(obj).items()}

    out: dict[str, Any] = {
        "network": plain(doc.network),
        "modes": plain(doc.modes),
        "criteria": plain(doc.criteria),
        "sweep": {"from": doc.n_from, "to": doc.n_to},
    }
    if doc.upgrade is not None:
        out["upgrade"] = plain(doc.upgrade)
    return out


def serialize_scenario(doc: ScenarioDocument) -> str:
    return json.dumps(scenario_to_dict(doc), indent=2) + "\n"


# ---------------------------------------------------------------- CSV

def format_real(x: float) -> str:
    """Shortest decimal that round-trips; ``inf`` for infinity."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def _csv_row(p: PerformanceMetrics) -> str:
    values = metric_values(p)
    cells = [str(p.n_users)]
    cells += [format_real(values[c]) for c in METRIC_COLUMNS]
    cells.append("true" if p.saturated else "false")
    return ",".join(cells)


def write_csv(result: SweepResult) -> str:
    if not result.points:
        raise ValueError("cannot write an empty sweep")
    lines = [CSV_HEADER] + [_csv_row(p) for p in result.points]
    return "\n".join(lines) + "\n"


def write_delta_csv(comparison: ComparisonResult) -> str:
    header = ["n_users"] + [f"delta_{c}" for c in METRIC_COLUMNS]
    lines = [",".join(header)]
    for p, d in zip(comparison.baseline.points, comparison.deltas):
        lines.append(",".join([str(p.n_users)] + [format_real(d[c]) for c in METRIC_COLUMNS]))
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> list[dict[str, Any]]:
    """Parse CSV written by :func:`write_csv` back into typed rows."""
    lines = text.split("\n")
    if lines[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        cells = line.split(",")
        row: dict[str, Any] = {"n_users": int(cells[0])}
        for name, cell in zip(METRIC_COLUMNS, cells[1:-1]):
            row[name] = float(cell)
        row["saturated"] = {"true": True, "false": False}[cells[-1]]
        rows.append(row)
    return rows


# ---------------------------------------------------------------- SVG

_W, _H = 720, 440
_LEFT, _RIGHT, _TOP, _BOTTOM = 90, 30, 40, 60
_COLORS = ("#1f77b4", "#d62728")


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / count for i in range(count + 1)]


def _fmt_tick(v: float) -> str:
    return f"{v:.4g}"


def render_plot(baseline: SweepResult, upgraded: SweepResult | None, metric: str) -> str:
    """Standalone SVG line chart of ``metric`` against user count.

    Infinite values are drawn at the plot ceiling and marked with an open
    circle carrying ``class="clipped"``.
    """
    if metric not in METRIC_COLUMNS:
        raise ValueError(f"unknown metric {metric!r}; valid metrics: {', '.join(METRIC_COLUMNS)}")
    series = [("baseline", baseline)] + ([("upgraded", upgraded)] if upgraded is not None else [])
    for label, s in series:
        if not s.points:
            raise ValueError(f"{label} sweep is empty")

    data = [(label, [(p.n_users, metric_values(p)[metric]) for p in s.points]) for label, s in series]
    xs = [x for _, pts in data for x, _ in pts]
    finite = [y for _, pts in data for _, y in pts if math.isfinite(y)]
    x_lo, x_hi = min(xs), max(xs)
    y_lo = min(0.0, min(finite)) if finite else 0.0
    y_hi = max(finite) if finite else 1.0
    any_clipped = any(math.isinf(y) for _, pts in data for _, y in pts)
    if any_clipped:
        y_hi = y_hi * 1.1 if y_hi > 0 else 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    if x_hi == x_lo:
        x_hi = x_lo + 1

    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def sx(x):
        return _LEFT + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        if math.isinf(y):
            y = y_hi if y > 0 else y_lo
        return _TOP + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<title>{escape(metric)} vs n_users</title>',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<g class="axes" stroke="black" fill="none">'
        f'<line x1="{_LEFT}" y1="{_TOP + ph}" x2="{_LEFT + pw}" y2="{_TOP + ph}"/>'
        f'<line x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" y2="{_TOP + ph}"/></g>',
    ]
    out.append('<g class="ticks" font-family="sans-serif" font-size="11">')
    for t in _ticks(x_lo, x_hi):
        out.append(f'<text x="{sx(t):.2f}" y="{_TOP + ph + 16}" text-anchor="middle">{_fmt_tick(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        out.append(f'<text x="{_LEFT - 6}" y="{sy(t) + 4:.2f}" text-anchor="end">{_fmt_tick(t)}</text>')
    out.append("</g>")
    out.append(
        f'<text class="xlabel" x="{_LEFT + pw / 2:.1f}" y="{_H - 15}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">n_users (users)</text>'
    )
    out.append(
        f'<text class="ylabel" x="18" y="{_TOP + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13" transform="rotate(-90 18 {_TOP + ph / 2:.1f})">{escape(metric)} ({escape(UNITS[metric])})</text>'
    )
    if any_clipped:
        out.append(
            f'<line class="ceiling" x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT + pw}" y2="{_TOP}" '
            'stroke="gray" stroke-dasharray="4 3"/>'
        )

    for (label, pts), color in zip(data, _COLORS):
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(
            f'<polyline class="series" data-label="{label}" points="{coords}" fill="none" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        for x, y in pts:
            if math.isinf(y):
                out.append(
                    f'<circle class="clipped" data-label="{label}" data-n="{x}" cx="{sx(x):.2f}" '
                    f'cy="{sy(y):.2f}" r="3" fill="none" stroke="{color}"/>'
                )

    if len(data) > 1:
        out.append('<g class="legend" font-family="sans-serif" font-size="12">')
        for i, ((label, _), color) in enumerate(zip(data, _COLORS)):
            y = _TOP + 12 + 18 * i
            x = _LEFT + pw - 110
            out.append(f'<line x1="{x}" y1="{y}" x2="{x + 20}" y2="{y}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{x + 26}" y="{y + 4}">{label}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
