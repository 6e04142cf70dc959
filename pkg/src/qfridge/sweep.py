"""Grid sweeps over preparation temperatures and their file outputs.

A sweep evaluates the engine once (the transition matrix does not depend on
the preparation temperatures) and then reweights it over an (T_H, T_C) grid,
producing one row per grid point.  Outputs are plain CSV / JSON / binary PPM
so any external plotter can reproduce the phase diagrams.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .circuits import LINE3, build_target_unitary, build_vstar_circuit
from .compiler import compile_generic
from .noise import NoiseModel, calibrate
from . import thermo
from .thermo import (
    BOUNDARY_EPS,
    ColdTemperature,
    DeviceSpec,
    classify_mode,
    cold_energies,
    energy_changes,
    excited_cold_population,
    final_cold_temperature,
    hot_energies,
    is_purifier,
    prepare,
    transition_matrix,
)


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class SweepConfig:
    f0: float = 4.82
    f1: float = 4.76
    f2: float = 4.90
    scheme: str = "full8"
    v: str = "identity"
    p1: float = 0.0
    p2: float = 0.0
    eps01: float = 0.0
    eps10: float = 0.0
    mitigation: bool = False
    shots: int = 8192
    seed: int = 0
    t_h_min: float = 20.0
    t_h_max: float = 1000.0
    t_c_min: float = 20.0
    t_c_max: float = 1000.0
    n_h: int = 64
    n_c: int = 64
    hot_energy_mode: str = "detuned"
    outputs: tuple[str, ...] = ("csv",)
    heatmap_field: str = "mode"
    output_prefix: str = "sweep"

    def validate(self) -> "SweepConfig":
        if min(self.f0, self.f1, self.f2) <= 0:
            raise ConfigError("frequencies must be positive")
        if self.scheme not in thermo.SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.v not in ("identity", "vstar"):
            raise ConfigError(f"unknown v {self.v!r}")
        for key in ("p1", "p2", "eps01", "eps10"):
            val = getattr(self, key)
            if not 0.0 <= val <= 1.0:
                raise ConfigError(f"{key} = {val} outside [0, 1]")
        if self.shots < 0:
            raise ConfigError("shots must be >= 0 (0 = exact)")
        if self.t_h_min <= 0 or self.t_c_min <= 0:
            raise ConfigError("grid temperatures must be positive")
        if self.t_h_max <= self.t_h_min or self.t_c_max <= self.t_c_min:
            raise ConfigError("grid bounds need max > min")
        if self.n_h < 2 or self.n_c < 2:
            raise ConfigError("grid needs at least 2 points per axis")
        if self.hot_energy_mode not in thermo.HOT_ENERGY_MODES:
            raise ConfigError(f"unknown hot_energy_mode {self.hot_energy_mode!r}")
        for out in self.outputs:
            if out not in ("csv", "json", "heatmap"):
                raise ConfigError(f"unknown output {out!r}")
        if self.heatmap_field not in ("mode", "t_c_final", "p_g_final"):
            raise ConfigError(f"unknown heatmap_field {self.heatmap_field!r}")
        return self

    def device(self) -> DeviceSpec:
        return DeviceSpec(self.f0, self.f1, self.f2)

    def noise(self) -> NoiseModel:
        return NoiseModel.uniform(self.p1, self.p2, self.eps01, self.eps10)


_FLOAT_KEYS = {
    "f0", "f1", "f2", "p1", "p2", "eps01", "eps10",
    "t_h_min", "t_h_max", "t_c_min", "t_c_max",
}
_INT_KEYS = {"shots", "seed", "n_h", "n_c"}
_BOOL_KEYS = {"mitigation"}
_STR_KEYS = {"scheme", "v", "hot_energy_mode", "heatmap_field", "output_prefix"}


def parse_config(text: str) -> SweepConfig:
    """Parse a flat `key = value` document with # comments into a config."""
    cfg = SweepConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError(f"malformed line {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key in _FLOAT_KEYS:
                setattr(cfg, key, float(value))
            elif key in _INT_KEYS:
                setattr(cfg, key, int(value))
            elif key in _BOOL_KEYS:
                if value not in ("on", "off"):
                    raise ConfigError(f"{key} must be on or off", lineno)
                setattr(cfg, key, value == "on")
            elif key in _STR_KEYS:
                setattr(cfg, key, value)
            elif key == "outputs":
                cfg.outputs = tuple(
                    v.strip() for v in value.split(",") if v.strip()
                )
            else:
                raise ConfigError(f"unknown key {key!r}", lineno)
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"bad value {value!r} for {key}", lineno) from None
        try:
            cfg.validate()
        except ConfigError as err:
            raise ConfigError(str(err), lineno) from None
    return cfg.validate()


@dataclass(frozen=True)
class SweepRow:
    t_hot: float
    t_cold: float
    de_hot: float
    de_cold: float
    work: float
    mode: str
    t_cold_final: ColdTemperature
    p_g_final: float
    purifier: bool


def _sampling_eps(tm, prep, spec, hot_energy_mode: str, shots: int) -> float:
    """Boundary tolerance: 3 standard errors of the sampled energy changes."""
    if shots <= 0:
        return BOUNDARY_EPS
    e_h = hot_energies(spec, hot_energy_mode)
    e_c = cold_energies(spec)
    worst = 0.0
    for e in (e_h, e_c, e_h + e_c):
        mean = e @ tm.p
        var_cols = (e ** 2) @ tm.p - mean ** 2
        var = float(np.sum(prep.probs ** 2 * var_cols)) / shots
        worst = max(worst, 3.0 * math.sqrt(max(var, 0.0)))
    return max(worst, BOUNDARY_EPS)


def build_engine(cfg: SweepConfig):
    """The engine to run: a circuit when gate noise applies, else the exact
    target unitary (the 4-CNOT circuit is exact either way)."""
    if cfg.v == "vstar":
        return build_vstar_circuit()
    if cfg.noise().is_gate_noiseless():
        return build_target_unitary("identity")
    circuit, _ = compile_generic(build_target_unitary("identity"), LINE3)
    return circuit


def sweep_transition_matrix(cfg: SweepConfig):
    nm = cfg.noise()
    conf = None
    if cfg.mitigation:
        conf = calibrate(nm, cfg.shots if cfg.shots > 0 else 8192, cfg.seed + 1000)
    return transition_matrix(build_engine(cfg), nm, cfg.shots, cfg.seed, mitigation=conf)


def grid_axes(cfg: SweepConfig) -> tuple[np.ndarray, np.ndarray]:
    return (
        np.linspace(cfg.t_h_min, cfg.t_h_max, cfg.n_h),
        np.linspace(cfg.t_c_min, cfg.t_c_max, cfg.n_c),
    )


def evaluate_point(cfg: SweepConfig, tm, t_hot: float, t_cold: float) -> SweepRow:
    spec = cfg.device()
    prep = prepare(cfg.scheme, spec, t_hot, t_cold)
    ledger = energy_changes(tm, prep, spec, cfg.hot_energy_mode)
    eps = _sampling_eps(tm, prep, spec, cfg.hot_energy_mode, cfg.shots)
    mode = classify_mode(ledger.role_ordered(t_hot, t_cold), eps)
    t_final = final_cold_temperature(tm, prep, spec)
    p_g_final = 1.0 - excited_cold_population(tm, prep)
    purifier = (
        cfg.scheme == "full8" and mode.tag == "R" and is_purifier(tm, prep)
    )
    return SweepRow(
        t_hot=t_hot,
        t_cold=t_cold,
        de_hot=ledger.de_hot,
        de_cold=ledger.de_cold,
        work=ledger.work,
        mode=mode.tag,
        t_cold_final=t_final,
        p_g_final=p_g_final,
        purifier=purifier,
    )


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """All grid rows in row-major order, T_H as the outer axis."""
    cfg.validate()
    tm = sweep_transition_matrix(cfg)
    t_h_axis, t_c_axis = grid_axes(cfg)
    return [
        evaluate_point(cfg, tm, th, tc) for th in t_h_axis for tc in t_c_axis
    ]


# ---------------------------------------------------------------------------
# outputs

CSV_HEADER = "T_H_mK,T_C_mK,dE_H,dE_C,W,mode,T_C_final_mK,p_g_final,purifier"


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def _final_temp_text(t: ColdTemperature) -> str:
    if t.kind == "infinite":
        return "inf"
    if t.kind == "inverted":
        return "inverted"
    return _fmt(t.millikelvin)


def write_csv(rows: list[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    _fmt(r.t_hot),
                    _fmt(r.t_cold),
                    _fmt(r.de_hot),
                    _fmt(r.de_cold),
                    _fmt(r.work),
                    r.mode,
                    _final_temp_text(r.t_cold_final),
                    _fmt(r.p_g_final),
                    "true" if r.purifier else "false",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def row_as_dict(r: SweepRow) -> dict:
    if r.t_cold_final.kind == "finite":
        t_final = r.t_cold_final.millikelvin
    else:
        t_final = "inf" if r.t_cold_final.kind == "infinite" else "inverted"
    return {
        "T_H": r.t_hot,
        "T_C": r.t_cold,
        "dE_H": r.de_hot,
        "dE_C": r.de_cold,
        "W": r.work,
        "mode": r.mode,
        "T_C_final": t_final,
        "p_g_final": r.p_g_final,
        "purifier": r.purifier,
    }


def write_json(rows: list[SweepRow]) -> str:
    return json.dumps([row_as_dict(r) for r in rows], indent=2) + "\n"


MODE_COLORS = {
    "E": (0, 160, 0),        # green
    "R": (0, 0, 200),        # blue
    "P": (120, 180, 255),    # light blue: purifying subset of R
    "A": (255, 220, 0),      # yellow
    "H": (220, 0, 0),        # red
    "Boundary": (128, 128, 128),
}
RAMP_LOW = (0, 0, 255)
RAMP_HIGH = (255, 0, 0)
NON_FINITE_COLOR = (128, 128, 128)

HEATMAP_FIELDS = ("mode", "t_c_final", "p_g_final")


def _grid_shape(rows: list[SweepRow]) -> tuple[int, int]:
    n_h = len({r.t_hot for r in rows})
    n_c = len({r.t_cold for r in rows})
    if n_h * n_c != len(rows):
        raise ValueError("rows do not form a complete grid")
    return n_h, n_c


def _scalar_values(rows: list[SweepRow], fname: str) -> list[float | None]:
    if fname == "p_g_final":
        return [r.p_g_final for r in rows]
    return [
        r.t_cold_final.millikelvin if r.t_cold_final.kind == "finite" else None
        for r in rows
    ]


def heatmap_range(rows: list[SweepRow], fname: str) -> tuple[float, float]:
    """(min, max) of the finite values of a scalar heatmap field."""
    values = [v for v in _scalar_values(rows, fname) if v is not None]
    if not values:
        raise ValueError(f"no finite values for field {fname!r}")
    return min(values), max(values)


def write_heatmap(rows: list[SweepRow], fname: str = "mode") -> bytes:
    """Binary P6 pixmap of a sweep grid, one pixel per grid point.

    Mode maps use the fixed color table MODE_COLORS (purifying R points are
    rendered as P); scalar fields use a linear blue-to-red ramp between the
    values returned by heatmap_range, gray for non-finite entries.
    """
    if fname not in HEATMAP_FIELDS:
        raise ValueError(f"unknown heatmap field {fname!r}")
    n_h, n_c = _grid_shape(rows)
    pixels = bytearray()
    if fname == "mode":
        for r in rows:
            tag = "P" if (r.mode == "R" and r.purifier) else r.mode
            pixels.extend(MODE_COLORS[tag])
    else:
        lo, hi = heatmap_range(rows, fname)
        span = hi - lo if hi > lo else 1.0
        for v in _scalar_values(rows, fname):
            if v is None:
                pixels.extend(NON_FINITE_COLOR)
            else:
                t = (v - lo) / span
                pixels.extend(
                    int(round(a + t * (b - a)))
                    for a, b in zip(RAMP_LOW, RAMP_HIGH)
                )
    header = f"P6\n{n_c} {n_h}\n255\n".encode()
    return header + bytes(pixels)


def write_outputs(cfg: SweepConfig, rows: list[SweepRow]) -> list[str]:
    """Write the configured output files; returns the paths written."""
    written = []
    if "csv" in cfg.outputs:
        path = cfg.output_prefix + ".csv"
        with open(path, "w") as fh:
            fh.write(write_csv(rows))
        written.append(path)
    if "json" in cfg.outputs:
        path = cfg.output_prefix + ".json"
        with open(path, "w") as fh:
            fh.write(write_json(rows))
        written.append(path)
    if "heatmap" in cfg.outputs:
        path = cfg.output_prefix + ".ppm"
        with open(path, "wb") as fh:
            fh.write(write_heatmap(rows, cfg.heatmap_field))
        written.append(path)
        if cfg.heatmap_field != "mode":
            lo, hi = heatmap_range(rows, cfg.heatmap_field)
            side = path + ".range.txt"
            with open(side, "w") as fh:
                fh.write(f"min {_fmt(lo)}\nmax {_fmt(hi)}\n")
            written.append(side)
    return written
