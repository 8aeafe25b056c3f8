"""Command-line front end.

    eitflash <subcommand> [--config FILE] [--key=value ...] --out DIR

Each run writes ``<subcommand>.csv`` (the data contract), ``<subcommand>.svg``
and ``<subcommand>.json`` (resolved configuration, version, timings) to the
output directory.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure; failures also print one JSON record on stderr.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import __version__
from .analysis import (
    contrast_curve,
    default_workers,
    doppler_fringe_scan,
    fit_flash_decay,
    flash_decay_trace,
    fringe_map_vs_b0,
    fringe_scan,
    measure_group_delay,
    modulation_map,
)
from .decompose import decompose
from .errors import DomainError, EitflashError
from .medium import PRESETS, MediumParams, delta_pi, flash_time_scale, group_delay
from .propagate import (
    SpectralGrid,
    default_grid,
    sample_trace,
    transmit_periodic,
    transmit_trace,
    zero_plus,
)
from .pulse import PulseKind, PulseSpec, default_square

SUBCOMMANDS = ("trace", "fringe", "b0map", "modmap", "doppler", "decompose", "delay", "decay")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(EitflashError, ValueError):
    """Malformed or invalid run configuration."""


def _float_list(text):
    return [float(x) for x in re.split(r"[,\s]+", text.strip()) if x]


def _boolean(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_float(text):
    return None if text.strip().lower() in ("", "none") else float(text)


# section -> key -> (parser, default)
SCHEMA: Dict[str, Dict[str, tuple]] = {
    "medium": {
        "preset": (str, None),
        "b0": (float, 200.0),
        "gamma31": (float, 0.0),
        "omega_c": (float, 0.0),
        "delta_c": (float, 0.0),
        "gamma21": (float, 2 * math.pi * 6e6),
        "wave_number_k": (_optional_float, None),
        "atom_mass": (_optional_float, None),
        "temperature": (float, 0.0),
        "doppler_mode": (str, "simple_shift"),
        "doppler_order": (int, 64),
        "doppler_method": (str, "exact"),
    },
    "pulse": {
        "kind": (str, None),
        "delta_p": (float, 0.0),
        "switch_time": (float, 0.0),
        "duration": (_optional_float, None),
        "period": (_optional_float, None),
    },
    "grid": {
        "span": (_optional_float, None),
        "n_points": (int, None),
        "rtol": (float, 1e-8),
        "periodic_method": (str, "auto"),
        "periodic_tol": (float, 1e-6),
    },
    "sweep": {
        "start": (float, None),
        "stop": (float, None),
        "count": (int, None),
        "scale": (str, "linear"),
        "units": (str, "delta_pi"),
        "b0_values": (_float_list, [100.0, 200.0, 400.0]),
        "temperatures": (_float_list, [0.0, 0.1, 1.0, 50.0]),
        "period_start": (float, 1e-3),
        "period_stop": (float, 8e4),
        "period_count": (int, 25),
        "t_start": (_optional_float, None),
        "t_stop": (_optional_float, None),
        "n_samples": (int, 4001),
        "delay_method": (str, "half_amplitude"),
        "fit_start": (_optional_float, None),
        "fit_stop": (_optional_float, None),
        "workers": (int, None),
    },
    "output": {
        "out": (str, None),
        "seed": (int, 0),
        "plot": (_boolean, True),
    },
}

KEY_SECTION = {key: section for section, keys in SCHEMA.items() for key in keys}

# Subcommand defaults that differ from the schema defaults.
SUBCOMMAND_DEFAULTS = {
    "trace": {"kind": "square"},
    "fringe": {"kind": "step_off", "omega_c": 0.5, "start": -2.0, "stop": 2.0, "count": 201},
    "b0map": {"kind": "step_off", "omega_c": 0.5, "start": 0.0, "stop": 3.0, "count": 121},
    "modmap": {"kind": "periodic_square", "omega_c": 0.5, "start": 0.0, "stop": 2.0, "count": 81},
    "doppler": {"kind": "step_off", "omega_c": 0.5, "preset": "rubidium-d2", "start": 0.0,
                "stop": 2.0, "count": 81},
    "decompose": {"kind": "square", "omega_c": 0.5},
    "delay": {"kind": "square", "omega_c": 0.5},
    "decay": {"kind": "step_off", "b0_values": [50.0, 100.0, 200.0, 400.0]},
}


@dataclass
class RunConfig:
    """Resolved configuration of one run."""

    command: str
    values: Dict[str, Any]
    medium: MediumParams
    out: Path
    workers: int
    sources: Dict[str, str] = field(default_factory=dict)

    def get(self, key):
        return self.values[key]

    def as_dict(self):
        out = {}
        for section, keys in SCHEMA.items():
            out[section] = {k: self.values[k] for k in keys}
        out["output"]["out"] = str(self.out)
        out["sweep"]["workers"] = self.workers
        return out


def _key_lines(path: Path) -> Dict[tuple, int]:
    """Map ``(section, key)`` to its line number in an INI file."""
    lines = {}
    section = None
    for n, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = re.match(r"\[(.+)\]$", line)
        if m:
            section = m.group(1).strip()
            continue
        key = re.split(r"[=:]", line, 1)[0].strip().lower()
        lines.setdefault((section, key), n)
    return lines


def _read_file(path: Path) -> Dict[str, tuple]:
    """Raw ``key -> (text, where)`` pairs from an INI file."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        if lineno is None and getattr(exc, "errors", None):
            lineno = exc.errors[0][0]
        where = f"{path}:{lineno}" if lineno else str(path)
        first = str(exc).splitlines()[0]
        raise ConfigError(f"parse error at {where}: {first}") from None
    lines = _key_lines(path)
    raw = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key, text in parser.items(section):
            where = f"{path}:{lines.get((section, key), '?')}"
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}] at {where}")
            raw[key] = (text, where)
    return raw


def _parse_flags(flags: List[str]) -> Dict[str, tuple]:
    raw = {}
    for flag in flags:
        m = re.match(r"--([A-Za-z0-9_-]+)=(.*)$", flag)
        if not m:
            raise ConfigError(f"expected --key=value, got {flag!r}")
        key = m.group(1).replace("-", "_").lower()
        if key not in KEY_SECTION:
            raise ConfigError(f"unknown option --{m.group(1)}")
        raw[key] = (m.group(2), f"flag --{m.group(1)}")
    return raw


def _build_medium(values) -> MediumParams:
    base = {}
    if values["preset"]:
        if values["preset"] not in PRESETS:
            raise ConfigError(f"unknown preset {values['preset']!r}")
        base.update(PRESETS[values["preset"]])
    for key in SCHEMA["medium"]:
        if key == "preset":
            continue
        if values[key] is not None and (key in values.get("_explicit", ()) or key not in base):
            base[key] = values[key]
    try:
        return MediumParams(**base)
    except (DomainError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def parse_config(command: str, config_file: Optional[str] = None, flags=(), out=None) -> RunConfig:
    """Merge defaults, an optional INI file and ``--key=value`` flags.

    Raises
    ------
    ConfigError
        Parse errors (with line numbers), unknown keys and invalid values.
    """
    if command not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {command!r}")
    raw = _read_file(Path(config_file)) if config_file else {}
    raw.update(_parse_flags(list(flags)))
    values = {k: default for keys in SCHEMA.values() for k, (_, default) in keys.items()}
    values.update(SUBCOMMAND_DEFAULTS[command])
    explicit = set()
    for key, (text, where) in raw.items():
        parse = SCHEMA[KEY_SECTION[key]][key][0]
        try:
            values[key] = parse(text)
        except ValueError:
            raise ConfigError(f"invalid value {text!r} for {key} ({where})") from None
        explicit.add(key)
    values["_explicit"] = explicit
    medium = _build_medium(values)
    del values["_explicit"]
    out = out if out is not None else values["out"]
    if not out:
        raise ConfigError("an output directory is required (--out DIR)")
    workers = values["workers"] if values["workers"] is not None else default_workers()
    if workers < 1:
        raise ConfigError("workers >= 1")
    for key in ("count", "period_count"):
        if values[key] is not None and values[key] < 2:
            raise ConfigError("sweep counts >= 2")
    if values["scale"] not in ("linear", "log"):
        raise ConfigError("scale must be 'linear' or 'log'")
    if values["units"] not in ("delta_pi", "gamma21"):
        raise ConfigError("units must be 'delta_pi' or 'gamma21'")
    try:
        PulseKind(values["kind"])
    except ValueError:
        raise ConfigError(f"unknown pulse kind {values['kind']!r}") from None
    sources = {key: where for key, (_, where) in raw.items()}
    return RunConfig(command, values, medium, Path(out), workers, sources)


# -- helpers ----------------------------------------------------------------


def _sweep(cfg: RunConfig, start_key="start", stop_key="stop", count_key="count"):
    start, stop, count = cfg.get(start_key), cfg.get(stop_key), cfg.get(count_key)
    if cfg.get("scale") == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError("log sweeps need positive bounds")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _detunings(cfg: RunConfig, medium: MediumParams):
    grid = np.linspace(cfg.get("start"), cfg.get("stop"), cfg.get("count"))
    if cfg.get("units") == "delta_pi":
        grid = grid * delta_pi(medium)
    return grid


def _safe_delta_pi(medium):
    return delta_pi(medium) if medium.is_three_level else math.nan


def _pulse(cfg: RunConfig, medium: MediumParams) -> PulseSpec:
    kind = PulseKind(cfg.get("kind"))
    delta_p = cfg.get("delta_p")
    if kind is PulseKind.SQUARE and cfg.get("duration") is None:
        return default_square(medium, delta_p).replace(switch_time=cfg.get("switch_time"))
    period = cfg.get("period")
    if kind is PulseKind.PERIODIC_SQUARE and period is None:
        period = 1.0
    try:
        return PulseSpec(kind, delta_p=delta_p, switch_time=cfg.get("switch_time"),
                         duration=cfg.get("duration"), period=period)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def _grid(cfg: RunConfig, medium, pulse) -> Optional[SpectralGrid]:
    span, n = cfg.get("span"), cfg.get("n_points")
    if span is None and n is None:
        return None
    base = default_grid(medium, pulse, span)
    return SpectralGrid(base.span, n if n is not None else base.n_points)


def _fmt(x) -> str:
    return "%.12g" % x


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([r if isinstance(r, str) else _fmt(r) for r in row])


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "eitflash"
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    return plt, fig, ax


def _save(plt, fig, path: Path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# -- traces -----------------------------------------------------------------


def _trace(cfg: RunConfig, medium: MediumParams):
    """Trace for the configured pulse, thinned to about ``n_samples`` points.

    The thinning keeps the sample nearest to ``0+`` so the flash peak at
    extinction survives.
    """
    pulse = _pulse(cfg, medium)
    t_start, t_stop = cfg.get("t_start"), cfg.get("t_stop")
    window = (t_start, t_stop) if t_start is not None and t_stop is not None else None
    if pulse.kind is PulseKind.SQUARE:
        grid = _grid(cfg, medium, pulse) or default_grid(medium, pulse)
        if window is None:
            tail = 8 * group_delay(medium) if medium.is_three_level else 50.0
            window = (pulse.rise_time - 0.1 * pulse.duration, pulse.switch_time + tail)
        # Shift the window so that a sample lands on 0+.
        anchor = zero_plus(pulse, medium)
        k = math.ceil((anchor - window[0]) / grid.dt)
        start = anchor - k * grid.dt
        trace = transmit_trace(pulse, medium, grid, (start, window[1]))
        keep = trace.index_of(anchor)
    else:
        n = cfg.get("n_samples")
        if window is None:
            if pulse.kind is PulseKind.PERIODIC_SQUARE:
                window = (pulse.switch_time - pulse.period, pulse.switch_time + pulse.period)
            else:
                span = 10 * flash_time_scale(medium)
                window = (pulse.switch_time - span, pulse.switch_time + span)
        times = np.linspace(window[0], window[1], n)
        if pulse.kind is PulseKind.PERIODIC_SQUARE:
            trace = transmit_periodic(pulse, medium, times, method=cfg.get("periodic_method"),
                                      tol=cfg.get("periodic_tol"))
        else:
            trace = sample_trace(pulse, medium, times[0], times[1] - times[0], n, cfg.get("rtol"))
        keep = 0
    stride = max(1, math.ceil(len(trace) / cfg.get("n_samples")))
    index = np.arange(keep % stride, len(trace), stride)
    return trace, index


def _trace_rows(trace, index):
    t = trace.times[index]
    e = trace.samples[index]
    return t, e


def run_trace(cfg: RunConfig) -> Dict[str, Any]:
    trace, index = _trace(cfg, cfg.medium)
    t, e = _trace_rows(trace, index)
    _write_csv(cfg.out / "trace.csv", ["t_gamma21", "re_E", "im_E", "intensity"],
               zip(t, e.real, e.imag, np.abs(e) ** 2))
    if cfg.get("plot"):
        plt, fig, ax = _figure()
        ax.plot(t, np.abs(e) ** 2, lw=0.8, label="transmitted")
        ax.plot(t, np.abs(np.asarray([complex(v) for v in
                                      _incident(trace.pulse, t)])) ** 2, "k:", lw=0.8, label="incident")
        ax.set_xlabel(r"$t\,\gamma_{21}$")
        ax.set_ylabel(r"$I/I_i$")
        ax.legend()
        _save(plt, fig, cfg.out / "trace.svg")
    zp = zero_plus(trace.pulse, cfg.medium) if trace.pulse.has_falling_edge else None
    info = {"backend": trace.backend, "n_samples": int(len(index))}
    if trace.grid is not None:
        info["grid"] = {"span": trace.grid.span, "n_points": trace.grid.n_points}
    if zp is not None and trace.t0 <= zp <= trace.times[-1]:
        info["i0plus"] = float(trace.intensity[trace.index_of(zp)])
    return info


def _incident(pulse, t):
    from .pulse import incident_amplitude

    return np.atleast_1d(incident_amplitude(pulse, t))


def run_decompose(cfg: RunConfig) -> Dict[str, Any]:
    trace, index = _trace(cfg, cfg.medium)
    fields = decompose(trace, cfg.medium)
    rows = []
    for name, comp in fields.components():
        e = comp.samples[index]
        t = comp.times[index]
        rows.extend(zip([name] * len(t), t, e.real, e.imag, np.abs(e) ** 2))
    _write_csv(cfg.out / "decompose.csv", ["component", "t_gamma21", "re_E", "im_E", "intensity"],
               rows)
    if cfg.get("plot"):
        plt, fig, ax = _figure()
        for name, comp in fields.components():
            ax.plot(comp.times[index], comp.samples[index].real, lw=0.8, label=f"Re {name}")
        ax.set_xlabel(r"$t\,\gamma_{21}$")
        ax.set_ylabel("Re E")
        ax.legend()
        _save(plt, fig, cfg.out / "decompose.svg")
    residual = float(np.max(np.abs(fields.reconstruct() - trace.samples)))
    return {"backend": trace.backend, "reconstruction_residual": residual}


# -- scans ------------------------------------------------------------------


def run_fringe(cfg: RunConfig) -> Dict[str, Any]:
    medium = cfg.medium
    pulse = _pulse(cfg, medium)
    grid = _detunings(cfg, medium)
    scan = fringe_scan(medium, pulse, grid, workers=cfg.workers)
    dpi = _safe_delta_pi(medium)
    _write_csv(cfg.out / "fringe.csv", ["delta_p_gamma21", "delta_p_over_delta_pi", "i0plus"],
               zip(scan.detunings, scan.detunings / dpi, scan.i0plus))
    if cfg.get("plot"):
        plt, fig, ax = _figure()
        ax.plot(scan.detunings / dpi if medium.is_three_level else scan.detunings, scan.i0plus)
        ax.set_xlabel(r"$\delta_p/\delta_\pi$" if medium.is_three_level else r"$\delta_p/\gamma_{21}$")
        ax.set_ylabel(r"$I(0^+)$")
        _save(plt, fig, cfg.out / "fringe.svg")
    k = int(np.argmax(scan.i0plus))
    return {"max_delta_p": float(scan.detunings[k]), "max_i0plus": float(scan.i0plus[k]),
            "delta_pi": dpi}


def _write_map(cfg, name, x, y, values, xlabel, ylabel, logy=False):
    rows = ((xv, yv, values[i, j]) for i, yv in enumerate(y) for j, xv in enumerate(x))
    _write_csv(cfg.out / f"{name}.csv", ["x", "y", "value"], rows)
    if cfg.get("plot"):
        plt, fig, ax = _figure()
        mesh = ax.pcolormesh(x, y, values, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=r"$I(0^+)$")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        _save(plt, fig, cfg.out / f"{name}.svg")


def run_b0map(cfg: RunConfig) -> Dict[str, Any]:
    b0s = cfg.get("b0_values")
    if len(b0s) < 2:
        raise ConfigError("sweep counts >= 2")
    grid = np.linspace(cfg.get("start"), cfg.get("stop"), cfg.get("count"))
    fmap = fringe_map_vs_b0(cfg.medium, b0s, grid, _pulse(cfg, cfg.medium),
                            normalized=True, workers=cfg.workers)
    _write_map(cfg, "b0map", grid, fmap.b0, fmap.values, r"$\delta_p/\delta_\pi$", r"$b_0$")
    return {"rows": len(b0s)}


def run_modmap(cfg: RunConfig) -> Dict[str, Any]:
    periods = np.geomspace(cfg.get("period_start"), cfg.get("period_stop"), cfg.get("period_count"))
    grid = _detunings(cfg, cfg.medium)
    mmap = modulation_map(cfg.medium, periods, grid, workers=cfg.workers)
    dpi = _safe_delta_pi(cfg.medium)
    _write_map(cfg, "modmap", grid / dpi, periods, mmap.values, r"$\delta_p/\delta_\pi$",
               r"$T\gamma_{21}$", logy=True)
    try:
        i_max, contrast = contrast_curve(mmap)
        return {"i_max": i_max.tolist(), "contrast": contrast.tolist()}
    except EitflashError as exc:
        return {"contrast_curve": f"unavailable: {exc}"}


def run_doppler(cfg: RunConfig) -> Dict[str, Any]:
    temps = cfg.get("temperatures")
    if len(temps) < 2:
        raise ConfigError("sweep counts >= 2")
    grid = _detunings(cfg, cfg.medium)
    scans = doppler_fringe_scan(cfg.medium, temps, grid, _pulse(cfg, cfg.medium), cfg.workers)
    values = np.array([s.i0plus for s in scans])
    dpi = _safe_delta_pi(cfg.medium)
    rows = ((xv / dpi, T, values[i, j]) for i, T in enumerate(temps) for j, xv in enumerate(grid))
    _write_csv(cfg.out / "doppler.csv", ["x", "y", "value"], rows)
    if cfg.get("plot"):
        plt, fig, ax = _figure()
        for T, s in zip(temps, scans):
            ax.plot(grid / dpi, s.i0plus, label=f"{T:g} K")
        ax.set_xlabel(r"$\delta_p/\delta_\pi$")
        ax.set_ylabel(r"$I(0^+)$")
        ax.legend()
        _save(plt, fig, cfg.out / "doppler.svg")
    return {"temperatures": list(map(float, temps))}


def run_delay(cfg: RunConfig) -> Dict[str, Any]:
    medium = cfg.medium
    pulse = _pulse(cfg, medium)
    if pulse.kind is not PulseKind.SQUARE:
        raise ConfigError("delay needs a square pulse")
    grid = _grid(cfg, medium, pulse) or default_grid(medium, pulse)
    trace = transmit_trace(pulse, medium, grid)
    methods = ["half_amplitude", "e_fold", "centroid"]
    chosen = cfg.get("delay_method")
    if chosen not in methods:
        raise ConfigError(f"unknown delay_method {chosen!r}")
    formula = group_delay(medium)
    rows = []
    for m in methods:
        measured = measure_group_delay(trace, m)
        rows.append((m, measured, formula, measured / formula - 1))
    _write_csv(cfg.out / "delay.csv",
               ["method", "delay_gamma21", "formula_gamma21", "relative_error"], rows)
    if cfg.get("plot"):
        plt, fig, ax = _figure()
        stride = max(1, len(trace) // cfg.get("n_samples"))
        ax.plot(trace.times[::stride] - pulse.rise_time, trace.intensity[::stride], lw=0.8)
        for m, measured, _, _ in rows:
            ax.axvline(measured, ls="--", lw=0.6, label=m)
        ax.axvline(formula, color="k", lw=0.6, label="formula")
        ax.set_xlabel(r"$(t-t_{on})\,\gamma_{21}$")
        ax.set_ylabel(r"$I/I_i$")
        ax.legend()
        _save(plt, fig, cfg.out / "delay.svg")
    return {"chosen": chosen, "delay": dict((r[0], r[1]) for r in rows), "formula": formula}


def run_decay(cfg: RunConfig) -> Dict[str, Any]:
    b0s = cfg.get("b0_values")
    if len(b0s) < 2:
        raise ConfigError("sweep counts >= 2")
    rows = []
    for b0 in b0s:
        medium = cfg.medium.replace(b0=float(b0))
        tau_f = flash_time_scale(medium)
        lo = cfg.get("fit_start") if cfg.get("fit_start") is not None else tau_f / 10
        hi = cfg.get("fit_stop") if cfg.get("fit_stop") is not None else 3 * tau_f
        trace = flash_decay_trace(medium, cfg.get("delta_p"), window=(lo, hi))
        rows.append((b0, fit_flash_decay(trace, (lo, hi)), tau_f))
    b, tau = np.array([r[0] for r in rows]), np.array([r[1] for r in rows])
    slope = float(np.polyfit(np.log(b), np.log(tau), 1)[0])
    _write_csv(cfg.out / "decay.csv", ["b0", "tau_fit_gamma21", "tau_f_gamma21"], rows)
    if cfg.get("plot"):
        plt, fig, ax = _figure()
        ax.loglog(b, tau, "o-", label="fit")
        ax.loglog(b, 1 / b, "k:", label=r"$1/b_0$")
        ax.set_xlabel(r"$b_0$")
        ax.set_ylabel(r"$\tau\,\gamma_{21}$")
        ax.legend()
        _save(plt, fig, cfg.out / "decay.svg")
    return {"loglog_slope": slope}


RUNNERS = {
    "trace": run_trace,
    "fringe": run_fringe,
    "b0map": run_b0map,
    "modmap": run_modmap,
    "doppler": run_doppler,
    "decompose": run_decompose,
    "delay": run_delay,
    "decay": run_decay,
}


def run_subcommand(cfg: RunConfig) -> Dict[str, Any]:
    """Run one subcommand and write its CSV, SVG and metadata files."""
    cfg.out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    summary = RUNNERS[cfg.command](cfg)
    meta = {
        "command": cfg.command,
        "version": __version__,
        "config": cfg.as_dict(),
        "sources": cfg.sources,
        "tolerances": {
            "quadrature_rtol": cfg.get("rtol"),
            "periodic_tol": cfg.get("periodic_tol"),
            "periodic_method": cfg.get("periodic_method"),
        },
        "summary": summary,
        "wall_time_s": time.perf_counter() - started,
    }
    with open(cfg.out / f"{cfg.command}.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return meta


def _report(kind, message, code):
    record = {"error": kind, "message": message, "exit_code": code}
    sys.stderr.write(json.dumps(record) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eitflash",
        description="Transient probe transmission through two-level and Lambda EIT media.",
        epilog="Any config key may be given as --key=value (e.g. --delta-p=3.9e-3).",
    )
    parser.add_argument("command", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="INI file with [medium] [pulse] [grid] [sweep] [output]")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--version", action="version", version=__version__)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args, rest = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = parse_config(args.command, args.config, rest, args.out)
    except EitflashError as exc:
        return _report(type(exc).__name__, str(exc), EXIT_CONFIG)
    try:
        run_subcommand(cfg)
    except ConfigError as exc:
        return _report(type(exc).__name__, str(exc), EXIT_CONFIG)
    except EitflashError as exc:
        code = EXIT_CONFIG if isinstance(exc, DomainError) else EXIT_NUMERIC
        return _report(type(exc).__name__, str(exc), code)
    except (ArithmeticError, ValueError, MemoryError) as exc:
        return _report(type(exc).__name__, str(exc), EXIT_NUMERIC)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
