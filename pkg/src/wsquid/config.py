"""Run configuration files.

An INI-style file with ``[section]`` headers and ``key = value`` lines.
Rates are SI (s^-1) unless suffixed with ``g`` (units of the reference
coupling); times are SI seconds unless suffixed with ``/g``. Fluxes are
webers unless suffixed with ``phi0``. Example::

    [model]
    N = 3
    g = 1.8e8
    gamma = 4e5
    kappa = 1.32e6

    [pulse]
    shape = gaussian
    amplitude = 40 g
    width = 4 /g

    [protocol]
    stage = generation
    gen_duration = 25 /g
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

from .dynamics import IntegratorConfig
from .errors import ConfigError
from .model import GaussianPulse, ModelParams, PiecewiseLinearPulse, reference_pulse
from .squid_spectrum import (
    FLUX_QUANTUM,
    CouplingGeometry,
    FluxGrid,
    SquidSpec,
    coupling_constants,
    default_grid,
    solve_flux_levels,
)

SECTIONS = {
    "model": {"n", "g", "gamma", "kappa", "k", "couplings"},
    "pulse": {"shape", "amplitude", "width", "center", "knots"},
    "protocol": {"stage", "initial", "prep_duration", "gen_duration", "prep_amplitude", "prep_width"},
    "integrator": {"dt", "method", "norm_check_interval"},
    "output": {"sample_stride", "prefix"},
    "device": {
        "capacitance", "inductance", "critical_current", "josephson_energy", "bias_flux",
        "phi_min", "phi_max", "num_points", "cavity_frequency", "cavity_overlap",
        "drive_overlap_ratio", "num_levels",
    },
    "mc": {"n_traj", "seed"},
    "oracle": {"n_max", "tolerance", "t_end", "reduced_couplings"},
}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


def rate_to_dimensionless(rate_si, g_si):
    return rate_si / g_si


def rate_to_si(rate, g_si):
    return rate * g_si


def time_to_dimensionless(t_si, g_si):
    return t_si * g_si


def time_to_si(t, g_si):
    return t / g_si


@dataclass
class DeviceConfig:
    spec: SquidSpec
    grid: FluxGrid | None
    cavity_frequency: float | None
    cavity_overlap: float | None
    drive_overlap_ratio: float
    num_levels: int = 3


@dataclass
class RunConfig:
    params: ModelParams
    g_si: float | None
    pulse: object = field(default_factory=reference_pulse)
    stage: str = "generation"
    initial: str = "cavity"
    prep_duration: float = 25.0
    gen_duration: float = 25.0
    prep_pulse: object = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    prefix: str = ""
    device: DeviceConfig | None = None
    n_traj: int | None = None
    seed: int = 0
    n_max: int = 2
    oracle_tolerance: float = 1e-6
    oracle_t_end: float = 50.0
    # couplings for the reduced side of oracle-check only (sensitivity runs)
    oracle_reduced_couplings: tuple | None = None
    path: Path | None = None


class _Reader:
    def __init__(self, path):
        self.path = Path(path)
        try:
            self.text = self.path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", self.path) from None
        self.lines = self.text.splitlines()
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            cp.read_string(self.text, source=str(self.path))
        except configparser.ParsingError as exc:
            lineno = exc.errors[0][0] if exc.errors else None
            raise ConfigError("malformed line", self.path, lineno) from None
        except configparser.Error as exc:
            raise ConfigError(str(exc).splitlines()[0], self.path, getattr(exc, "lineno", None)) from None
        self.cp = cp
        for sec in cp.sections():
            if sec.lower() not in SECTIONS:
                raise ConfigError(f"unknown section [{sec}]", self.path, self.line_of(sec))
            for key in cp[sec]:
                if key not in SECTIONS[sec.lower()]:
                    raise ConfigError(f"unknown key {key!r} in [{sec}]", self.path, self.line_of(sec, key))

    def line_of(self, section, key=None):
        in_sec = False
        for i, raw in enumerate(self.lines, start=1):
            s = raw.strip()
            if s.startswith("["):
                in_sec = s.strip("[]").strip().lower() == section.lower()
                if in_sec and key is None:
                    return i
            elif in_sec and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", s, re.I):
                return i
        return None

    def has(self, section, key=None):
        if not self.cp.has_section(section):
            return False
        return key is None or self.cp.has_option(section, key)

    def raw(self, section, key, default=None):
        if not self.has(section, key):
            return default
        return self.cp.get(section, key)

    def fail(self, section, key, msg):
        raise ConfigError(f"[{section}] {key}: {msg}", self.path, self.line_of(section, key))

    def number(self, section, key, default=None, kind=float):
        value = self.raw(section, key)
        if value is None:
            return default
        m = _NUMBER.match(value)
        if not m or m.group(2):
            self.fail(section, key, f"expected a plain number, got {value!r}")
        try:
            return kind(m.group(1))
        except ValueError:
            self.fail(section, key, f"expected {kind.__name__}, got {value!r}")

    def quantity(self, section, key, units, default=None):
        """Parse ``<number> [unit]`` into (number, units[suffix])."""
        value = self.raw(section, key)
        if value is None:
            return default
        return self._parse_quantity(section, key, value, units)

    def _parse_quantity(self, section, key, value, units):
        m = _NUMBER.match(value)
        if not m:
            self.fail(section, key, f"cannot parse {value!r}")
        suffix = m.group(2).replace(" ", "")
        if suffix not in units:
            self.fail(section, key, f"unknown unit {m.group(2)!r} (allowed: {', '.join(repr(u) for u in units)})")
        return float(m.group(1)), units[suffix]


RATE_UNITS = {"": "si", "/s": "si", "s^-1": "si", "1/s": "si", "g": "g"}
TIME_UNITS = {"": "si", "s": "si", "/g": "g", "1/g": "g"}
FLUX_UNITS = {"": 1.0, "Wb": 1.0, "phi0": FLUX_QUANTUM}


def _rate(reader, section, key, g_si, default=None):
    q = reader.quantity(section, key, RATE_UNITS)
    if q is None:
        return default
    value, unit = q
    if unit == "g":
        return value
    if g_si is None:
        reader.fail(section, key, "SI rate given but the reference coupling g is unknown")
    return rate_to_dimensionless(value, g_si)


def _time(reader, section, key, g_si, default=None):
    q = reader.quantity(section, key, TIME_UNITS)
    if q is None:
        return default
    value, unit = q
    if unit == "g":
        return value
    if g_si is None:
        reader.fail(section, key, "SI time given but the reference coupling g is unknown")
    return time_to_dimensionless(value, g_si)


def _flux(reader, section, key, default=None):
    q = reader.quantity(section, key, FLUX_UNITS)
    if q is None:
        return default
    return q[0] * q[1]


def _device(reader):
    s = "device"
    try:
        spec = SquidSpec(
            capacitance=reader.number(s, "capacitance"),
            inductance=reader.number(s, "inductance"),
            bias_flux=_flux(reader, s, "bias_flux"),
            josephson_energy=reader.number(s, "josephson_energy"),
            critical_current=reader.number(s, "critical_current"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[device] {exc}", reader.path, reader.line_of(s)) from None
    grid = None
    if reader.has(s, "phi_min") or reader.has(s, "phi_max"):
        try:
            grid = FluxGrid(_flux(reader, s, "phi_min"), _flux(reader, s, "phi_max"), reader.number(s, "num_points", 4096, int))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[device] grid: {exc}", reader.path, reader.line_of(s)) from None
    elif reader.has(s, "num_points"):
        grid = default_grid(spec, reader.number(s, "num_points", 4096, int))
    return DeviceConfig(
        spec,
        grid,
        reader.number(s, "cavity_frequency"),
        reader.number(s, "cavity_overlap"),
        reader.number(s, "drive_overlap_ratio", 1.0),
        reader.number(s, "num_levels", 3, int),
    )


def _pulse(reader, section, g_si):
    shape = (reader.raw(section, "shape", "gaussian") or "").strip().lower()
    if shape == "gaussian":
        try:
            return GaussianPulse(
                _rate(reader, section, "amplitude", g_si, 40.0),
                _time(reader, section, "width", g_si, 4.0),
                _time(reader, section, "center", g_si, 0.0),
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"[{section}] {exc}", reader.path, reader.line_of(section)) from None
    if shape in ("piecewise", "piecewise_linear"):
        raw = reader.raw(section, "knots")
        if not raw:
            reader.fail(section, "knots", "piecewise pulse needs knots")
        knots = []
        for item in raw.split(","):
            if ":" not in item:
                reader.fail(section, "knots", f"knot {item.strip()!r} is not 'time : value'")
            t_txt, v_txt = item.split(":", 1)
            t, tu = reader._parse_quantity(section, "knots", t_txt, TIME_UNITS)
            v, vu = reader._parse_quantity(section, "knots", v_txt, RATE_UNITS)
            if (tu == "si" or vu == "si") and g_si is None:
                reader.fail(section, "knots", "SI knot given but the reference coupling g is unknown")
            knots.append((t if tu == "g" else time_to_dimensionless(t, g_si), v if vu == "g" else rate_to_dimensionless(v, g_si)))
        try:
            return PiecewiseLinearPulse(tuple(knots))
        except ValueError as exc:
            reader.fail(section, "knots", str(exc))
    reader.fail(section, "shape", f"unknown pulse shape {shape!r}")


def _number_list(reader, section, key):
    if not reader.has(section, key):
        return None
    try:
        return tuple(float(x) for x in reader.raw(section, key).split(","))
    except ValueError:
        reader.fail(section, key, "expected a comma-separated list of numbers")


def device_coupling(device: DeviceConfig):
    """Reference coupling g (rad/s) implied by a [device] section."""
    levels = solve_flux_levels(device.spec, device.grid, num_levels=device.num_levels)
    wc = device.cavity_frequency or levels.transition_frequency_0e
    geom = CouplingGeometry(wc, device.cavity_overlap, device.drive_overlap_ratio)
    g, _ = coupling_constants(levels, geom, device.spec)
    return abs(g), levels, geom


def load_config(path, need_coupling=True) -> RunConfig:
    """Parse a run configuration; raises ConfigError with file/line on problems.

    With ``need_coupling=False`` a file holding only a [device] without an
    overlap is accepted and ``g_si`` is left as None.
    """
    r = _Reader(path)
    device = _device(r) if r.has("device") else None

    g_si = r.number("model", "g") if r.has("model", "g") else None
    if g_si is None:
        if device is not None and device.cavity_overlap is not None:
            g_si, _, _ = device_coupling(device)
        elif need_coupling:
            raise ConfigError("need [model] g or a [device] section with cavity_overlap", r.path)
    if g_si is not None and not g_si > 0:
        r.fail("model", "g", "must be positive")

    N = r.number("model", "n", 3, int)
    couplings = _number_list(r, "model", "couplings")
    try:
        params = ModelParams(
            N,
            couplings=couplings,
            gamma=_rate(r, "model", "gamma", g_si, 0.0),
            kappa=_rate(r, "model", "kappa", g_si, 0.0),
            K=r.number("model", "k", 1.0),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[model] {exc}", r.path, r.line_of("model")) from None

    pulse = _pulse(r, "pulse", g_si) if r.has("pulse") else reference_pulse()

    stage = (r.raw("protocol", "stage", "generation") or "").strip().lower()
    if stage not in ("generation", "preparation", "full"):
        r.fail("protocol", "stage", f"unknown stage {stage!r}")
    initial = (r.raw("protocol", "initial", "cavity") or "").strip().lower()
    if initial not in ("cavity", "dark"):
        r.fail("protocol", "initial", f"unknown initial state {initial!r}")
    prep_duration = _time(r, "protocol", "prep_duration", g_si, 25.0)
    prep_pulse = None
    if r.has("protocol", "prep_amplitude") or r.has("protocol", "prep_width"):
        base = pulse if isinstance(pulse, GaussianPulse) else reference_pulse()
        prep_pulse = GaussianPulse(
            _rate(r, "protocol", "prep_amplitude", g_si, base.amplitude),
            _time(r, "protocol", "prep_width", g_si, base.width),
            prep_duration,
        )

    try:
        integrator = IntegratorConfig(
            dt=_time(r, "integrator", "dt", g_si, 1e-3),
            method=(r.raw("integrator", "method", "rk4") or "").strip().lower(),
            norm_check_interval=r.number("integrator", "norm_check_interval", 1, int),
            sample_stride=r.number("output", "sample_stride", 100, int),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[integrator] {exc}", r.path, r.line_of("integrator")) from None

    return RunConfig(
        params=params,
        g_si=g_si,
        pulse=pulse,
        stage=stage,
        initial=initial,
        prep_duration=prep_duration,
        gen_duration=_time(r, "protocol", "gen_duration", g_si, 25.0),
        prep_pulse=prep_pulse,
        integrator=integrator,
        prefix=(r.raw("output", "prefix", "") or "").strip(),
        device=device,
        n_traj=r.number("mc", "n_traj", None, int),
        seed=r.number("mc", "seed", 0, int),
        n_max=r.number("oracle", "n_max", 2, int),
        oracle_tolerance=r.number("oracle", "tolerance", 1e-6),
        oracle_t_end=_time(r, "oracle", "t_end", g_si, 50.0),
        oracle_reduced_couplings=_number_list(r, "oracle", "reduced_couplings"),
        path=r.path,
    )
