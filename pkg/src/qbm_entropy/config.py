"""Flat ``key=value`` run configuration with dotted section names."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

_SCENARIOS = ("static", "inverted", "desitter")


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    return parse


def _float_list(text):
    vals = [float(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise ValueError("empty list")
    return vals


def _window(text):
    vals = _float_list(text)
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise ValueError("expected 'lo,hi' with lo < hi")
    return vals


# key -> (parser, default); None default means "unset"
SCHEMA = {
    "scenario.name": (_choice(*_SCENARIOS), "static"),
    "scenario.k": (float, 1.0),
    "scenario.gamma0": (float, 0.0),
    "scenario.T": (float, 0.0),
    "scenario.sigma": (float, None),
    "scenario.r0": (float, 0.0),
    "scenario.c": (float, 0.1),
    "scenario.H": (float, 1.0),
    "scenario.z_i": (float, -1e3),
    "scenario.z_stop": (float, -1e-3),
    "scenario.x_variant": (_choice("renamed", "initial", "numeric"), "renamed"),
    "bath.regime": (_choice("white", "spectral"), "white"),
    "bath.omega_max": (float, 1e3),
    "solver.rtol": (float, 1e-10),
    "solver.atol": (float, 1e-12),
    "solver.mode_source": (_choice("analytic", "numeric"), "analytic"),
    "solver.a_method": (_choice("auto", "quadrature"), "auto"),
    "grid.start": (float, None),
    "grid.stop": (float, None),
    "grid.count": (int, 200),
    "grid.spacing": (_choice("linear", "log"), None),
    "grid.values": (_float_list, None),
    "sweep.param": (str, None),
    "sweep.values": (_float_list, None),
    "verify.law": (_choice("high_T", "zero_T", "finite_T"), None),
    "verify.window": (_window, None),
    "verify.tolerance": (float, 0.05),
    "verify.intercept_tolerance": (float, 0.1),
}

_DEFAULT_STOP = {"static": 100.0, "inverted": 12.0}


def _format(value):
    if isinstance(value, list):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        if key in self.values:
            return self.values[key]
        return SCHEMA[key][1]

    def is_set(self, key):
        return key in self.values

    @classmethod
    def from_text(cls, text, source="<config>"):
        cfg = cls()
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{n}: expected key=value, got {raw.strip()!r}")
            key, val = (p.strip() for p in line.split("=", 1))
            cfg.set(key, val)
        return cfg

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_text(fh.read(), source=str(path))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", field="--config") from exc

    def set(self, key, text):
        if key not in SCHEMA:
            raise ConfigError("unknown key", field=key)
        parser = SCHEMA[key][0]
        try:
            self.values[key] = parser(text)
        except ValueError as exc:
            raise ConfigError(str(exc), field=key) from exc

    def apply_overrides(self, pairs):
        for pair in pairs or ():
            if "=" not in pair:
                raise ConfigError(f"expected key=value, got {pair!r}", field="--set")
            key, val = (p.strip() for p in pair.split("=", 1))
            self.set(key, val)
        return self

    def to_text(self):
        """Every key with its effective value; reparses to an equivalent config."""
        lines = []
        for key in SCHEMA:
            val = self[key]
            if val is not None:
                lines.append(f"{key}={_format(val)}")
        return "\n".join(lines) + "\n"

    def effective(self):
        return {k: self[k] for k in SCHEMA if self[k] is not None}

    def copy(self):
        return RunConfig(dict(self.values))

    # ------------------------------------------------------------------
    def validate(self):
        name = self["scenario.name"]
        k, g0, T = self["scenario.k"], self["scenario.gamma0"], self["scenario.T"]
        if not k > 0:
            raise ConfigError("must be positive", field="scenario.k")
        if g0 < 0:
            raise ConfigError("must be >= 0", field="scenario.gamma0")
        if T < 0:
            raise ConfigError("must be >= 0", field="scenario.T")
        if self["scenario.sigma"] is not None:
            if self.is_set("scenario.r0"):
                raise ConfigError("set either scenario.sigma or scenario.r0, not both",
                                  field="scenario.sigma")
            if not self["scenario.sigma"] > 0:
                raise ConfigError("must be positive", field="scenario.sigma")
        if name == "static" and not k > g0:
            raise ConfigError("static oscillator needs k > gamma0", field="scenario.gamma0")
        if name == "desitter":
            c = self["scenario.c"]
            if not 0 <= c < 0.5:
                raise ConfigError("must satisfy 0 <= c < 1/2", field="scenario.c")
            if not self["scenario.H"] > 0:
                raise ConfigError("must be positive", field="scenario.H")
            if not self["scenario.z_i"] < self["scenario.z_stop"] < 0:
                raise ConfigError("need z_i < z_stop < 0", field="scenario.z_stop")
            if self.is_set("scenario.gamma0"):
                raise ConfigError("de Sitter coupling is set by scenario.c and scenario.H",
                                  field="scenario.gamma0")
        if self["bath.regime"] == "white" and self.gamma0 > 0 and T == 0:
            raise ConfigError("white noise needs T > 0 when gamma0 > 0", field="scenario.T")
        if not self["bath.omega_max"] > 0:
            raise ConfigError("must be positive", field="bath.omega_max")
        for key in ("solver.rtol", "solver.atol"):
            if not self[key] > 0:
                raise ConfigError("must be positive", field=key)
        if self["grid.count"] < 1:
            raise ConfigError("must be >= 1", field="grid.count")
        if self.is_set("sweep.param") != self.is_set("sweep.values"):
            raise ConfigError("sweep.param and sweep.values go together", field="sweep.param")
        if self.is_set("sweep.param"):
            p = self["sweep.param"]
            if p not in SCHEMA or SCHEMA[p][0] is not float or p.startswith(("sweep.", "verify.")):
                raise ConfigError(f"cannot sweep {p!r}", field="sweep.param")
        self.grid()
        return self

    @property
    def gamma0(self):
        if self["scenario.name"] == "desitter":
            return self["scenario.c"] * self["scenario.H"]
        return self["scenario.gamma0"]

    def grid(self):
        """Output z values for this configuration."""
        name = self["scenario.name"]
        if self["grid.values"] is not None:
            z = np.array(self["grid.values"], dtype=float)
        else:
            n = self["grid.count"]
            if name == "desitter":
                start = self["grid.start"] if self["grid.start"] is not None else -1.0
                stop = self["grid.stop"] if self["grid.stop"] is not None else self["scenario.z_stop"]
                spacing = self["grid.spacing"] or "log"
            else:
                stop = self["grid.stop"] if self["grid.stop"] is not None else _DEFAULT_STOP[name]
                start = self["grid.start"] if self["grid.start"] is not None else stop / n
                spacing = self["grid.spacing"] or "linear"
            if spacing == "log":
                if start * stop <= 0:
                    raise ConfigError("log spacing needs start and stop of one sign", field="grid.spacing")
                z = np.sign(stop) * np.geomspace(abs(start), abs(stop), n)
            else:
                z = np.linspace(start, stop, n)
        if z.size == 0 or np.any(np.diff(z) <= 0):
            raise ConfigError("output grid must be strictly increasing", field="grid")
        if name == "desitter":
            if not (np.all(z > self["scenario.z_i"]) and np.all(z < 0)):
                raise ConfigError("de Sitter output z must lie in (z_i, 0)", field="grid")
        elif np.any(z <= 0):
            raise ConfigError("output z must be positive", field="grid")
        return z
