"""Command line front end: run, sweep, verify, list-scenarios."""
from __future__ import annotations

import argparse
import io
import logging
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import ConfigError, FitError, QBMError
from .estimator import EntropyEvolution
from .models import fit_asymptote, make_desitter, make_inverted, make_static
from .simulation import COLUMNS, simulate

log = logging.getLogger("qbm_entropy")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_FAIL = 0, 2, 3, 4

_PARAM_MAP = {
    "scenario.name": "scenario", "scenario.k": "k", "scenario.gamma0": "gamma0",
    "scenario.T": "temperature", "scenario.sigma": "sigma", "scenario.r0": "r0",
    "scenario.c": "c", "scenario.H": "H", "scenario.z_i": "z_i",
    "scenario.x_variant": "x_variant", "bath.regime": "regime", "bath.omega_max": "omega_max",
    "solver.rtol": "rtol", "solver.atol": "atol", "solver.mode_source": "mode_source",
    "solver.a_method": "a_method",
}


def estimator_from_config(cfg):
    params = {p: cfg[k] for k, p in _PARAM_MAP.items() if cfg[k] is not None}
    if cfg["scenario.name"] == "desitter":
        params.pop("gamma0", None)
    return EntropyEvolution(**params)


def run_config(cfg):
    """Validate, build and simulate; returns the RunRecord."""
    cfg.validate()
    est = estimator_from_config(cfg).fit()
    rec = simulate(est.scenario_, cfg.grid(), r0=est.r0, sigma=est.sigma,
                   mode_source=est.mode_source_, a_method=est.a_method,
                   rtol=est.rtol, atol=est.atol)
    for note in rec.notes:
        log.info(note)
    return rec


def _preamble(cfg, command):
    lines = [f"# qbm_entropy {__version__} {command}"]
    lines += [f"# {line}" for line in cfg.to_text().splitlines()]
    return "\n".join(lines) + "\n"


def _fmt(v):
    return "%.17g" % v


def write_csv(fh, header, rows):
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(_fmt(v) for v in row) + "\n")


def parse_echo(text):
    """Recover the configuration from the preamble of an output file."""
    body = []
    for line in text.splitlines()[1:]:
        if not line.startswith("# "):
            break
        body.append(line[2:])
    return RunConfig.from_text("\n".join(body))


@dataclass
class Verdict:
    passed: bool
    law: str
    slope: float
    expected_slope: float
    tolerance: float
    intercept: float
    expected_intercept: float
    intercept_tolerance: float
    constancy: float
    window: tuple
    n: int

    def report(self):
        status = "PASS" if self.passed else "FAIL"
        parts = [f"{status} law={self.law}",
                 f"slope={self.slope:.6f} expected={self.expected_slope:.6f}±{self.tolerance:g}",
                 f"intercept={self.intercept:.6f}"]
        if self.expected_intercept is not None:
            parts.append(f"expected_intercept={self.expected_intercept:.6f}±{self.intercept_tolerance:g}")
        if self.constancy is not None:
            parts.append(f"max|S-r-mean|={self.constancy:.4f} (limit {self.intercept_tolerance:g})")
        parts.append(f"window=[{self.window[0]:.4g},{self.window[1]:.4g}] n={self.n}")
        return " ".join(parts)


def verify_series(r, S, law, window, tolerance=0.05, intercept_tolerance=0.1, check_constancy=False):
    """Fit S against r in the window and compare with an asymptotic law."""
    fit = fit_asymptote(r, S, window)
    ok = abs(fit.slope - law.slope) <= tolerance
    if law.intercept is not None:
        ok &= abs(fit.intercept - law.intercept) <= intercept_tolerance
    spread = None
    if check_constancy:
        r, S = np.asarray(r), np.asarray(S)
        m = (r >= window[0]) & (r <= window[1])
        d = S[m] - law.slope * r[m]
        spread = float(np.max(np.abs(d - d.mean())))
        ok &= spread <= intercept_tolerance
    return Verdict(bool(ok), law.name, fit.slope, law.slope, tolerance, fit.intercept,
                   law.intercept, intercept_tolerance, spread, fit.r_range, fit.n)


def _scenario_for(cfg):
    return estimator_from_config(cfg).fit().scenario_


def cmd_run(cfg, out):
    rec = run_config(cfg)
    out.write(_preamble(cfg, "run"))
    write_csv(out, COLUMNS, rec.as_array())
    return EXIT_OK


def cmd_sweep(cfg, out):
    cfg.validate()
    param, values = cfg["sweep.param"], cfg["sweep.values"]
    if param is None:
        raise ConfigError("sweep needs sweep.param and sweep.values", field="sweep.param")
    out.write(_preamble(cfg, "sweep"))
    rows = []
    for v in values:
        point = cfg.copy()
        point.values[param] = float(v)
        rec = run_config(point)
        arr = rec.as_array()
        rows.append(np.column_stack([np.full(len(arr), v), arr]))
    write_csv(out, (param,) + COLUMNS, np.vstack(rows))
    return EXIT_OK


def cmd_verify(cfg, out):
    law_name = cfg["verify.law"]
    if law_name is None:
        raise ConfigError("verify needs a law", field="verify.law")
    if cfg["verify.window"] is None:
        raise ConfigError("verify needs a window 'lo,hi' in r", field="verify.window")
    cfg.validate()
    try:
        law = _scenario_for(cfg).law(law_name)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0]), field="verify.law") from exc
    rec = run_config(cfg)
    verdict = verify_series(rec["r"], rec["S"], law, cfg["verify.window"],
                            cfg["verify.tolerance"], cfg["verify.intercept_tolerance"],
                            check_constancy=law_name == "zero_T")
    out.write(verdict.report() + "\n")
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_list(cfg, out):
    examples = [("static", make_static(1.0, 0.1, 1e5)),
                ("inverted", make_inverted(1.0, 0.05, 1e3)),
                ("desitter", make_desitter(1.0, 1.0, 0.1, 1e4))]
    for name, scn in examples:
        laws = ", ".join(f"{p.name} (slope {p.slope:g}; {p.validity})" for p in scn.predictions)
        out.write(f"{name}: {laws}\n")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "verify": cmd_verify, "list-scenarios": cmd_list}


def build_parser():
    p = argparse.ArgumentParser(prog="qbm-entropy",
                                description="Entropy of squeezed open quantum systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key=value configuration file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
        sp.add_argument("--quiet", action="store_true", help="suppress log output")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        cfg.apply_overrides(args.set)
        buf = io.StringIO()
        code = COMMANDS[args.command](cfg, buf)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FitError as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except QBMError as exc:
        where = getattr(exc, "last_time", None) or getattr(exc, "time", None)
        extra = f" (last good time {where!r})" if where is not None else ""
        print(f"numerical failure: {exc}{extra}", file=sys.stderr)
        return EXIT_NUMERIC
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:  # e.g. piped into head
            devnull = os.open(os.devnull, os.O_WRONLY)
            os.dup2(devnull, sys.stdout.fileno())
    return code


if __name__ == "__main__":
    sys.exit(main())
