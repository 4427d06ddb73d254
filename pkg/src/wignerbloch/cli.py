"""Command-line scenario runner.

    wignerbloch point  --preset paper-nr
    wignerbloch sweep  --config scan.json --beta '{"start": 0, "stop": 20, "count": 10, "spacing": "log"}' --output csv
    wignerbloch verify --preset drift

A scenario is one flat JSON document.  Every field can be overridden by a
flag of the same name (underscores become dashes).  Exit codes: 0 ok,
2 bad config, 3 numerical failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from . import bloch
from .integrator import IntegratorConfig
from .kinematics import four_velocity, unit
from .verification import Scenario, run_battery
from .wavepacket import WavepacketSpec, normalize

log = logging.getLogger("wignerbloch")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4

SWEEP_COLUMNS = (
    "beta",
    "lambda",
    "mu_x",
    "mu_y",
    "mu_z",
    "mu_approx_z",
    "purity_sq_exact",
    "purity_sq_formula",
    "purity_sq_bound",
    "regime_warning",
)

REQUIRED = ("mass", "sigma", "boost_axis", "beta")
PRESETS = ("paper-nr", "drift", "ultra")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    mass: float
    sigma: tuple[float, float, float]
    boost_axis: tuple[float, float, float]
    beta: float | dict
    p0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    x0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    method: str = "tensor_gauss"
    order_per_axis: int = 16
    samples: int = 1_000_000
    seed: int = 0
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    output: str = "json"
    mode: str = "point"

    @property
    def spec(self) -> WavepacketSpec:
        return WavepacketSpec(self.mass, np.array(self.sigma), np.array(self.p0), np.array(self.x0))

    @property
    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(self.method, self.order_per_axis, self.samples, self.seed, self.rel_tol, self.abs_tol)

    @property
    def axis(self) -> np.ndarray:
        return unit(self.boost_axis)

    def betas(self) -> np.ndarray:
        """Rapidities to evaluate; a single value unless ``beta`` is a sweep.

        ``log`` spacing is uniform in ``log(1 + beta)`` so a sweep may start at 0.
        """
        if not isinstance(self.beta, dict):
            return np.array([self.beta])
        b = self.beta
        if b["spacing"] == "linear":
            return np.linspace(b["start"], b["stop"], b["count"])
        return np.expm1(np.linspace(math.log1p(b["start"]), math.log1p(b["stop"]), b["count"]))


def _vector(path: str, value) -> tuple[float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{path}: expected a list of 3 numbers, got {value!r}")
    return tuple(_real(f"{path}[{i}]", v) for i, v in enumerate(value))


def _real(path: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite, got {value!r}")
    return float(value)


def _integer(path: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _choice(path: str, value, options) -> str:
    if value not in options:
        raise ConfigError(f"{path}: expected one of {', '.join(options)}, got {value!r}")
    return value


def _beta(value):
    if not isinstance(value, dict):
        beta = _real("config.beta", value)
        if beta < 0:
            raise ConfigError(f"config.beta: rapidity must be >= 0, got {beta}")
        return beta
    unknown = set(value) - {"start", "stop", "count", "spacing"}
    if unknown:
        raise ConfigError(f"config.beta: unknown sweep fields {sorted(unknown)}")
    for key in ("start", "stop", "count"):
        if key not in value:
            raise ConfigError(f"config.beta.{key}: required field missing")
    sweep = {
        "start": _real("config.beta.start", value["start"]),
        "stop": _real("config.beta.stop", value["stop"]),
        "count": _integer("config.beta.count", value["count"]),
        "spacing": _choice("config.beta.spacing", value.get("spacing", "linear"), ("linear", "log")),
    }
    if sweep["count"] < 2:
        raise ConfigError(f"config.beta.count: a sweep needs at least 2 points, got {sweep['count']}")
    if min(sweep["start"], sweep["stop"]) < 0:
        raise ConfigError("config.beta: rapidities must be >= 0")
    return sweep


def parse_config(raw: dict) -> ScenarioConfig:
    """Validate a flat config mapping; errors name the offending field path."""
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"config: unknown fields {sorted(unknown)}")
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(f"config.{key}: required field missing")
    values = dict(raw)
    values["mass"] = _real("config.mass", raw["mass"])
    if values["mass"] <= 0:
        raise ConfigError(f"config.mass: must be positive, got {values['mass']}")
    for key in ("sigma", "boost_axis", "p0", "x0"):
        if key in raw:
            values[key] = _vector(f"config.{key}", raw[key])
    for i, s in enumerate(values["sigma"]):
        if s <= 0:
            raise ConfigError(f"config.sigma[{i}]: width must be positive, got {s}")
    values["beta"] = _beta(raw["beta"])
    for key in ("order_per_axis", "samples", "seed"):
        if key in raw:
            values[key] = _integer(f"config.{key}", raw[key])
    for key in ("rel_tol", "abs_tol"):
        if key in raw:
            values[key] = _real(f"config.{key}", raw[key])
    if "method" in raw:
        _choice("config.method", raw["method"], ("tensor_gauss", "monte_carlo"))
    if "output" in raw:
        _choice("config.output", raw["output"], ("csv", "json"))
    if "mode" in raw:
        _choice("config.mode", raw["mode"], ("point", "sweep", "verify"))
    cfg = ScenarioConfig(**values)
    for path, build in (("config.boost_axis", lambda: cfg.axis), ("config (packet)", lambda: cfg.spec), ("config (integrator)", lambda: cfg.integrator)):
        try:
            build()
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return cfg


def load_preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"--preset: unknown preset {name!r}, choose from {', '.join(PRESETS)}")
    text = resources.files("wignerbloch.presets").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


# -- serialization -----------------------------------------------------------


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ArithmeticError(f"non-finite value {x!r} in output")
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}" if items else "{}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(isinstance(v, (float, int, np.floating)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        items = [f"{inner}{dumps(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]" if items else "[]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    return json.dumps(obj)


def report_dict(beta: float, r: bloch.BlochReport) -> dict:
    mom = r.moments
    return {
        "beta": beta,
        "lambda": r.lam,
        "mu_exact": r.mu_exact.mu.tolist(),
        "mu_approx": r.mu_approx.mu.tolist(),
        "purity_sq_exact": r.purity_sq_exact,
        "purity_sq_exact_error": r.purity_sq_error,
        "purity_sq_formula": r.purity_sq_formula,
        "purity_sq_bound": r.purity_sq_bound,
        "moments": {
            "mean_p": mom.mean_p.tolist(),
            "cov_p": mom.cov_p.tolist(),
            "pi_disp_sq": mom.pi_disp_sq,
            "x_disp_sq": mom.x_disp_sq,
        },
        "regime_warning": r.regime_warning,
    }


def sweep_row(beta: float, r: bloch.BlochReport) -> list:
    mu = r.mu_exact.mu
    return [
        beta,
        r.lam,
        mu[0],
        mu[1],
        mu[2],
        r.mu_approx.mu[2],
        r.purity_sq_exact,
        r.purity_sq_formula,
        r.purity_sq_bound,
        r.regime_warning,
    ]


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(float(v)) if isinstance(v, (float, np.floating)) else str(v).lower() if isinstance(v, bool) else v for v in row])
    return buf.getvalue()


# -- modes -------------------------------------------------------------------


def _reports(cfg: ScenarioConfig):
    spec = cfg.spec
    if not spec.nr_valid:
        log.warning(
            "regime warning: (|p0| + 3 max sigma)/m = %.3g is outside the small-momentum regime", spec.support_ratio
        )
    a = normalize(spec, cfg.integrator)
    for beta in cfg.betas():
        yield float(beta), bloch.report(a, four_velocity(beta, cfg.axis), cfg.integrator)


def run_point(cfg: ScenarioConfig) -> str:
    if isinstance(cfg.beta, dict):
        raise ConfigError("config.beta: point mode needs a single rapidity")
    ((beta, r),) = _reports(cfg)
    if cfg.output == "csv":
        return _csv(SWEEP_COLUMNS, [sweep_row(beta, r)])
    return dumps(report_dict(beta, r)) + "\n"


def run_sweep(cfg: ScenarioConfig) -> str:
    if not isinstance(cfg.beta, dict):
        raise ConfigError("config.beta: sweep mode needs {start, stop, count, spacing}")
    rows = [sweep_row(beta, r) for beta, r in _reports(cfg)]
    if cfg.output == "csv":
        return _csv(SWEEP_COLUMNS, rows)
    return dumps({"rows": [dict(zip(SWEEP_COLUMNS, row)) for row in rows]}) + "\n"


def run_verify(cfg: ScenarioConfig) -> tuple[str, bool]:
    beta = float(cfg.betas()[-1])
    checks = run_battery(Scenario(cfg.spec, cfg.axis, beta, cfg.integrator))
    ok = not any(c.failed for c in checks)
    if cfg.output == "csv":
        text = _csv(("name", "status", "margin", "detail"), [(c.name, c.status, _margin(c.margin), c.detail) for c in checks])
    else:
        doc = {
            "passed": ok,
            "checks": [{"name": c.name, "status": c.status, "margin": _margin(c.margin), "detail": c.detail} for c in checks],
        }
        text = dumps(doc) + "\n"
    return text, ok


def _margin(x: float):
    return x if math.isfinite(x) else None


# -- entry point ---------------------------------------------------------------

_VECTOR_FIELDS = ("sigma", "p0", "x0", "boost_axis")
_TYPES = {"mass": float, "rel_tol": float, "abs_tol": float, "order_per_axis": int, "samples": int, "seed": int}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="flat JSON scenario file")
    src.add_argument("--preset", choices=PRESETS, help="bundled scenario (default: paper-nr)")
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")
    for name in _VECTOR_FIELDS:
        common.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, nargs=3, metavar=("X", "Y", "Z"))
    for name, kind in _TYPES.items():
        common.add_argument(f"--{name.replace('_', '-')}", dest=name, type=kind)
    common.add_argument("--beta", type=json.loads, help="rapidity, or a JSON sweep object")
    common.add_argument("--method", choices=("tensor_gauss", "monte_carlo"))
    common.add_argument("--output", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="wignerbloch", description="Bloch vector of a spin-1/2 packet seen by a boosted observer")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, text in (("point", "one rapidity"), ("sweep", "a rapidity sweep"), ("verify", "the property battery")):
        sub.add_parser(mode, parents=[common], help=text)
    return parser


def resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"--config: cannot read {args.config}: {exc}") from exc
    else:
        raw = load_preset(args.preset or "paper-nr")
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    for name in (*_VECTOR_FIELDS, *_TYPES, "beta", "method", "output"):
        value = getattr(args, name)
        if value is not None:
            raw[name] = list(value) if name in _VECTOR_FIELDS else value
    raw["mode"] = args.mode
    return parse_config(raw)


def _configure_logging(verbose: bool) -> None:
    # bind to the current stderr on every call so embedding callers can redirect it
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.handlers = [handler]
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    ok = True
    try:
        cfg = resolve_config(args)
        if cfg.mode == "point":
            text = run_point(cfg)
        elif cfg.mode == "sweep":
            text = run_sweep(cfg)
        else:
            text, ok = run_verify(cfg)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_VERIFY


if __name__ == "__main__":
    raise SystemExit(main())
