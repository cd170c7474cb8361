"""Command-line driver for the multiplier, decay and scattering experiments.

Every run is described by an :class:`ExperimentConfig`; its JSON form and
sha256 are echoed into the output header so a CSV can be regenerated
bit-for-bit. Exit codes: 0 all checks passed, 1 a check failed, 2 bad
configuration.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import __version__, scattering
from .energy_lab import RadialData, RadialProfile, energy_decay_experiment
from .mode_oracle import TOL_MAX, TOL_MIN, fundamental_matrix
from .multiplier import (
    Mat2,
    ModelParams,
    MultiplierIndex,
    bracket,
    dphi1,
    dphi2,
    energy_symbol,
    fundamental_symbol,
    mu2_closed_form,
    phi1,
    phi2,
)
from .supnorm_lab import (
    band_ratio,
    fit_decay,
    index_exponent,
    operator_exponent,
    operator_norm,
    sup_norm,
)

EXIT_OK, EXIT_CHECK, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    mu: float = 3.0
    kappa: float | str = 0.0
    dim: int = 3
    t_start: float = 1e2
    t_stop: float = 1e5
    t_points: int = 13
    r_start: float = 1e-6
    r_stop: float = 1e3
    r_points: int = 2000
    data: str = "gaussian"
    tol: float | None = None
    seed: int = 0
    mode: str | None = None
    index: str | None = None
    t_values: tuple | None = None
    r_values: tuple | None = None

    def validate(self) -> None:
        if not (math.isfinite(self.mu) and self.mu >= 2.0):
            raise ConfigError("mu", f"must be >= 2, got {self.mu}")
        if self.kappa != "limit":
            if not (isinstance(self.kappa, (int, float)) and self.kappa >= 0):
                raise ConfigError("kappa", f"must be a number >= 0 or 'limit', got {self.kappa!r}")
        if self.dim < 1:
            raise ConfigError("dim", f"must be >= 1, got {self.dim}")
        for name in ("t", "r"):
            start, stop, points = (getattr(self, f"{name}_{k}") for k in ("start", "stop", "points"))
            if points < 1:
                raise ConfigError(f"{name}_points", f"must be >= 1, got {points}")
            if not (math.isfinite(start) and math.isfinite(stop)):
                raise ConfigError(f"{name}_start", "grid ends must be finite")
            if start < 0.0 or (name == "r" and start == 0.0):
                raise ConfigError(f"{name}_start", f"must be > 0 for a log grid, got {start}")
            if stop < start or (points > 1 and stop == start):
                raise ConfigError(f"{name}_stop", f"must exceed {name}_start={start}, got {stop}")
        parse_data(self.data, self.dim)
        if self.tol is not None and not (self.tol >= 0 and math.isfinite(self.tol)):
            raise ConfigError("tol", f"must be finite and >= 0, got {self.tol}")

    @property
    def params(self) -> ModelParams:
        if self.kappa == "limit":
            return ModelParams.limit(self.mu)
        return ModelParams(self.mu, float(self.kappa))

    def t_grid(self) -> np.ndarray:
        if self.t_start == 0.0:
            return np.concatenate([[0.0], np.geomspace(1.0, self.t_stop, self.t_points - 1)]) \
                if self.t_points > 1 else np.array([0.0])
        return np.geomspace(self.t_start, self.t_stop, self.t_points)

    def r_grid(self) -> np.ndarray:
        return np.geomspace(self.r_start, self.r_stop, self.r_points)

    def as_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, separators=(",", ":"))

    @property
    def digest(self) -> str:
        return hashlib.sha256((self.as_json() + __version__).encode()).hexdigest()


def parse_data(text: str, dim: int) -> RadialData:
    """'gaussian', 'annulus:r1,r2' or 'weighted:kappa' -> data with equal components."""
    kind, _, args = text.partition(":")
    try:
        if kind == "gaussian" and not args:
            prof = RadialProfile.gaussian(dim)
        elif kind == "annulus":
            r1, r2 = (float(x) for x in args.split(","))
            prof = RadialProfile.annulus(r1, r2, dim)
        elif kind == "weighted":
            prof = RadialProfile.weighted(float(args), dim)
        else:
            raise ValueError("expected gaussian, annulus:r1,r2 or weighted:kappa")
    except (ValueError, KeyError) as exc:
        raise ConfigError("data", f"{text!r}: {exc}") from None
    return RadialData(prof, prof)


def parse_index(text: str | None) -> MultiplierIndex:
    if text is None:
        raise ConfigError("index", "required for mode 'supnorm', as 'k,s,rho,delta'")
    try:
        k, s, rho, delta = (float(x) for x in text.split(","))
        return MultiplierIndex(k, s, rho, int(delta))
    except ValueError as exc:
        raise ConfigError("index", f"{text!r}: {exc}") from None


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return "%.16e" % float(x)


@dataclass
class Report:
    header: list
    rows: list
    checks: dict
    summary: dict

    @property
    def ok(self) -> bool:
        return all(c["passed"] for c in self.checks.values())


def _check(value: float, limit: float, passed: bool | None = None) -> dict:
    if passed is None:
        passed = bool(value <= limit)
    return {"value": float(value), "limit": float(limit), "passed": bool(passed)}


def _emit(cfg: ExperimentConfig, report: Report, out: str | None, fmt: str) -> None:
    summary = {
        "version": __version__,
        "config": json.loads(cfg.as_json()),
        "config_sha256": cfg.digest,
        "checks": report.checks,
        "summary": report.summary,
        "ok": report.ok,
    }
    if fmt == "json":
        summary["header"] = report.header
        summary["rows"] = [[v if isinstance(v, str) else float(v) for v in row] for row in report.rows]
        text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
        if out:
            Path(out).write_text(text)
        else:
            click.echo(text, nl=False)
        return
    lines = [
        f"# dampwave {__version__}",
        f"# config_sha256 {cfg.digest}",
        f"# config {cfg.as_json()}",
        ",".join(report.header),
    ]
    lines += [",".join(_fmt(v) for v in row) for row in report.rows]
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
        Path(out).with_suffix(".json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    else:
        click.echo(text, nl=False)
    for name, c in report.checks.items():
        status = "ok" if c["passed"] else "FAIL"
        click.echo(f"{status:4s} {name}: {c['value']:.3e} (limit {c['limit']:.3e})", err=True)


def _oracle_tol(tol: float) -> float:
    return min(TOL_MAX, max(TOL_MIN, 1e-3 * tol))


def run_eval_phi(cfg: ExperimentConfig) -> Report:
    p = cfg.params
    ts = list(cfg.t_values) if cfg.t_values else list(cfg.t_grid())
    rs = list(cfg.r_values) if cfg.r_values else list(cfg.r_grid())
    tol = cfg.tol
    rows = []
    worst = 0.0
    for t in ts:
        for r in rs:
            bessel = [phi1(p, t, r), phi2(p, t, r), dphi1(p, t, r), dphi2(p, t, r)]
            m = fundamental_matrix(p, r, t, _oracle_tol(max(tol, 1e-9)))
            oracle = [m.e11, m.e12 / r, m.e21 * r, m.e22]
            closed = list(mu2_closed_form(t, r)) if p.mu == 2.0 else [math.nan] * 4
            # deviations measured in energy variables, relative to the propagator norm
            scale = [1.0, r, 1.0 / r, 1.0]
            norm = float(m.norm)
            for name, b, o, c, w in zip(("phi1", "phi2", "dphi1", "dphi2"), bessel, oracle, closed, scale):
                dev = abs(b - o) * w / norm
                cdev = abs(b - c) * w / norm if p.mu == 2.0 else math.nan
                worst = max(worst, dev, 0.0 if math.isnan(cdev) else cdev)
                rows.append((t, r, name, b, o, c, dev, cdev))
    header = ["t", "r", "name", "bessel", "oracle", "closed_form", "rel_dev_oracle", "rel_dev_closed"]
    return Report(header, rows, {"max_rel_deviation": _check(worst, tol)}, {"max_rel_deviation": worst})


def run_decay(cfg: ExperimentConfig) -> Report:
    mode = cfg.mode
    tol = cfg.tol
    t_grid = cfg.t_grid()
    p = cfg.params
    if mode == "supnorm":
        idx = parse_index(cfg.index)
        if not idx.bounded:
            raise ConfigError("index", f"{cfg.index} is unbounded in r; no decay law applies")
        expected, log_factor = index_exponent(idx)
        samples = [sup_norm(idx, t, cfg.r_grid()) for t in t_grid]
        values = [s.sup_value for s in samples]
        rows = [(s.t, s.sup_value, s.argmax_r) for s in samples]
        header = ["t", "sup_value", "argmax_r"]
    elif mode == "opnorm":
        expected, log_factor = operator_exponent(p), False
        samples = [operator_norm(p, t, cfg.r_grid()) for t in t_grid]
        values = [s.sup_value for s in samples]
        rows = [(s.t, s.sup_value, s.argmax_r) for s in samples]
        header = ["t", "sup_value", "argmax_r"]
    elif mode == "energy":
        rep = energy_decay_experiment(p, parse_data(cfg.data, cfg.dim), t_grid)
        expected, log_factor = rep.expected_exponent, rep.log_factor
        values = [s.energy for s in rep.samples]
        rate = (1.0 + t_grid) ** expected * (np.log(math.e + t_grid) if log_factor else 1.0)
        rows = [(s.t, s.energy, q, s.energy / q) for s, q in zip(rep.samples, rate)]
        header = ["t", "energy", "rate_model", "ratio"]
    else:
        raise ConfigError("mode", f"expected supnorm, opnorm or energy, got {mode!r}")
    try:
        fit = fit_decay(list(zip(t_grid, values)), "power_log" if log_factor else "power")
    except ValueError as exc:
        raise ConfigError("t_points", str(exc)) from None
    ratio = band_ratio(t_grid, values, expected, log_factor)
    checks = {"exponent": _check(abs(fit.exponent - expected), tol)}
    summary = {"mode": mode, "exponent": fit.exponent, "expected": expected, "log_factor": log_factor,
               "residual": fit.residual, "band_ratio": ratio}
    return Report(header, rows, checks, summary)


def run_scatter(cfg: ExperimentConfig) -> Report:
    if cfg.kappa not in ("limit", (cfg.mu - 2.0) / 2.0):
        raise ConfigError("kappa", "scattering needs kappa = (mu-2)/2; pass --kappa limit")
    p = ModelParams.limit(cfg.mu)
    t_grid = cfg.t_grid()
    rows = []
    r_win = cfg.r_grid()
    sups = []
    for t in t_grid:
        dev = float(np.max(scattering.limit_deviation(p, t, r_win)))
        sups.append(dev)
        rows.append(("convergence", t, dev))
    fit = fit_decay(list(zip(t_grid, sups)))
    r_det = np.geomspace(0.1, 1e3, 400)
    z = scattering.z_plus(p, r_det)
    target = scattering.z_plus_det_target(p, r_det)
    det_dev = np.abs(z.det - target) / target
    rows += [("det_rel_dev", r, d) for r, d in zip(r_det[::20], det_dev[::20])]
    r_hf = np.geomspace(10.0, 1e3, 60)
    c_hf = scattering.high_frequency_constant(p, r_hf)
    rows += [("r_times_dist_to_identity", r, c) for r, c in zip(r_hf[::6], c_hf[::6])]
    r_id = np.geomspace(1e-3, 1e3, 400)
    dist_id = float(np.max((scattering.z_plus(p, r_id) - Mat2.identity(r_id.shape)).norm))
    checks = {
        "convergence_exponent": _check(abs(fit.exponent + 1.0), cfg.tol),
        "det_identity": _check(float(det_dev.max()), 1e-9),
        "high_frequency_constant_spread": _check(float(c_hf.max() / c_hf.min()), 2.0),
    }
    if p.mu == 2.0:
        checks["identity_at_mu_2"] = _check(dist_id, 1e-10)
    summary = {"convergence_exponent": fit.exponent, "det_max_rel_dev": float(det_dev.max()),
               "high_frequency_constant": [float(c_hf.min()), float(c_hf.max())],
               "max_dist_to_identity": dist_id}
    return Report(["quantity", "x", "value"], rows, checks, summary)


def run_wronskian(cfg: ExperimentConfig) -> Report:
    p = cfg.params
    tol = cfg.tol
    rows = []
    worst_f = worst_e = 0.0
    for t in cfg.t_grid():
        r = cfg.r_grid()
        f_def = np.abs(fundamental_symbol(p, t, r).det * (1.0 + t) ** p.mu - 1.0)
        e = energy_symbol(p, t, r)
        e_def = np.abs(e.det * (1.0 + t) ** p.mu / bracket(r) ** (1.0 + 2.0 * p.kappa) - 1.0)
        worst_f = max(worst_f, float(f_def.max()))
        worst_e = max(worst_e, float(e_def.max()))
        rows += list(zip([t] * r.size, r, f_def, e_def))
    checks = {"fundamental_det": _check(worst_f, tol), "energy_det": _check(worst_e, tol)}
    return Report(["t", "r", "fundamental_det_defect", "energy_det_defect"], rows, checks,
                  {"fundamental_det_max": worst_f, "energy_det_max": worst_e})


# grid defaults per command; whatever is used ends up in the output header
COMMAND_DEFAULTS = {
    "eval-phi": dict(tol=1e-6, t_start=0.0, t_stop=100.0, t_points=5, r_start=0.01, r_stop=20.0, r_points=5),
    "decay": dict(tol=0.05, mode="opnorm"),
    "scatter": dict(tol=0.1, kappa="limit", t_start=10.0, t_stop=1e4, t_points=13,
                    r_start=1.0, r_stop=50.0, r_points=400),
    "wronskian": dict(tol=1e-9, t_start=0.0, t_stop=100.0, t_points=11, r_start=0.01, r_stop=20.0, r_points=200),
}


def _config_options(fn):
    opts = [
        click.option("--mu", type=float, default=3.0, show_default=True),
        click.option("--kappa", type=str, default=None, help="number or 'limit'"),
        click.option("--dim", type=int, default=3, show_default=True),
        click.option("--t-start", type=float, default=None),
        click.option("--t-stop", type=float, default=None),
        click.option("--t-points", type=int, default=None),
        click.option("--r-start", type=float, default=None),
        click.option("--r-stop", type=float, default=None),
        click.option("--r-points", type=int, default=None),
        click.option("--data", type=str, default="gaussian", show_default=True,
                     help="gaussian | annulus:r1,r2 | weighted:kappa"),
        click.option("--tol", type=float, default=None, help="check tolerance (command default if omitted)"),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--out", type=click.Path(dir_okay=False), default=None),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _make_config(command: str, **kw) -> ExperimentConfig:
    for key, value in COMMAND_DEFAULTS.get(command, {}).items():
        if kw.get(key) is None:
            kw[key] = value
    kw = {k: v for k, v in kw.items() if v is not None}
    kappa = kw.pop("kappa", 0.0)
    if kappa != "limit":
        try:
            kappa = float(kappa)
        except ValueError:
            raise ConfigError("kappa", f"must be a number or 'limit', got {kappa!r}") from None
    cfg = ExperimentConfig(command=command, kappa=kappa, **kw)
    cfg.validate()
    return cfg


def _run(command: str, runner, out, fmt, **kw):
    try:
        cfg = _make_config(command, **kw.pop("config"))
        report = runner(cfg, **kw)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    _emit(cfg, report, out, fmt)
    sys.exit(EXIT_OK if report.ok else EXIT_CHECK)


@click.group()
@click.version_option(__version__, prog_name="dampwave")
def main():
    """Experiments for the wave equation with scale-invariant damping."""


@main.command("eval-phi")
@_config_options
@click.option("--t", "ts", type=float, multiple=True, help="time(s); default: the t grid")
@click.option("--r", "rs", type=float, multiple=True, help="frequency(ies); default: the r grid")
def eval_phi(out, fmt, ts, rs, **config):
    """Tabulate Phi_1, Phi_2 and their time derivatives against the ODE oracle."""
    config["t_values"] = tuple(ts) or None
    config["r_values"] = tuple(rs) or None
    _run("eval-phi", run_eval_phi, out, fmt, config=config)


@main.command()
@_config_options
@click.option("--mode", type=click.Choice(["supnorm", "opnorm", "energy"]), default="opnorm", show_default=True)
@click.option("--index", type=str, default=None, help="k,s,rho,delta for --mode supnorm")
def decay(out, fmt, **config):
    """Fit decay exponents and compare them with the predicted rates."""
    _run("decay", run_decay, out, fmt, config=config)


@main.command()
@_config_options
def scatter(out, fmt, **config):
    """Convergence of W(t) to Z+, det identity and high-frequency behaviour."""
    _run("scatter", run_scatter, out, fmt, config=config)


@main.command()
@_config_options
def wronskian(out, fmt, **config):
    """Determinant identities of the propagator and the energy symbol."""
    _run("wronskian", run_wronskian, out, fmt, config=config)


@main.command()
@click.option("--tamper", type=click.Choice(["none", "m11"]), default="none",
              help="flip a sign to check that the suite notices")
@click.option("--tol-override", type=float, default=None,
              help="replace every tolerance, e.g. 0 to force failures")
@click.option("--seed", type=int, default=0, show_default=True)
def selftest(tamper, tol_override, seed):
    """Run the invariant suite at reduced size."""
    from .selfcheck import run_suite

    saved = scattering._M11_SIGN
    if tamper == "m11":
        scattering._M11_SIGN = -saved
    try:
        t0 = time.perf_counter()
        results = run_suite(tol_override=tol_override, seed=seed)
    finally:
        scattering._M11_SIGN = saved
    failed = [r for r in results if not r.passed]
    for r in results:
        click.echo(f"{'ok' if r.passed else 'FAIL':4s} {r.name}: {r.value:.3e} (limit {r.limit:.3e})")
    click.echo(f"{len(results) - len(failed)}/{len(results)} passed in {time.perf_counter() - t0:.1f} s")
    if failed:
        click.echo("failed: " + ", ".join(r.name for r in failed), err=True)
    sys.exit(EXIT_CHECK if failed else EXIT_OK)


if __name__ == "__main__":
    main()
