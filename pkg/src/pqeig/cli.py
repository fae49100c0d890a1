"""``pqeig <solve|sweep|verify|oracle> [--config FILE] [--key value ...]``

Configuration is a flat UTF-8 document of ``key=value`` lines; ``#`` starts a
comment. Command-line flags use the same keys and override the file. ``p``
and ``q`` also accept a range ``start:stop:count`` (sweep only).

Outputs
  solve   JSON report (``json_out``, default stdout) with keys lambda,
          iterations, converged, termination, kkt_u, kkt_v, p, q, alpha, beta,
          dim, n, seed; field CSV (``csv_out``, default fields.csv) with
          header ``x[,y],u,v``, one row per interior node, row-major.
  sweep   CSV (``csv_out``, default stdout) with header
          ``p,q,alpha,beta,lambda,iterations,kkt_u,kkt_v,converged``;
          alpha = theta p, beta = (1 - theta) q; q follows p unless set.
  verify  JSON pass/fail summary of the inequality suites (``trials``
          concavity quadruples, 100 * ``trials`` Jensen draws) and of the
          multi-start simplicity protocol.
  oracle  JSON reference values for the configured grid and p.

Exit status: 0 success, 1 failed verification or solver failure, 2 bad
configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError, ParameterError, SolverError
from .functional import Exponents
from .mesh import make_grid
from .oracle import linear_first_eig, pi_p, plap1d_lambda1
from .proofcheck import concavity_suite, jensen_suite, path_energy_check
from .solver import SolverConfig, balance_project, multi_start, sign_normalized, solve

COMMANDS = ("solve", "sweep", "verify", "oracle")
REPORT_KEYS = (
    "lambda",
    "iterations",
    "converged",
    "termination",
    "kkt_u",
    "kkt_v",
    "p",
    "q",
    "alpha",
    "beta",
    "dim",
    "n",
    "seed",
)
SWEEP_HEADER = ("p", "q", "alpha", "beta", "lambda", "iterations", "kkt_u", "kkt_v", "converged")

JENSEN_GAP_TOL = 1e-14
CONCAVITY_TOL = 1e-12
PATH_PROPORTIONAL_TOL = 1e-10
PATH_EIGENPAIR_TOL = 1e-6


@dataclass
class RunConfig:
    dim: int = 1
    n: int = 100
    length: float = 1.0
    p: float = 2.0
    q: float = 2.0
    alpha: float = 1.0
    beta: float = 1.0
    # solver
    step_init: float = 1.0
    armijo_shrink: float = 0.5
    armijo_slope: float = 1e-4
    tol_lambda: float = 1e-10
    tol_kkt: float = 1e-6
    max_iters: int = 50_000
    eps_grad: float = 1e-10
    eps_u: float = 1e-12
    seed: int = 0
    n_starts: int = 5
    positive_init: bool = True
    precondition: str = "weighted"
    # sweep / verify
    theta: float = 0.5
    trials: int = 10_000
    # outputs; "-" is stdout, "" picks the per-command default
    json_out: str = "-"
    csv_out: str = ""
    # set by the parser, not keys
    p_range: tuple | None = field(default=None, repr=False)
    q_range: tuple | None = field(default=None, repr=False)
    explicit: dict = field(default_factory=dict, repr=False)

    def solver_config(self) -> SolverConfig:
        names = {f.name for f in fields(SolverConfig)}
        return SolverConfig(**{k: getattr(self, k) for k in names if hasattr(self, k)})

    def exponents(self) -> Exponents:
        return Exponents(self.p, self.q, self.alpha, self.beta)


_INTERNAL = {"p_range", "q_range", "explicit"}
KEYS = {f.name: f for f in fields(RunConfig) if f.name not in _INTERNAL}
_TYPES = {
    "dim": int, "n": int, "max_iters": int, "seed": int, "n_starts": int, "trials": int,
    "positive_init": bool, "precondition": str, "json_out": str, "csv_out": str,
}


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be start:stop:count, got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("range count must be positive")
    return tuple(float(x) for x in np.linspace(start, stop, count))


def _set_key(cfg: RunConfig, key: str, raw: str, where: str):
    if key not in KEYS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    raw = raw.strip()
    try:
        if key in ("p", "q") and ":" in raw:
            setattr(cfg, f"{key}_range", _parse_range(raw))
            value = getattr(cfg, f"{key}_range")[0]
        else:
            kind = _TYPES.get(key, float)
            if kind is bool:
                value = _parse_bool(raw)
            elif kind is int:
                value = int(raw)
            elif kind is float:
                value = float(raw)
                if not math.isfinite(value):
                    raise ValueError("value must be finite")
            else:
                value = raw
            if key in ("p", "q"):
                setattr(cfg, f"{key}_range", None)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from None
    setattr(cfg, key, value)
    cfg.explicit[key] = where


def _parse_into(cfg: RunConfig, text: str, source: str = "config"):
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        where = f"{source} line {lineno}"
        if "=" not in body:
            raise ConfigError(f"{where}: expected key=value, got {line.strip()!r}")
        key, raw = body.split("=", 1)
        _set_key(cfg, key.strip(), raw, where)
    return cfg


def validate(cfg: RunConfig, command: str = "solve") -> RunConfig:
    """Domain checks; exponent admissibility for solve and verify."""
    try:
        make_grid(cfg.dim, cfg.n, cfg.length)
        cfg.solver_config()
    except (ParameterError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if cfg.trials < 1:
        raise ConfigError("trials must be positive")
    if command == "sweep":
        if not 0 < cfg.theta < 1:
            raise ConfigError(f"theta must lie in (0, 1), got {cfg.theta}")
        if cfg.q_range is not None and len(cfg.q_range) != len(cfg.p_range or (cfg.p,)):
            raise ConfigError("q range must have as many points as the p range")
        for x in (cfg.p_range or (cfg.p,)) + (cfg.q_range or (cfg.q,)):
            if not x > 1:
                raise ConfigError(f"sweep exponents must exceed 1, got {x}")
        return cfg
    if cfg.p_range is not None or cfg.q_range is not None:
        raise ConfigError("p and q ranges are only valid for sweep")
    if command == "oracle":
        if not cfg.p > 1:
            raise ConfigError(f"p must exceed 1, got {cfg.p}")
        return cfg
    if not (cfg.p > 1 and cfg.q > 1 and cfg.alpha > 0 and cfg.beta > 0):
        raise ConfigError("need p, q > 1 and alpha, beta > 0")
    s = cfg.alpha / cfg.p + cfg.beta / cfg.q
    if abs(s - 1.0) > 1e-12:
        lines = ", ".join(cfg.explicit[k] for k in ("p", "q", "alpha", "beta") if k in cfg.explicit)
        where = f" ({lines})" if lines else ""
        raise ConfigError(f"alpha/p + beta/q = {s:.12g} ≠ 1{where}")
    return cfg


def parse_config(text: str, command: str = "solve") -> RunConfig:
    """Parse and validate a ``key=value`` document; absent keys keep their defaults."""
    return validate(_parse_into(RunConfig(), text), command)


# output helpers


def _num(x) -> str:
    return f"{x:.17g}"


def _open_out(path):
    if path in ("-", ""):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_text(path, text):
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def field_csv(pair) -> str:
    grid = pair.u.grid
    coords = grid.coordinates()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y"][: grid.dim] + ["u", "v"])
    for i in range(grid.size):
        w.writerow([_num(c[i]) for c in coords] + [_num(pair.u.values[i]), _num(pair.v.values[i])])
    return buf.getvalue()


def solve_report(cfg: RunConfig, pair, rep) -> dict:
    kkt_u, kkt_v = rep.kkt
    return {
        "lambda": pair.lam,
        "iterations": rep.iterations,
        "converged": rep.converged,
        "termination": rep.termination,
        "kkt_u": kkt_u,
        "kkt_v": kkt_v,
        "p": cfg.p,
        "q": cfg.q,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "dim": cfg.dim,
        "n": cfg.n,
        "seed": cfg.seed,
    }


def cmd_solve(cfg: RunConfig) -> int:
    grid = make_grid(cfg.dim, cfg.n, cfg.length)
    pair, rep = solve(grid, cfg.exponents(), cfg.solver_config())
    _write_text(cfg.json_out, _json_text(solve_report(cfg, pair, rep)))
    _write_text(cfg.csv_out or "fields.csv", field_csv(pair))
    if not rep.converged:
        print(f"solve: not converged ({rep.termination})", file=sys.stderr)
    return 0


def sweep_points(cfg: RunConfig):
    ps = cfg.p_range or (cfg.p,)
    if cfg.q_range is not None:
        qs = cfg.q_range
    elif "q" in cfg.explicit:
        qs = (cfg.q,) * len(ps)
    else:
        qs = ps
    return [Exponents.from_theta(p, q, cfg.theta) for p, q in zip(ps, qs)]


def sweep_rows(cfg: RunConfig):
    grid = make_grid(cfg.dim, cfg.n, cfg.length)
    scfg = cfg.solver_config()
    rows = []
    for e in sweep_points(cfg):
        try:
            pair, rep = solve(grid, e, scfg)
            lam, its, (ku, kv), conv = pair.lam, rep.iterations, rep.kkt, rep.converged
        except SolverError as exc:
            print(f"sweep: p={e.p} q={e.q}: {exc}", file=sys.stderr)
            lam, its, ku, kv, conv = math.nan, 0, math.nan, math.nan, False
        rows.append((e.p, e.q, e.alpha, e.beta, lam, its, ku, kv, conv))
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for p, q, a, b, lam, its, ku, kv, conv in rows:
        w.writerow([_num(p), _num(q), _num(a), _num(b), _num(lam), its, _num(ku), _num(kv), str(conv).lower()])
    return buf.getvalue()


def cmd_sweep(cfg: RunConfig) -> int:
    rows = sweep_rows(cfg)
    _write_text(cfg.csv_out or "-", sweep_csv(rows))
    return 0


def verify_summary(cfg: RunConfig) -> dict:
    e = cfg.exponents()
    grid = make_grid(cfg.dim, cfg.n, cfg.length)
    jensen_draws = 100 * cfg.trials
    jmin = jensen_suite(jensen_draws, cfg.seed)
    cmax = concavity_suite(cfg.trials, e, cfg.seed)
    verdict = multi_start(grid, e, cfg.solver_config())

    good = [p for p, c in zip(verdict.pairs, verdict.converged) if c]
    a = good[0]
    u, v = sign_normalized(a.u), sign_normalized(a.v)
    # a proportional pair rescales onto the same point of the constraint set
    phi, psi, _ = balance_project(u.scaled(2.0), v.scaled(3.0), e)
    prop = path_energy_check(u, v, phi, psi, e).delta
    if len(good) > 1:
        b = good[1]
        eig = path_energy_check(u, v, sign_normalized(b.u), sign_normalized(b.v), e).delta
    else:
        eig = 0.0

    checks = {
        "jensen": jmin >= -JENSEN_GAP_TOL,
        "concavity": cmax <= CONCAVITY_TOL,
        "simplicity": verdict.simple,
        "nonnegativity": verdict.min_to_max >= -1e-8,
        "path_proportional": abs(prop) <= PATH_PROPORTIONAL_TOL,
        "path_eigenpairs": abs(eig) < PATH_EIGENPAIR_TOL,
    }
    return {
        "jensen_draws": jensen_draws,
        "jensen_min_gap": jmin,
        "concavity_trials": cfg.trials,
        "concavity_max_violation": cmax,
        "simplicity": verdict.verdict,
        "n_starts": cfg.n_starts,
        "n_converged": len(good),
        "lambda": good[0].lam,
        "lambda_spread": verdict.lambda_spread,
        "misfit": verdict.misfit,
        "sign_fraction": verdict.sign_fraction,
        "min_to_max": verdict.min_to_max,
        "path_delta_proportional": prop,
        "path_delta_eigenpairs": eig,
        "checks": checks,
        "passed": all(checks.values()),
    }


def cmd_verify(cfg: RunConfig) -> int:
    summary = verify_summary(cfg)
    _write_text(cfg.json_out, _json_text(summary))
    if not summary["passed"]:
        failed = [k for k, ok in summary["checks"].items() if not ok]
        print(f"verify: failed checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_oracle(cfg: RunConfig) -> int:
    grid = make_grid(cfg.dim, cfg.n, cfg.length)
    lam_h, _ = linear_first_eig(grid)
    out = {
        "dim": cfg.dim,
        "n": cfg.n,
        "length": cfg.length,
        "linear_discrete_lambda": lam_h,
        "linear_continuum_lambda": cfg.dim * (math.pi / cfg.length) ** 2,
        "p": cfg.p,
        "pi_p": pi_p(cfg.p),
        "plap1d_lambda1": plap1d_lambda1(cfg.p, cfg.length),
    }
    _write_text(cfg.json_out, _json_text(out))
    return 0


HANDLERS = {"solve": cmd_solve, "sweep": cmd_sweep, "verify": cmd_verify, "oracle": cmd_oracle}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pqeig", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="key=value configuration file")
    for key in KEYS:
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        ap.add_argument(*flags, dest=f"opt_{key}", metavar="VALUE")
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = RunConfig()
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
            _parse_into(cfg, text, args.config)
        for key in KEYS:
            raw = getattr(args, f"opt_{key}")
            if raw is not None:
                _set_key(cfg, key, raw, f"--{key}")
        validate(cfg, args.command)
    except ConfigError as exc:
        print(f"pqeig: configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        return HANDLERS[args.command](cfg)
    except (SolverError, ParameterError, ArithmeticError) as exc:
        print(f"pqeig {args.command}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
