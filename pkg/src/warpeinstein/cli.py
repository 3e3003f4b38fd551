"""Command line front end.

Subcommands:

``verify-family``
    integrate the lambda > 0 family, rebuild the warp spec from the
    trajectory and verify it (first integral, closed-form conditions and a
    numeric Ricci tensor at seeded random points).
``ricci``
    numeric Einstein residual of a spec file and agreement of the closed-form
    Ricci blocks with the numeric tensor.
``residuals``
    closed-form Einstein conditions of a spec file at seeded random points.
``integrate``
    integrate one trajectory and export it.
``symmetry-check``
    apply the scaling symmetry to a stored (or freshly integrated) trajectory.

Exit status: 0 if every check passes, 1 if some check fails, 2 on invalid
input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__, conditions, curvature, kernels
from . import family as fam
from .errors import WarpError
from .specfile import parse_spec, write_spec
from .warp import WarpSpec, build_metric

MODES = ("verify-family", "ricci", "residuals", "integrate", "symmetry-check")

MODE_HELP = {
    "verify-family": "integrate the family, rebuild the spec and verify it end to end",
    "ricci": "numeric Einstein residual and closed-form Ricci blocks of a spec file",
    "residuals": "closed-form Einstein conditions of a spec file",
    "integrate": "integrate one trajectory and export it",
    "symmetry-check": "apply the scaling symmetry to a trajectory",
}

DEFAULT_TOLERANCES: dict[str, dict[str, float]] = {
    "verify-family": {"Z": 1e-8, "ode": 1e-8, "theorem21": 1e-7, "einstein": 1e-5},
    "ricci": {"einstein": 1e-5, "blocks": 1e-5},
    "residuals": {"theorem21": 1e-7},
    "integrate": {"Z": 1e-8},
    "symmetry-check": {"symmetry": 1e-8, "composition": 1e-14},
}


@dataclass
class RunConfig:
    mode: str
    spec_path: str | None = None
    q: int = 3
    n2: int = 3
    m: float = 1.0
    sample_count: int = 20
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)
    output_dir: str | None = None
    beta0: float = 8.0
    gamma0: float = 2.0
    omega0: float = 1.0
    efolds: float = 3.2
    trajectory_path: str | None = None
    abc: tuple[float, float, float] = (2.0, 3.0, 1.0)
    scheme: str = "hyperdual"
    phi2_sign: float = 1.0
    phi2_offset: float = 1.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.sample_count < 1:
            raise ValueError("sample count must be >= 1")
        defaults = DEFAULT_TOLERANCES[self.mode]
        for label, tol in self.tolerances.items():
            if label not in defaults:
                raise ValueError(f"unknown check {label!r} for mode {self.mode}; known: {', '.join(defaults)}")
            if not (tol > 0 and math.isfinite(tol)):
                raise ValueError(f"tolerance for {label!r} must be positive")
        if self.mode in ("ricci", "residuals") and not self.spec_path:
            raise ValueError(f"mode {self.mode} needs --spec")

    def tolerance(self, label: str) -> float:
        return self.tolerances.get(label, DEFAULT_TOLERANCES[self.mode][label])


@dataclass
class CheckResult:
    label: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.label:<12} measured={self.measured:.3e} tol={self.tolerance:.1e}"


@dataclass
class RunReport:
    config: RunConfig
    checks: list[CheckResult]
    details: dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0
    outputs: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> dict[str, Any]:
        cfg = asdict(self.config)
        cfg["abc"] = list(cfg["abc"])
        return {
            "config": cfg,
            "seed": self.config.seed,
            "checks": [
                {"label": c.label, "measured": c.measured, "tolerance": c.tolerance, "pass": c.passed}
                for c in self.checks
            ],
            "passed": self.passed,
            "details": self.details,
            "outputs": self.outputs,
            "defaults": {"version": __version__, "tolerances": DEFAULT_TOLERANCES[self.config.mode],
                         "integrator": asdict(fam.Controls()), "backend": kernels.BACKEND},
            "wall_time": self.wall_time,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _controls(config: RunConfig) -> fam.Controls:
    return fam.Controls(beta_stop=abs(config.beta0) * math.exp(-config.efolds))


def _integrate(config: RunConfig) -> fam.Trajectory:
    fp = fam.FamilyParams(config.q, config.m, config.n2)
    initial = fam.FamilyState(0.0, config.beta0, config.gamma0, config.omega0)
    # beta shrinks at a rate of order m, so this span always reaches the stop level
    t_end = 50.0 * abs(config.beta0) / config.m
    return fam.integrate_family(fp, initial, (0.0, t_end), _controls(config))


def _family_trajectory_checks(traj: fam.Trajectory, config: RunConfig, checks: list[CheckResult]):
    checks.append(CheckResult("Z", float(np.max(traj.Z_relative)), config.tolerance("Z")))


def _points(spec: WarpSpec, config: RunConfig) -> np.ndarray:
    if spec.domain is None:
        raise fam.ParameterError("spec has no domain; random points need a domain box")
    rng = np.random.default_rng(config.seed)
    return spec.domain.sample(rng, config.sample_count)


def _theorem21_measure(spec: WarpSpec, pts) -> tuple[float, float]:
    worst_rel, worst_abs = 0.0, 0.0
    for p in pts:
        rep = conditions.theorem21_residuals(spec, p)
        worst_rel = max(worst_rel, rep.normalized)
        worst_abs = max(worst_abs, rep.max_abs)
    return worst_rel, worst_abs


def _einstein_measure(spec: WarpSpec, pts, scheme: str) -> float:
    g = build_metric(spec, scheme=scheme)
    return max(curvature.einstein_residual(g, spec.lam, p).relative_residual for p in pts)


def _run_verify_family(config: RunConfig, report: RunReport):
    traj = _integrate(config)
    fp = traj.params
    report.details["trajectory"] = {"samples": len(traj), "reason": traj.reason,
                                    "t_end": float(traj.t[-1]), "beta_end": float(traj.beta[-1])}
    _family_trajectory_checks(traj, config, report.checks)
    ode = 0.0
    for k in range(len(traj)):
        r = conditions.theorem31_residuals(_JetView(traj, k), fp.q, fp.n2, fp.lam, traj.t[k], 0.0, "b")
        ode = max(ode, r.normalized)
    report.checks.append(CheckResult("ode", ode, config.tolerance("ode")))
    out = Path(config.output_dir).resolve() if config.output_dir else None
    csv_path = None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        csv_path = str(traj.write_csv(out / "trajectory.csv"))
        report.outputs.append("trajectory.csv")
    spec = fam.reconstruct_profiles(traj, fp, phi2_sign=config.phi2_sign, phi2_offset=config.phi2_offset,
                                    trajectory_file=csv_path)
    if out is not None:
        write_spec(spec, out / "spec.yaml")
        report.outputs.append("spec.yaml")
    pts = _points(spec, config)
    rel, _ = _theorem21_measure(spec, pts)
    report.checks.append(CheckResult("theorem21", rel, config.tolerance("theorem21")))
    report.checks.append(CheckResult("einstein", _einstein_measure(spec, pts, config.scheme),
                                     config.tolerance("einstein")))


class _JetView:
    """Adapter presenting one trajectory sample as constant-jet profiles (f2 = 1, phi2 unused)."""

    def __init__(self, traj: fam.Trajectory, k: int):
        self.phi1 = _Jet(traj.beta[k], traj.beta_dot[k], traj.beta_ddot[k])
        self.f1 = _Jet(traj.gamma[k] - 1.0, traj.gamma_dot[k], traj.gamma_ddot[k])
        fp = traj.params
        self.phi2 = _Jet(1.0, math.sqrt(fp.lam / (fp.n2 - 1)), 0.0)
        self.f2 = _Jet(1.0, 0.0, 0.0)


class _Jet:
    def __init__(self, v, d1, d2):
        self._jet = (float(v), float(d1), float(d2))

    def jet(self, _x):
        return self._jet


def _load_spec(config: RunConfig, report: RunReport) -> WarpSpec:
    spec = parse_spec(config.spec_path)
    spec.check_domain()
    report.details["spec"] = {"dim": spec.dim, "lambda": spec.lam}
    return spec


def _run_ricci(config: RunConfig, report: RunReport):
    spec = _load_spec(config, report)
    pts = _points(spec, config)
    g = build_metric(spec, scheme=config.scheme)
    worst_e, worst_b = 0.0, 0.0
    for p in pts:
        rep = curvature.einstein_residual(g, spec.lam, p)
        worst_e = max(worst_e, rep.relative_residual)
        closed = conditions.ricci_M_blocks(spec, p)
        scale = max(1.0, float(np.max(np.abs(closed))))
        worst_b = max(worst_b, float(np.max(np.abs(closed - rep.ricci))) / scale)
    report.checks.append(CheckResult("einstein", worst_e, config.tolerance("einstein")))
    report.checks.append(CheckResult("blocks", worst_b, config.tolerance("blocks")))


def _run_residuals(config: RunConfig, report: RunReport):
    spec = _load_spec(config, report)
    rel, absolute = _theorem21_measure(spec, _points(spec, config))
    report.details["theorem21_max_abs"] = absolute
    report.checks.append(CheckResult("theorem21", rel, config.tolerance("theorem21")))


def _run_integrate(config: RunConfig, report: RunReport):
    traj = _integrate(config)
    report.details["trajectory"] = {"samples": len(traj), "reason": traj.reason, "t_end": float(traj.t[-1])}
    _family_trajectory_checks(traj, config, report.checks)
    if config.output_dir:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        traj.write_csv(out / "trajectory.csv")
        report.outputs.append("trajectory.csv")


def _run_symmetry(config: RunConfig, report: RunReport):
    if config.trajectory_path:
        traj = fam.read_trajectory_csv(config.trajectory_path, fam.FamilyParams(config.q, config.m, config.n2))
    else:
        traj = _integrate(config)
    a, b, c = config.abc
    image = fam.scaling_transform(traj, a, b, c)
    report.details["flagged_samples"] = int(np.sum(image.flags))
    report.checks.append(CheckResult("symmetry", float(np.max(np.abs(image.residuals))), config.tolerance("symmetry")))
    # composing with a second element must equal the product element
    a2, b2, c2 = 0.5, 2.0, -3.0
    twice = fam.scaling_transform(image, a2, b2, c2)
    once = fam.scaling_transform(traj, a * a2, b * b2, a2 * c + c2)
    comp = 0.0
    for name in ("t", "beta", "gamma", "omega"):
        x, y = getattr(twice, name), getattr(once, name)
        comp = max(comp, float(np.max(np.abs(x - y) / np.maximum(1.0, np.abs(y)))))
    report.checks.append(CheckResult("composition", comp, config.tolerance("composition")))
    if config.output_dir:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        image.write_csv(out / "transformed.csv")
        report.outputs.append("transformed.csv")


_RUNNERS = {
    "verify-family": _run_verify_family,
    "ricci": _run_ricci,
    "residuals": _run_residuals,
    "integrate": _run_integrate,
    "symmetry-check": _run_symmetry,
}


def run(config: RunConfig) -> RunReport:
    """Execute one mode. Deterministic given the config (including its seed)."""
    start = time.perf_counter()
    report = RunReport(config=config, checks=[])
    _RUNNERS[config.mode](config, report)
    seen = {c.label for c in report.checks}
    missing = set(config.tolerances) - seen
    if missing:
        raise RuntimeError(f"checks {sorted(missing)} were requested but not run")
    report.wall_time = time.perf_counter() - start
    if config.output_dir:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json())
    return report


def _tol_pair(text: str) -> tuple[str, float]:
    label, sep, value = text.partition("=")
    if not sep or not label:
        raise argparse.ArgumentTypeError(f"expected LABEL=REAL, got {text!r}")
    try:
        return label.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {value!r} is not a number") from None


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a,b,c, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpeinstein",
        description="Verify Einstein sequential warped-product metrics.",
        epilog="Exit status: 0 if every check passes, 1 if some check fails, 2 on invalid input.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True, metavar="MODE")
    for mode in MODES:
        p = sub.add_parser(mode, help=MODE_HELP[mode], description=MODE_HELP[mode])
        p.add_argument("--spec", help="spec file (YAML)")
        p.add_argument("--q", type=int, default=3, help="q = n1 = d for family runs (default 3)")
        p.add_argument("--n2", type=int, default=3, help="dimension of the second base factor (default 3)")
        p.add_argument("--m", type=float, default=1.0, help="family parameter m > 0; lambda = q m^2 / 2")
        p.add_argument("--samples", type=int, default=20, help="random verification points (default 20)")
        p.add_argument("--seed", type=int, default=0, help="seed for the point sampler (default 0)")
        p.add_argument("--tol", type=_tol_pair, action="append", default=[], metavar="LABEL=REAL",
                       help="override a check tolerance; repeatable. Checks: "
                            + ", ".join(DEFAULT_TOLERANCES[mode]))
        p.add_argument("--out", help="output directory for report.json and tables")
        p.add_argument("--beta0", type=float, default=8.0, help="initial beta (default 8)")
        p.add_argument("--gamma0", type=float, default=2.0, help="initial gamma > 1 (default 2)")
        p.add_argument("--omega0", type=float, default=1.0, help="initial omega (default 1)")
        p.add_argument("--efolds", type=float, default=3.2, help="stop once |beta| fell by this many e-folds")
        p.add_argument("--trajectory", help="stored trajectory table (symmetry-check)")
        p.add_argument("--abc", type=_triple, default=(2.0, 3.0, 1.0), metavar="A,B,C",
                       help="scaling parameters for symmetry-check (default 2,3,1)")
        p.add_argument("--scheme", choices=curvature.SCHEMES, default="hyperdual",
                       help="differentiation scheme of the numeric curvature")
        p.add_argument("--phi2-sign", type=float, default=1.0, help="sign of the slope of phi2")
        p.add_argument("--phi2-offset", type=float, default=1.0, help="constant term c2 of phi2")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        mode=args.mode, spec_path=args.spec, q=args.q, n2=args.n2, m=args.m,
        sample_count=args.samples, seed=args.seed, tolerances=dict(args.tol), output_dir=args.out,
        beta0=args.beta0, gamma0=args.gamma0, omega0=args.omega0, efolds=args.efolds,
        trajectory_path=args.trajectory, abc=tuple(args.abc), scheme=args.scheme,
        phi2_sign=args.phi2_sign, phi2_offset=args.phi2_offset,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        report = run(config)
    except (WarpError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        location = getattr(exc, "location", None)
        if location is not None:
            print(f"  at {location}", file=sys.stderr)
        return 2
    for check in report.checks:
        print(check.line())
    print(f"{'PASS' if report.passed else 'FAIL'} {config.mode} seed={config.seed} ({report.wall_time:.2f}s)")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
