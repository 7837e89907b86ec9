"""
Command-line entry point.

    divaudit div --measure jsd --p '[0.4, 0.6]' --q '[0.6, 0.4]'
    divaudit div --family cauchy --gen js --a 0,1 --b 1,2 [--oracle]
    divaudit div --family cauchy --gen kl --sweep 0.1,0.01,0.001
    divaudit audit find --family multinomial --alpha 0.6 [--n 5]
    divaudit audit find --family cauchy --gen js --alpha 0.6
    divaudit audit random --alpha 0.5 --trials 100000 --seed 7
    divaudit audit amplify --cert out/certificate.json --beta 2
    divaudit limits {jsd|cauchy|tv} [--gen kl] [--grid 0.1,0.01,0.001]

Exit status: 0 on success, 1 on usage or input errors, 2 when a violation
search comes back empty.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from .asymptotics import (
    DEFAULT_GRID,
    LimitEstimate,
    cauchy_h2_limit,
    cauchy_h_ratio_sweep,
    cauchy_tv_ratio_sweep,
    jsd_fg_sweep,
)
from .audit import (
    FAMILIES,
    SearchConfig,
    TriangleCertificate,
    amplify_certificate,
    find_cauchy_violation,
    find_jsd_violation,
    random_audit,
)
from .cauchy import CauchyParams, f_div_cauchy, f_div_cauchy_oracle, sweep, zeta
from .distributions import Multinomial
from .divergences import JSD_METHODS, MEASURES, f_divergence_discrete, get_measure, jsd
from .exceptions import DivergenceError, DomainError, NumericalError, SearchFailure
from .generator import generator_ids, get_generator
from .util import Util

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_VIOLATION = 2

COMMANDS = ("div", "audit-find", "audit-random", "audit-amplify", "limits")
LIMIT_TARGETS = ("jsd", "cauchy", "tv")


@dataclass
class RunConfig:
    """Everything one invocation needs; built from argv, checked by ``validate`` before any computation"""

    command: str
    family: str = "multinomial"
    measure: Optional[str] = None
    generator: Optional[str] = None
    method: str = "pointwise"
    p: Optional[str] = None
    q: Optional[str] = None
    a: Optional[str] = None
    b: Optional[str] = None
    oracle: bool = False
    sweep: Optional[list[float]] = None
    alpha: Optional[float] = None
    n: int = 2
    t_min: Optional[float] = None
    t_max: Optional[float] = None
    grid_size: Optional[int] = None
    trials: int = 0
    workers: int = 1
    beta: Optional[float] = None
    cert: Optional[Path] = None
    target: Optional[str] = None
    grid: list[float] = field(default_factory=lambda: list(DEFAULT_GRID))
    output: Optional[Path] = None
    tolerance: Optional[float] = None
    seed: int = 0

    def validate(self) -> None:
        """Raise DomainError on the first invalid field or combination"""
        if self.command not in COMMANDS:
            raise DomainError(f"command must be one of {COMMANDS}; got {self.command!r}")
        if self.family not in FAMILIES:
            raise DomainError(f"--family must be one of {FAMILIES}; got {self.family!r}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise DomainError(f"--tolerance must be positive; got {self.tolerance!r}")
        if self.generator is not None and self.generator not in generator_ids():
            raise DomainError(f"--gen must be one of {generator_ids()}; got {self.generator!r}")
        getattr(self, f"_validate_{self.command.replace('-', '_')}")()

    def _validate_div(self) -> None:
        if self.family == "cauchy":
            if self.measure is not None:
                raise DomainError(f"--measure {self.measure!r} applies to multinomials; use --gen with --family cauchy")
            if self.generator is None:
                raise DomainError("--family cauchy needs --gen")
            if self.sweep is None and (self.a is None or self.b is None):
                raise DomainError("--family cauchy needs --a and --b, or --sweep")
            if self.sweep is not None and not all(t > 0 for t in self.sweep):
                raise DomainError(f"--sweep values must be positive; got {self.sweep!r}")
            return
        if self.measure is None:
            raise DomainError("--measure is required for --family multinomial")
        if self.measure not in MEASURES and not self.measure.startswith("f:"):
            raise DomainError(f"--measure must be one of {sorted(MEASURES)} or f:<gen>; got {self.measure!r}")
        if self.measure.startswith("f:") and self.measure[2:] not in generator_ids():
            raise DomainError(f"unknown generator in --measure {self.measure!r}; expected one of {generator_ids()}")
        if self.method not in JSD_METHODS:
            raise DomainError(f"--method must be one of {JSD_METHODS}; got {self.method!r}")
        if self.p is None or self.q is None:
            raise DomainError("--p and --q are required for --family multinomial")
        if self.oracle or self.sweep is not None:
            raise DomainError("--oracle and --sweep apply to --family cauchy only")

    def _validate_audit_find(self) -> None:
        if self.alpha is None or not self.alpha > 0:
            raise DomainError(f"--alpha must be positive; got {self.alpha!r}")
        if self.family == "cauchy":
            if self.generator is None:
                raise DomainError("--family cauchy needs --gen")
            if self.n != 2:
                raise DomainError("--n applies to --family multinomial only")
        else:
            if self.generator not in (None, "js"):
                raise DomainError(f"--family multinomial audits the Jensen-Shannon divergence; got --gen {self.generator!r}")
            if self.n < 2:
                raise DomainError(f"--n must be at least 2; got {self.n!r}")
        self.search_config()

    def _validate_audit_random(self) -> None:
        if self.alpha is None or not self.alpha > 0:
            raise DomainError(f"--alpha must be positive; got {self.alpha!r}")
        if self.trials < 1:
            raise DomainError(f"--trials must be at least 1; got {self.trials!r}")
        if self.workers < 1:
            raise DomainError(f"--workers must be at least 1; got {self.workers!r}")
        if self.n < 2:
            raise DomainError(f"--n must be at least 2; got {self.n!r}")
        get_measure(self.measure or "jsd")

    def _validate_audit_amplify(self) -> None:
        if self.beta is None or not self.beta >= 1:
            raise DomainError(f"--beta must be at least 1; got {self.beta!r}")
        if self.cert is None:
            raise DomainError("--cert is required")

    def _validate_limits(self) -> None:
        if self.target not in LIMIT_TARGETS:
            raise DomainError(f"limits target must be one of {LIMIT_TARGETS}; got {self.target!r}")
        if not self.grid or not all(t > 0 for t in self.grid):
            raise DomainError(f"--grid must be a non-empty list of positive values; got {self.grid!r}")
        if self.target == "jsd" and not all(t < 0.5 for t in self.grid):
            raise DomainError(f"--grid values must be below 1/2 for jsd; got {self.grid!r}")
        if self.target == "cauchy" and self.generator is None:
            raise DomainError("limits cauchy needs --gen")

    def search_config(self) -> SearchConfig:
        base = SearchConfig.cauchy() if self.family == "cauchy" else SearchConfig.multinomial()
        overrides: dict[str, Any] = {}
        for name in ("t_min", "t_max", "grid_size"):
            if getattr(self, name) is not None:
                overrides[name] = getattr(self, name)
        if self.tolerance is not None:
            overrides["margin_floor"] = self.tolerance
        return SearchConfig(**{**base.__dict__, **overrides})

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        command = args.command if args.command != "audit" else f"audit-{args.audit_command}"
        fields = {k: v for k, v in vars(args).items() if k in cls.__dataclass_fields__ and v is not None}
        fields["command"] = command
        return cls(**fields)


# ------------------------------------------------------------------------------------------------
# Commands
# ------------------------------------------------------------------------------------------------
def _parse_point(text: str) -> Multinomial:
    text = text.strip()
    return Multinomial.from_json(text if text.startswith("[") else f"[{text}]")


def _emit(name: str, value: Any, base: Optional[str] = None) -> None:
    suffix = "" if base is None else f" (base {base})"
    print(f"{name} = {Util.fmt17(value)}{suffix}")


def _run_div(cfg: RunConfig, out: Path) -> int:
    if cfg.family == "cauchy":
        gen = get_generator(cfg.generator)
        if cfg.sweep is not None:
            rows = sweep(gen, cfg.sweep)
            Util.write_csv(
                out / f"cauchy_sweep_{gen.name}.csv",
                ["t", "h", "h_prime", "h_double_prime", "ratio"],
                [(r.t, r.h, r.h_prime, r.h_double_prime, r.ratio) for r in rows],
            )
            for r in rows:
                print(",".join(Util.fmt17(x) for x in (r.t, r.h, r.h_prime, r.h_double_prime, r.ratio)))
            return EXIT_OK
        a, b = CauchyParams.parse(cfg.a), CauchyParams.parse(cfg.b)
        value = (f_div_cauchy_oracle if cfg.oracle else f_div_cauchy)(gen, a, b)
        body = {
            "family": "cauchy",
            "generator": gen.name,
            "a": a.to_json(),
            "b": b.to_json(),
            "zeta": float(zeta(a, b)),
            "method": "oracle" if cfg.oracle else "theta-integral",
            "value": value,
        }
        _emit(f"D_{gen.name}", value, base="e")
    else:
        P, Q = _parse_point(cfg.p), _parse_point(cfg.q)
        if cfg.measure.startswith("f:"):
            result = f_divergence_discrete(get_generator(cfg.measure[2:]), P, Q)
        elif cfg.measure == "jsd":
            result = jsd(P, Q, method=cfg.method)
        else:
            result = get_measure(cfg.measure)(P, Q)
        body = {"family": "multinomial", "p": P.to_json(), "q": Q.to_json(), **result.to_json()}
        _emit(cfg.measure, result.value, base=result.base)
    Util.write_json(out / "div.json", Util.payload("divergence", body))
    return EXIT_OK


def _run_audit_find(cfg: RunConfig, out: Path) -> int:
    search = cfg.search_config()
    if cfg.family == "cauchy":
        cert = find_cauchy_violation(get_generator(cfg.generator), cfg.alpha, search)
    else:
        cert = find_jsd_violation(cfg.alpha, search, n=cfg.n)
    Util.write_json(out / "certificate.json", Util.payload("certificate", cert.to_json()))
    _emit("margin", cert.margin)
    return EXIT_OK


def _run_audit_random(cfg: RunConfig, out: Path) -> int:
    report = random_audit(
        get_measure(cfg.measure or "jsd"), cfg.alpha, cfg.trials, cfg.seed, n=cfg.n, workers=cfg.workers
    )
    Util.write_json(out / "audit_random.json", Util.payload("random-audit", report.to_json()))
    _emit("violations", report.violations)
    _emit("worst_margin", report.worst_margin)
    return EXIT_OK


def _run_audit_amplify(cfg: RunConfig, out: Path) -> int:
    cert = TriangleCertificate.from_json(Util.read_json(cfg.cert))
    amplified = amplify_certificate(cert, cfg.beta)
    Util.write_json(out / "certificate_amplified.json", Util.payload("certificate", amplified.to_json()))
    _emit("alpha", amplified.alpha)
    _emit("margin", amplified.margin)
    return EXIT_OK


def _run_limits(cfg: RunConfig, out: Path) -> int:
    tol = {} if cfg.tolerance is None else {"tolerance": cfg.tolerance}
    estimates: list[LimitEstimate]
    if cfg.target == "jsd":
        estimates = list(jsd_fg_sweep(cfg.grid, **tol))
        tag = "jsd"
    elif cfg.target == "tv":
        estimates = list(cauchy_tv_ratio_sweep(cfg.grid, **tol))
        tag = "tv"
    else:
        gen = get_generator(cfg.generator)
        estimates = [*cauchy_h_ratio_sweep(gen, cfg.grid, **tol), cauchy_h2_limit(gen, cfg.grid, **tol)]
        tag = f"cauchy_{gen.name}"

    ts = [t for t, _ in estimates[0].samples]
    Util.write_csv(
        out / f"limits_{tag}.csv",
        ["t", *(e.target_name for e in estimates)],
        [(t, *(e.samples[i][1] for e in estimates)) for i, t in enumerate(ts)],
    )
    body = {"target": cfg.target, "estimates": [e.to_json() for e in estimates]}
    Util.write_json(out / f"limits_{tag}.json", Util.payload("limits", body))
    for e in estimates:
        print(f"{e.target_name}: {Util.fmt17(e.estimate)} +/- {Util.fmt17(e.error_bar)} ({'pass' if e.passed else 'FAIL'})")
    return EXIT_OK


_DISPATCH = {
    "div": _run_div,
    "audit-find": _run_audit_find,
    "audit-random": _run_audit_random,
    "audit-amplify": _run_audit_amplify,
    "limits": _run_limits,
}


def run(cfg: RunConfig) -> int:
    """Validate ``cfg``, dispatch it and map failures onto the exit-status contract"""
    try:
        cfg.validate()
        out = Util.output_dir(cfg.output)
        return _DISPATCH[cfg.command](cfg, out)
    except SearchFailure as e:
        print(f"no violation found: {e} (max margin {Util.fmt17(e.max_margin)} at t={Util.fmt17(e.t_at_max)})", file=sys.stderr)
        return EXIT_NO_VIOLATION
    except NumericalError as e:
        logger.error("numerical failure: %s", e)
        return EXIT_USAGE
    except (DivergenceError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


# ------------------------------------------------------------------------------------------------
# Argument parsing
# ------------------------------------------------------------------------------------------------
class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers; got {text!r}") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected comma-separated finite numbers; got {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", type=Path, help="Output directory (default: $DIVAUDIT_OUTPUT_DIR or ./divaudit-out)")
    common.add_argument("--tolerance", type=float, help="Override the pass tolerance of limits / the margin floor of audit find")
    common.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--seed", type=int, default=0, help="Seed for random audits (default: 0)")

    parser = _Parser(prog="divaudit", description="Divergences, triangle-inequality audits and limit checks")
    sub = parser.add_subparsers(dest="command", required=True)

    div = sub.add_parser("div", parents=[common], help="Evaluate a divergence")
    div.add_argument("--family", choices=FAMILIES, default="multinomial")
    div.add_argument("--measure", help=f"One of {sorted(MEASURES)} or f:<gen>")
    div.add_argument("--method", choices=JSD_METHODS, default="pointwise", help="Jensen-Shannon evaluation form")
    div.add_argument("--p", help="Weights as a JSON array or comma list")
    div.add_argument("--q", help="Weights as a JSON array or comma list")
    div.add_argument("--gen", dest="generator", help=f"Generator id, one of {generator_ids()}")
    div.add_argument("--a", help="Cauchy parameters mu,sigma")
    div.add_argument("--b", help="Cauchy parameters mu,sigma")
    div.add_argument("--oracle", action="store_true", help="Integrate over the real line instead")
    div.add_argument("--sweep", type=_floats, help="Comma-separated t values for an h sweep CSV")

    audit = sub.add_parser("audit", help="Triangle-inequality audits")
    audit_sub = audit.add_subparsers(dest="audit_command", required=True)

    find = audit_sub.add_parser("find", parents=[common], help="Search for a certified violation")
    find.add_argument("--family", choices=FAMILIES, default="multinomial")
    find.add_argument("--alpha", type=float, required=True)
    find.add_argument("--gen", dest="generator")
    find.add_argument("--n", type=int, default=2, help="Simplex size for the multinomial family")
    find.add_argument("--t-min", dest="t_min", type=float)
    find.add_argument("--t-max", dest="t_max", type=float)
    find.add_argument("--grid-size", dest="grid_size", type=int)

    rnd = audit_sub.add_parser("random", parents=[common], help="Audit random triples")
    rnd.add_argument("--alpha", type=float, required=True)
    rnd.add_argument("--trials", type=int, required=True)
    rnd.add_argument("--measure", choices=sorted(MEASURES), default="jsd")
    rnd.add_argument("--n", type=int, default=3)
    rnd.add_argument("--workers", type=int, default=1)

    amp = audit_sub.add_parser("amplify", parents=[common], help="Raise a certificate to a larger exponent")
    amp.add_argument("--cert", type=Path, required=True)
    amp.add_argument("--beta", type=float, required=True)

    limits = sub.add_parser("limits", parents=[common], help="Extrapolate the t -> 0 limits")
    limits.add_argument("target", choices=LIMIT_TARGETS)
    limits.add_argument("--gen", dest="generator")
    limits.add_argument("--grid", type=_floats, default=list(DEFAULT_GRID))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(asctime)s - %(levelname)s - %(message)s")
    return run(RunConfig.from_args(args))


if __name__ == "__main__":
    sys.exit(main())
