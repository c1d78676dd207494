"""Command-line front end.

    singular-spectra eval kummer --a -1 --b 2 --z 1
    singular-spectra spectrum --nu 0.5 --xi 10 --kmax 8 --method both --format csv
    singular-spectra azeros --b 1 --xi 40 --count 6
    singular-spectra verify bounds --nu 0.5 --xi 20 --kmax 10
    singular-spectra report --nu 0 --xi-grid 16,24,32,40 --kmax 2

Exit status: 0 success, 1 verification violations, 2 usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import enum
import math
import sys
from dataclasses import dataclass, field

from .errors import (
    AmbiguousSign,
    BracketingFailure,
    ConvergenceFailure,
    DomainError,
    GridTooCoarse,
    InsufficientPrecision,
    InvalidParams,
    NotApplicable,
    PrecisionExhausted,
)
from .params import SpectralProblem
from .specfun.precision import PrecisionPolicy
from .tables import FORMATS, write_table

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

NUMERICAL_ERRORS = (
    AmbiguousSign,
    BracketingFailure,
    ConvergenceFailure,
    GridTooCoarse,
    InsufficientPrecision,
    PrecisionExhausted,
)

EVAL_TARGETS = ("kummer", "kummer2", "whittaker", "laguerre", "besselzero", "pr")
VERIFY_SUITES = ("bounds", "decay", "bessel", "quasimode", "azeros")


class UsageError(Exception):
    pass


class Command(enum.Enum):
    Eval = "eval"
    Spectrum = "spectrum"
    AZeros = "azeros"
    Verify = "verify"
    Report = "report"


class MethodChoice(enum.Enum):
    KummerRoot = "kummer"
    FiniteDifference = "fd"
    Both = "both"


@dataclass
class RunConfig:
    command: Command
    target: str | None = None
    nu: float = 0.0
    xi: float | None = None
    xi_grid: list = field(default_factory=list)
    b: float | None = None
    kmax: int = 10
    count: int | None = None
    method: MethodChoice = MethodChoice.KummerRoot
    tau: float = 0.5
    delta: float = 0.1
    tol: float = 1e-10
    prec_bits: int | None = None
    fmt: str | None = None
    out: str | None = None
    a: float | None = None
    z: float | None = None
    kappa: float | None = None
    mu: float | None = None
    n: int | None = None
    alpha: float = 0.0
    r: float | None = None
    k: int = 0
    theta: float | None = None
    regime: str = "oscillatory"

    @property
    def policy(self) -> PrecisionPolicy:
        if self.prec_bits is None:
            return PrecisionPolicy(target_tol=self.tol)
        return PrecisionPolicy(target_tol=self.tol, min_bits=self.prec_bits)

    def xis(self) -> list:
        if self.xi_grid:
            return list(self.xi_grid)
        if self.xi is not None:
            return [self.xi]
        raise UsageError("missing --xi (or --xi-grid)")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _grid(text: str) -> list:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"xi-grid: {exc}") from None
    if not vals:
        raise argparse.ArgumentTypeError("xi-grid must not be empty")
    return vals


# Option name -> (type, help). Shared by every subcommand and by config files.
_OPTIONS = {
    "nu": (float, "singularity strength nu >= 0"),
    "xi": (float, "semiclassical parameter xi > 0"),
    "xi-grid": (_grid, "comma-separated ascending xi values"),
    "b": (float, "Kummer parameter b"),
    "kmax": (int, "largest eigenvalue index"),
    "count": (int, "number of a-zeros"),
    "method": (str, "kummer, fd or both"),
    "tau": (float, "low-regime fraction tau in (0, 1)"),
    "delta": (float, "delta for the constant c and the norm check"),
    "tol": (float, "relative tolerance"),
    "prec-bits": (int, "minimum working precision in bits"),
    "format": (str, "csv, json or text"),
    "out": (str, "output path (default stdout)"),
    "a": (float, "Kummer parameter a"),
    "z": (float, "argument z"),
    "kappa": (float, "Whittaker kappa"),
    "mu": (float, "Whittaker mu"),
    "n": (int, "polynomial degree"),
    "alpha": (float, "Laguerre order"),
    "r": (float, "Laguerre argument"),
    "k": (int, "zero index"),
    "theta": (float, "Plancherel-Rotach angle"),
    "regime": (str, "oscillatory or exponential"),
}


def _add_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    for name, (typ, help_) in _OPTIONS.items():
        p.add_argument(f"--{name}", type=typ, help=help_, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="singular-spectra", description="Spectra of the singular harmonic operator on (0, 1).")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("eval", help="evaluate one special function")
    p.add_argument("target", choices=EVAL_TARGETS)
    _add_options(p)
    for name, help_ in (
        ("spectrum", "eigenvalues up to kmax"),
        ("azeros", "largest a-zeros of M(a, b, xi)"),
        ("report", "run every verification suite"),
    ):
        _add_options(sub.add_parser(name, help=help_))
    p = sub.add_parser("verify", help="run one verification suite")
    p.add_argument("target", nargs="?", choices=VERIFY_SUITES)
    p.add_argument("--suite", choices=VERIFY_SUITES)
    _add_options(p)
    return parser


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config {path}:{num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in _OPTIONS:
            raise UsageError(f"config {path}:{num}: unknown key {key!r}")
        typ = _OPTIONS[key][0]
        try:
            out[key] = typ(value)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
    return out


def parse_config(argv: list | None = None) -> RunConfig:
    """Build a RunConfig from argv and an optional config file.

    Raises UsageError naming the offending key.
    """
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("missing command (eval, spectrum, azeros, verify, report)")
    values = read_config_file(args.config) if args.config else {}
    for name in _OPTIONS:
        v = getattr(args, name.replace("-", "_"))
        if v is not None:
            values[name] = v
    target = getattr(args, "target", None)
    if args.command == "verify":
        target = target or args.suite
        if target is None:
            raise UsageError("verify needs a suite: " + ", ".join(VERIFY_SUITES))
    cfg = RunConfig(command=Command(args.command), target=target)
    for name, v in values.items():
        attr = {"xi-grid": "xi_grid", "prec-bits": "prec_bits", "format": "fmt"}.get(name, name)
        setattr(cfg, attr, v)
    _validate(cfg)
    return cfg


_DEFAULT_FORMAT = {
    Command.Eval: "text",
    Command.Spectrum: "text",
    Command.AZeros: "csv",
    Command.Verify: "json",
    Command.Report: "json",
}


def _validate(cfg: RunConfig) -> None:
    if cfg.fmt is None:
        cfg.fmt = _DEFAULT_FORMAT[cfg.command]
    if cfg.fmt not in FORMATS:
        raise UsageError(f"format: expected one of {', '.join(FORMATS)}, got {cfg.fmt!r}")
    try:
        cfg.method = MethodChoice(cfg.method) if not isinstance(cfg.method, MethodChoice) else cfg.method
    except ValueError:
        raise UsageError(f"method: expected kummer, fd or both, got {cfg.method!r}") from None
    if not cfg.tol > 0 or not cfg.tol < 1:
        raise UsageError("tol: must lie in (0, 1)")
    if cfg.nu < 0:
        raise UsageError("nu: must be >= 0")
    if cfg.xi is not None and not cfg.xi > 0:
        raise UsageError("xi: must be > 0")
    if cfg.xi_grid and (any(x <= 0 for x in cfg.xi_grid) or any(b <= a for a, b in zip(cfg.xi_grid, cfg.xi_grid[1:]))):
        raise UsageError("xi-grid: must be positive and strictly ascending")
    if cfg.kmax < 0:
        raise UsageError("kmax: must be >= 0")
    if cfg.count is not None and cfg.count < 1:
        raise UsageError("count: must be >= 1")
    if not 0 < cfg.tau < 1:
        raise UsageError("tau: must lie in (0, 1)")
    if cfg.prec_bits is not None and cfg.prec_bits < 53:
        raise UsageError("prec-bits: must be >= 53")
    if cfg.regime not in ("oscillatory", "exponential"):
        raise UsageError("regime: expected oscillatory or exponential")
    needs_xi = cfg.command in (Command.Spectrum, Command.AZeros, Command.Verify, Command.Report)
    if needs_xi and cfg.xi is None and not cfg.xi_grid:
        raise UsageError("missing --xi (or --xi-grid)")
    if cfg.command is Command.Eval:
        required = {
            "kummer": ("a", "b", "z"),
            "kummer2": ("a", "b", "z"),
            "whittaker": ("kappa", "mu", "z"),
            "laguerre": ("n", "r"),
            "besselzero": (),
            "pr": ("n", "theta"),
        }[cfg.target]
        for name in required:
            if getattr(cfg, name) is None:
                raise UsageError(f"eval {cfg.target}: missing --{name}")


# ---------------------------------------------------------------- commands


def _eval(cfg: RunConfig):
    from .specfun import (
        KummerArgs,
        Regime,
        bessel_zero,
        kummer_m,
        kummer_m_second,
        laguerre,
        plancherel_rotach,
        whittaker_m,
    )

    pol = cfg.policy
    if cfg.target == "kummer":
        v = kummer_m(KummerArgs(cfg.a, cfg.b, cfg.z), pol)
    elif cfg.target == "kummer2":
        v = kummer_m_second(KummerArgs(cfg.a, cfg.b, cfg.z), pol)
    elif cfg.target == "whittaker":
        v = whittaker_m(cfg.kappa, cfg.mu, cfg.z, pol)
    elif cfg.target == "laguerre":
        v = laguerre(cfg.n, cfg.alpha, cfg.r)
    elif cfg.target == "besselzero":
        v = bessel_zero(cfg.nu, cfg.k, pol)
    else:
        v = plancherel_rotach(cfg.n, cfg.alpha, cfg.theta, Regime(cfg.regime))
    digits = int(math.ceil(-math.log10(cfg.tol))) + 2
    return [{"value": "{:.{d}g}".format(v, d=digits)}]


def _spectrum_rows(cfg: RunConfig, xi: float) -> list:
    from .azero import spectrum_via_kummer
    from .eigensolver import eigen_fd

    problem = SpectralProblem(cfg.nu, xi)
    rows = []
    kummer = fd = None
    if cfg.method in (MethodChoice.KummerRoot, MethodChoice.Both):
        kummer = spectrum_via_kummer(problem, cfg.kmax, cfg.policy)
    if cfg.method in (MethodChoice.FiniteDifference, MethodChoice.Both):
        fd = eigen_fd(problem, cfg.kmax)
    for k in range(cfg.kmax + 1):
        for res in (kummer, fd):
            if res is None:
                continue
            rec = res[k].as_record()
            if kummer is not None and fd is not None:
                ref = float(kummer[k].lambda_)
                rec["rel_diff"] = abs(float(res[k].lambda_) - ref) / ref
            rows.append(rec)
    return rows


def _spectrum(cfg: RunConfig):
    rows = []
    for xi in cfg.xis():
        rows.extend(_spectrum_rows(cfg, xi))
    return rows


def _azeros(cfg: RunConfig):
    from .azero import find_azeros

    b = cfg.b if cfg.b is not None else 1 + cfg.nu
    count = cfg.count if cfg.count is not None else cfg.kmax + 1
    rows = []
    for xi in cfg.xis():
        for z in find_azeros(b, xi, count, cfg.policy):
            rec = {"xi": xi}
            rec.update(z.as_record())
            rows.append(rec)
    return rows


def _verify(cfg: RunConfig, suite: str):
    """Returns (records, passed)."""
    from . import azero, bounds, quasimode

    pol = cfg.policy
    if suite == "bounds":
        rows, ok = [], True
        c = bounds.solve_c(cfg.delta)
        for xi in cfg.xis():
            p = SpectralProblem(cfg.nu, xi)
            rep = bounds.verify_lower_bounds(azero.spectrum_via_kummer(p, cfg.kmax, pol), p, c)
            rows += rep.as_records()
            ok &= rep.passed
        return rows, ok
    if suite == "bessel":
        rows, ok = [], True
        for xi in cfg.xis():
            p = SpectralProblem(cfg.nu, xi)
            rep = bounds.verify_bessel_window(azero.spectrum_via_kummer(p, cfg.kmax, pol), p, pol)
            rows += rep.as_records()
            ok &= rep.passed
        return rows, ok
    if suite == "azeros":
        rows, ok = [], True
        b = cfg.b if cfg.b is not None else 1 + cfg.nu
        count = cfg.count if cfg.count is not None else cfg.kmax + 1
        for xi in cfg.xis():
            zs = azero.find_azeros(b, xi, count, pol)
            rep = bounds.verify_azero_bounds(zs, b, xi, bounds.solve_c(cfg.delta), cfg.tau)
            rows += rep.as_records()
            ok &= rep.passed
        return rows, ok
    if suite == "decay":
        grid = cfg.xis()
        if len(grid) < 2:
            raise UsageError("verify decay needs --xi-grid with at least two values")
        rep = bounds.verify_exponential_gap(cfg.nu, cfg.tau, grid, list(range(cfg.kmax + 1)), pol)
        return rep.as_records(), rep.passed
    if suite == "quasimode":
        rows, ok = [], True
        for xi in cfg.xis():
            p = SpectralProblem(cfg.nu, xi)
            kcap = min(cfg.kmax, int(cfg.tau * xi / 4))
            spec = azero.spectrum_via_kummer(p, kcap, pol, tol=1e-40)
            for k in range(kcap + 1):
                q = quasimode.spectral_distance_quotient(p, k, pol, spectrum=spec)
                rows.append(q.as_record())
                ok &= q.holds or q.inconclusive
        return rows, ok
    raise UsageError(f"unknown suite {suite!r}")


def _report(cfg: RunConfig):
    rows, ok = [], True
    suites = ["bounds", "bessel", "azeros", "quasimode"]
    if len(cfg.xis()) >= 2:
        suites.insert(1, "decay")
    for suite in suites:
        recs, passed = _verify(cfg, suite)
        ok &= passed
        for r in recs:
            rows.append({"suite": suite, "pass": r.get("pass", r.get("holds", not r.get("inconclusive", False))), "record": r})
    return rows, ok


def run(cfg: RunConfig) -> int:
    """Execute a parsed configuration and return the exit status."""
    try:
        ok = True
        if cfg.command is Command.Eval:
            rows = _eval(cfg)
            if cfg.fmt == "text" and cfg.out is None:
                sys.stdout.write(rows[0]["value"] + "\n")
                return EXIT_OK
        elif cfg.command is Command.Spectrum:
            rows = _spectrum(cfg)
        elif cfg.command is Command.AZeros:
            rows = _azeros(cfg)
        elif cfg.command is Command.Verify:
            rows, ok = _verify(cfg, cfg.target)
        else:
            rows, ok = _report(cfg)
        write_table(rows, cfg.fmt, cfg.out)
        return EXIT_OK if ok else EXIT_VIOLATIONS
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (InvalidParams, DomainError, NotApplicable) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NUMERICAL_ERRORS as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERICAL


def main(argv: list | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
