"""Batch command-line front end.

Defaults (each overridable by its flag):

=============  ===========  =====================================
flag           default      meaning
=============  ===========  =====================================
--alpha        golden       golden | cf:a1,a2,... | float:0.xxxx
--K            32           angular truncation degree
--J            32           radial intervals (radii j/J, j=0..J)
--nmax         1024         orbit-matching window |n| <= nmax
--mean-tol     1e-10        circle-mean threshold for obstruction
--solve-tol    1e-9         residual bound for solved reports
--fiber-tol    1e-9         relative fiber-coordinate tolerance
--angle-tol    (derived)    override of the matching tolerance
--delta-zero   1e-9         axis threshold for path division
--format       json         json | csv (divide-path/smalldiv: csv)
--out          stdout       output file
=============  ===========  =====================================

Exit codes: 0 success, 1 usage or input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import cohomology as coh
from .bundle import restrict_boundary
from .exceptions import InputError, MalformedCSV, NumericalFailure, WarpedBundleError
from .quotient import DELTA_ZERO, FIBER_TOL, N_MAX, MatchWindow, SampledPath, divide_path
from .rotation import RotationNumber, make_rotation, small_divisor

log = logging.getLogger("warpedbundle")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 3

PATH_HEADER = ["t", "re_w1", "im_w1", "tau1", "re_w2", "im_w2", "tau2"]


@dataclass
class Tolerances:
    mean_tol: float = coh.MEAN_TOL
    solve_tol: float = coh.SOLVE_TOL
    fiber_tol: float = FIBER_TOL
    angle_tol_override: float | None = None


@dataclass
class RunConfig:
    alpha_spec: str = "golden"
    K: int = 32
    J: int = coh.DEFAULT_J
    n_max: int = N_MAX
    tolerances: Tolerances = field(default_factory=Tolerances)
    format: str = "json"
    out: str | None = None

    def validate(self):
        if self.K < 1:
            raise InputError("--K must be >= 1")
        if self.J < 2:
            raise InputError("--J must be >= 2")
        if self.n_max < 1:
            raise InputError("--nmax must be >= 1")
        for name, value in asdict(self.tolerances).items():
            if value is not None and value <= 0:
                raise InputError(f"{name} must be positive")
        if self.format not in ("json", "csv"):
            raise InputError("--format must be json or csv")

    def describe(self, alpha: RotationNumber) -> dict:
        return {
            "alpha": alpha.describe(),
            "K": self.K,
            "J": self.J,
            "n_max": self.n_max,
            "tolerances": asdict(self.tolerances),
        }


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, fmt: str = "json"):
    p.add_argument("--alpha", default="golden")
    p.add_argument("--K", type=int, default=32)
    p.add_argument("--J", type=int, default=coh.DEFAULT_J)
    p.add_argument("--nmax", type=int, default=N_MAX)
    p.add_argument("--mean-tol", type=float, default=coh.MEAN_TOL)
    p.add_argument("--solve-tol", type=float, default=coh.SOLVE_TOL)
    p.add_argument("--fiber-tol", type=float, default=FIBER_TOL)
    p.add_argument("--angle-tol", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv"), default=fmt)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="warpedbundle", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fhelp = "abs2 | re | im | zero | monomial:k | const:c | boundary | table:PATH"
    p = sub.add_parser("solve", help="solve the coboundary equation for f")
    _common(p)
    p.add_argument("--f", required=True, help=fhelp)

    p = sub.add_parser("class", help="decide whether the class of f vanishes")
    _common(p)
    p.add_argument("--f", required=True, help=fhelp)

    p = sub.add_parser("obstruction", help="certify that the gauge equation has no solution")
    _common(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--Ks", default="8,16,32", help="comma-separated truncation degrees")

    p = sub.add_parser("divide-path", help="divide two lifts along a sampled path")
    _common(p, fmt="csv")
    p.add_argument("csv_path")
    p.add_argument("--delta-zero", type=float, default=DELTA_ZERO)
    p.add_argument("--summary", default=None,
                   help="summary JSON path (default: OUT.summary.json, or stderr)")

    p = sub.add_parser("smalldiv", help="tabulate small divisors")
    _common(p, fmt="csv")
    p.add_argument("--kmax", type=int, default=64)
    return parser


def _config(args) -> RunConfig:
    cfg = RunConfig(
        alpha_spec=args.alpha,
        K=args.K,
        J=args.J,
        n_max=args.nmax,
        tolerances=Tolerances(args.mean_tol, args.solve_tol, args.fiber_tol, args.angle_tol),
        format=args.format,
        out=args.out,
    )
    cfg.validate()
    return cfg


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


_NUMBER_LIST = re.compile(r"\[\s*([-+0-9.eE,\s]+?)\s*\]")


def _json(obj) -> str:
    # keep flat numeric lists (cf prefixes, profiles) on a single line
    text = json.dumps(obj, indent=2)
    text = _NUMBER_LIST.sub(lambda m: "[" + re.sub(r",\s*", ", ", m.group(1)) + "]", text)
    return text + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _function(spec: str, cfg: RunConfig, alpha):
    if spec == "boundary":
        return restrict_boundary(alpha).f
    return coh.sample(spec, cfg.K, coh.default_radii(cfg.J))


def _radii(f) -> np.ndarray:
    return np.array([1.0]) if isinstance(f, coh.CircleFunction) else f.radii


def cmd_solve(args) -> int:
    cfg = _config(args)
    alpha = make_rotation(cfg.alpha_spec)
    f = _function(args.f, cfg, alpha)
    report = coh.solve_coboundary(alpha, f, cfg.tolerances.mean_tol, cfg.tolerances.solve_tol)
    if cfg.format == "json":
        body = {"command": "solve", "function": args.f, "config": cfg.describe(alpha),
                "report": report.to_dict()}
        _emit(_json(body), cfg.out)
    else:
        norms = (report.sigma.circle_norms() if report.sigma is not None
                 else np.full(report.profile.shape, np.nan))
        rows = [[repr(float(r)), repr(float(m)), repr(float(s))]
                for r, m, s in zip(_radii(f), report.profile, norms)]
        _emit(_csv(["r", "mean", "sigma_norm"], rows), cfg.out)
    return EXIT_OK


def cmd_class(args) -> int:
    cfg = _config(args)
    alpha = make_rotation(cfg.alpha_spec)
    f = _function(args.f, cfg, alpha)
    verdict = coh.class_is_trivial(
        alpha, f, mean_tol=cfg.tolerances.mean_tol, solve_tol=cfg.tolerances.solve_tol
    )
    if cfg.format == "json":
        body = {"command": "class", "function": args.f, "config": cfg.describe(alpha)}
        body.update(verdict.to_dict())
        _emit(_json(body), cfg.out)
    else:
        rows = [[repr(float(r)), str(verdict.trivial).lower(), repr(float(m))]
                for r, m in zip(_radii(f), verdict.report.profile)]
        _emit(_csv(["r", "trivial", "mean"], rows), cfg.out)
    return EXIT_OK


def cmd_obstruction(args) -> int:
    cfg = _config(args)
    if args.n == 0:
        raise InputError("--n must be nonzero")
    try:
        Ks = [int(k) for k in args.Ks.split(",") if k.strip()]
    except ValueError:
        raise InputError(f"bad --Ks {args.Ks!r}") from None
    if not Ks or min(Ks) < 0:
        raise InputError("--Ks needs non-negative degrees")
    alpha = make_rotation(cfg.alpha_spec)
    report = coh.certify_obstruction(alpha, args.n, Ks)
    if cfg.format == "json":
        body = {"command": "obstruction", "config": cfg.describe(alpha)}
        body.update(report.to_dict())
        _emit(_json(body), cfg.out)
    else:
        rows = [[e.K, repr(e.min_residual), repr(e.orthogonality)] for e in report.entries]
        _emit(_csv(["K", "min_residual", "orthogonality"], rows), cfg.out)
    if not report.holds:
        log.error("obstruction certificate failed: %s", report.to_dict()["entries"])
        return EXIT_NUMERICAL
    return EXIT_OK


def read_path_csv(path: Path) -> SampledPath:
    """Read a sampled path in the ``t,re_w1,im_w1,tau1,re_w2,im_w2,tau2`` format."""
    try:
        with Path(path).open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != PATH_HEADER:
                raise MalformedCSV(f"{path}: header must be {','.join(PATH_HEADER)}")
            rows = [[float(x) for x in row] for row in reader if row]
    except OSError as exc:
        raise MalformedCSV(f"{path}: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, MalformedCSV):
            raise
        raise MalformedCSV(f"{path}: {exc}") from None
    if not rows or any(len(r) != len(PATH_HEADER) for r in rows):
        raise MalformedCSV(f"{path}: every row needs {len(PATH_HEADER)} fields")
    a = np.array(rows)
    try:
        return SampledPath(
            ts=a[:, 0],
            w1=a[:, 1] + 1j * a[:, 2],
            tau1=a[:, 3],
            w2=a[:, 4] + 1j * a[:, 5],
            tau2=a[:, 6],
        )
    except InputError as exc:
        raise MalformedCSV(f"{path}: {exc}") from None


def write_path_csv(path: Path, p: SampledPath) -> None:
    rows = [
        [repr(float(x)) for x in (t, w1.real, w1.imag, a, w2.real, w2.imag, b)]
        for t, w1, a, w2, b in zip(p.ts, p.w1, p.tau1, p.w2, p.tau2)
    ]
    Path(path).write_text(_csv(PATH_HEADER, rows))


def cmd_divide_path(args) -> int:
    cfg = _config(args)
    alpha = make_rotation(cfg.alpha_spec)
    path = read_path_csv(Path(args.csv_path))
    win = MatchWindow(n_max=cfg.n_max, angle_tol=cfg.tolerances.angle_tol_override,
                      fiber_tol=cfg.tolerances.fiber_tol)
    result = divide_path(alpha, path, win.resolve(alpha), args.delta_zero)
    summary = {"command": "divide-path", "input": str(args.csv_path),
               "config": cfg.describe(alpha), "delta_zero": args.delta_zero}
    summary.update(result.summary())
    if cfg.format == "csv":
        rows = [[repr(float(t)), repr(float(s)), int(m)]
                for t, s, m in zip(result.ts, result.s, result.m)]
        _emit(_csv(["t", "s", "m"], rows), cfg.out)
        if args.summary:
            Path(args.summary).write_text(_json(summary))
        elif cfg.out:
            Path(cfg.out + ".summary.json").write_text(_json(summary))
        else:
            sys.stderr.write(_json(summary))
    else:
        summary["t"] = result.ts.tolist()
        summary["s"] = result.s.tolist()
        summary["m"] = result.m.tolist()
        _emit(_json(summary), cfg.out)
    return EXIT_OK


def cmd_smalldiv(args) -> int:
    cfg = _config(args)
    if args.kmax < 1:
        raise InputError("--kmax must be >= 1")
    alpha = make_rotation(cfg.alpha_spec)
    ks = np.arange(1, args.kmax + 1)
    divs = small_divisor(alpha, ks)
    if cfg.format == "csv":
        _emit(_csv(["k", "divisor"], [[int(k), repr(float(d))] for k, d in zip(ks, divs)]),
              cfg.out)
    else:
        body = {"command": "smalldiv", "config": cfg.describe(alpha),
                "k": ks.tolist(), "divisor": divs.tolist()}
        _emit(_json(body), cfg.out)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "class": cmd_class,
    "obstruction": cmd_obstruction,
    "divide-path": cmd_divide_path,
    "smalldiv": cmd_smalldiv,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except NumericalFailure as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_NUMERICAL
    except WarpedBundleError as exc:  # pragma: no cover - every error has a family
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
