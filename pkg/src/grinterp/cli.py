"""Command-line interface: experiments, convergence study, bound sweeps.

Configuration precedence is flags > config file > built-in defaults.
The config file (``--config``) holds ``key=value`` lines with ``#``
comments; keys are the flag names with dashes replaced by underscores.
All randomness derives from the single ``--seed``. Relative ``--out``
paths resolve against the ``GRINTERP_OUTDIR`` environment variable when
it is set.

Exit codes: 0 success, 1 precondition or usage violation, 2 numerical
failure (ill-conditioned block, cut locus, unstable integration, or a
failed bound sweep).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from .core import make_stiefel
from .exceptions import GrassmannError
from .experiments import (
    ErrorRecord,
    FnModelSpec,
    QrCurveSpec,
    run_convergence_study,
    run_experiment1,
    run_experiment2,
)
from .matrixio import read_matrix, write_csv
from .maxvol import MaxvolConfig, MaxvolReport, maxvol_rows

OUTDIR_ENV = "GRINTERP_OUTDIR"


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; remap to 1 so exit 2
    # stays reserved for numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


DEFAULTS = {
    "exp1": {
        "seed": 42,
        "n": 1000,
        "p": 10,
        "grid": 101,
        "delta": 0.01,
        "max_iters": 100,
        "threads": 1,
        "out": "exp1.csv",
        "report_out": "",
    },
    "exp2": {
        "n_x": 256,
        "p": 8,
        "grid": 5,
        "delta": 0.01,
        "max_iters": 100,
        "h_deriv": 1e-3,
        "threads": 1,
        "full_scale": False,
        "out": "exp2.csv",
        "report_out": "",
    },
    "convergence": {
        "seed": 42,
        "n": 100,
        "p": 5,
        "h": [0.4, 0.2, 0.1, 0.05],
        "curve": "qr",
        "out": "convergence.csv",
    },
    "bounds": {"seed": 0},
    "maxvol": {"infile": "", "delta": 0.01, "max_iters": 100, "out": ""},
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="grinterp", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="key=value config file", default=None)
        return sp

    sp = add("exp1", "interpolate the Q-factor of a random cubic matrix curve")
    sp.add_argument("--seed", type=int, help="RNG seed for the curve coefficients (default 42)")
    sp.add_argument("--n", type=int, help="ambient dimension (default 1000)")
    sp.add_argument("--p", type=int, help="subspace dimension (default 10)")
    sp.add_argument("--grid", type=int, help="number of evaluation points in [0,1] (default 101)")
    sp.add_argument("--delta", type=float, help="row-selection tolerance (default 0.01)")
    sp.add_argument("--max-iters", type=int, help="row-selection swap cap (default 100)")
    sp.add_argument("--threads", type=int, help="parallel grid evaluation (default 1)")
    sp.add_argument("--out", help="error-record CSV path (default exp1.csv)")
    sp.add_argument("--report-out", help="optional row-selection report CSV path")

    sp = add("exp2", "interpolate POD subspaces of the FitzHugh-Nagumo model")
    sp.add_argument("--n-x", type=int, help="spatial grid points (default 256)")
    sp.add_argument("--p", type=int, help="POD rank (default 8)")
    sp.add_argument("--grid", type=int, help="evaluation points per voltage interval (default 5)")
    sp.add_argument("--delta", type=float, help="row-selection tolerance (default 0.01)")
    sp.add_argument("--max-iters", type=int, help="row-selection swap cap (default 100)")
    sp.add_argument("--h-deriv", type=float, help="voltage step for POD derivatives (default 1e-3)")
    sp.add_argument("--threads", type=int, help="parallel grid evaluation (default 1)")
    sp.add_argument("--full-scale", action="store_true", help="use n_x = 1024")
    sp.add_argument("--out", help="error-record CSV path (default exp2.csv)")
    sp.add_argument("--report-out", help="optional row-selection report CSV path")

    sp = add("convergence", "midpoint-error decay rates of all six schemes")
    sp.add_argument("--seed", type=int, help="RNG seed for the test curve (default 42)")
    sp.add_argument("--n", type=int, help="ambient dimension (default 100)")
    sp.add_argument("--p", type=int, help="subspace dimension (default 5)")
    sp.add_argument("--h", type=float, nargs="+", help="node spacings (default 0.4 0.2 0.1 0.05)")
    sp.add_argument("--curve", choices=["qr", "geodesic"], help="test curve family (default qr)")
    sp.add_argument("--out", help="slope-table CSV path (default convergence.csv)")

    sp = add("bounds", "run the analytic-guarantee sweeps and print a summary")
    sp.add_argument("--seed", type=int, help="RNG seed for all sweeps (default 0)")

    sp = add("maxvol", "quasi-maximum-volume row selection on a matrix file")
    sp.add_argument("--in", dest="infile", help="matrix text file ('rows cols' header)")
    sp.add_argument("--delta", type=float, help="termination tolerance (default 0.01)")
    sp.add_argument("--max-iters", type=int, help="swap cap (default 100)")
    sp.add_argument("--out", help="optional report CSV path")

    return parser


def _read_config(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: malformed config line {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = val
    return values


def _coerce(value, like):
    if isinstance(like, bool):
        return str(value).lower() in ("1", "true", "yes", "on")
    if isinstance(like, list):
        return [float(x) for x in str(value).split()]
    return type(like)(value)


def _merge_options(ns: argparse.Namespace) -> dict:
    """Apply precedence flags > config file > defaults."""
    defaults = DEFAULTS[ns.command]
    merged = dict(defaults)
    if getattr(ns, "config", None):
        for key, val in _read_config(ns.config).items():
            if key not in defaults:
                raise ValueError(f"unknown config key {key!r} for {ns.command}")
            merged[key] = _coerce(val, defaults[key])
    for key, val in vars(ns).items():
        if key in defaults:
            merged[key] = val
    return merged


def _out_path(name: str) -> Path:
    path = Path(name)
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not path.is_absolute():
        path = Path(outdir) / path
    return path


def _cmd_exp1(opt: dict) -> int:
    spec = QrCurveSpec(n=opt["n"], p=opt["p"], seed=opt["seed"])
    cfg = MaxvolConfig(opt["delta"], opt["max_iters"])
    records, reports = run_experiment1(
        spec,
        grid=np.linspace(0.0, 1.0, opt["grid"]),
        frame_cfg=cfg,
        threads=opt["threads"],
    )
    write_csv(_out_path(opt["out"]), ErrorRecord.csv_header(), (r.csv_row() for r in records))
    if opt["report_out"]:
        write_csv(
            _out_path(opt["report_out"]),
            MaxvolReport.csv_header(),
            (rep.csv_row(i) for i, rep in enumerate(reports)),
        )
    print(f"wrote {len(records)} records to {_out_path(opt['out'])}")
    return 0


def _cmd_exp2(opt: dict) -> int:
    n_x = 1024 if opt["full_scale"] else opt["n_x"]
    spec = FnModelSpec(n_x=n_x, pod_rank=opt["p"])
    cfg = MaxvolConfig(opt["delta"], opt["max_iters"])
    result = run_experiment2(
        spec,
        grid_per_interval=opt["grid"],
        frame_cfg=cfg,
        h_deriv=opt["h_deriv"],
        threads=opt["threads"],
    )
    write_csv(
        _out_path(opt["out"]), ErrorRecord.csv_header(), (r.csv_row() for r in result.records)
    )
    if opt["report_out"]:
        write_csv(
            _out_path(opt["report_out"]),
            MaxvolReport.csv_header(),
            (rep.csv_row(i) for i, rep in result.reports),
        )
    print(f"wrote {len(result.records)} records to {_out_path(opt['out'])}")
    return 0


def _cmd_convergence(opt: dict) -> int:
    spec = QrCurveSpec(n=opt["n"], p=opt["p"], seed=opt["seed"])
    rows = run_convergence_study(spec, h_list=opt["h"], curve=opt["curve"])
    write_csv(_out_path(opt["out"]), rows[0].csv_header(), (r.csv_row() for r in rows))
    for row in rows:
        tag = "flat (errors at rounding level)" if row.flagged else f"slope {row.slope:.3f}"
        print(f"{row.scheme}: {tag}")
    return 0


def _cmd_bounds(opt: dict) -> int:
    checks = bounds_mod.run_all(opt["seed"])
    for check in checks:
        print(check.summary_line())
    return 0 if all(c.passed for c in checks) else 2


def _cmd_maxvol(opt: dict) -> int:
    if not opt["infile"]:
        raise ValueError("maxvol requires --in MATRIX_FILE")
    u = make_stiefel(read_matrix(opt["infile"]))
    report = maxvol_rows(u, MaxvolConfig(opt["delta"], opt["max_iters"]))
    if opt["out"]:
        write_csv(_out_path(opt["out"]), MaxvolReport.csv_header(), [report.csv_row(0)])
    print(
        f"iters={report.iters} final_max_entry={report.final_max_entry:.6f} "
        f"inv_norm_before={report.inv_norm_before:.6e} "
        f"inv_norm_after={report.inv_norm_after:.6e} converged={report.converged}"
    )
    return 0


_COMMANDS = {
    "exp1": _cmd_exp1,
    "exp2": _cmd_exp2,
    "convergence": _cmd_convergence,
    "bounds": _cmd_bounds,
    "maxvol": _cmd_maxvol,
}


def main(argv=None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        opt = _merge_options(ns)
        return _COMMANDS[ns.command](opt)
    except GrassmannError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
