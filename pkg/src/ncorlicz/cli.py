"""Command-line front end.

Exit codes: 0 when every report passed or only recorded findings, 1 when an
asserted or certified bound was violated, 2 for usage, configuration and
regime errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from .errors import NcOrliczError
from .orlicz import delta2_constant, indices, parse_phi
from .report import dumps, emit_report
from .verify import INEQUALITIES, VERIFIERS, EnsembleConfig, ensemble_run, verify_interpolation_report

# keys accepted in --config files, with the EnsembleConfig field they set
CONFIG_KEYS = {
    "phi", "dim", "samples", "seed", "filtration", "rademacher", "n_terms", "hermitian",
    "alpha", "p0", "p1", "restarts", "iterations", "step_tol", "directions", "quad",
    "format", "out", "which", "op",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p, ensemble=True):
    p.add_argument("--phi", help="power:p=2 | powerlog:a=1.2,b=0.5 | powersin:p=4,c=0.2")
    p.add_argument("--config", help="JSON config file; explicit flags take precedence")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--out", help="write the report here instead of stdout")
    if not ensemble:
        return
    p.add_argument("--dim", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--filtration", help='JSON descriptor, e.g. {"model":"tensor","factors":3}')
    p.add_argument("--rademacher", help="exact | mc:<samples>")
    p.add_argument("--quad", type=int, help="quadrature points for lacunary circle averages")
    p.add_argument("--n-terms", dest="n_terms", type=int)
    p.add_argument("--hermitian", action="store_const", const=True)
    p.add_argument("--alpha", help="ones | alternating | random | comma-separated values")
    p.add_argument("--p0", type=float)
    p.add_argument("--p1", type=float)
    p.add_argument("--restarts", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--step-tol", dest="step_tol", type=float)
    p.add_argument("--directions", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ncorlicz", description="Phi-moment inequalities on matrix algebras")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(sub.add_parser("indices", help="Matuszewska indices of Phi"), ensemble=False)
    _common(sub.add_parser("delta2", help="Delta_2 constant of Phi"), ensemble=False)
    p = sub.add_parser("interpolate", help="interpolation theorem with certified constant")
    _common(p)
    p.add_argument("--op", choices=("transform", "stein", "identity"))
    p = sub.add_parser("verify", help="run one inequality verifier")
    p.add_argument("which", choices=INEQUALITIES)
    _common(p)
    p = sub.add_parser("ensemble", help="run several verifiers")
    _common(p)
    p.add_argument("--which", help="comma-separated ids (default: all)")
    return parser


def _load_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(cfg) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        cfg[key] = val
    return cfg


def _ensemble_config(cfg: dict) -> EnsembleConfig:
    if "phi" not in cfg:
        raise UsageError("--phi is required")
    fields = {k: v for k, v in cfg.items() if k in CONFIG_KEYS - {"format", "out", "which", "op"}}
    if isinstance(fields.get("filtration"), str):
        try:
            fields["filtration"] = json.loads(fields["filtration"])
        except json.JSONDecodeError as exc:
            raise UsageError(f"--filtration is not valid JSON: {exc}") from None
    fields["phi"] = parse_phi(fields["phi"])
    ec = EnsembleConfig(**fields)
    ec.make_filtration()
    return ec


def _write(text: str, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _exit_code(reports) -> int:
    if any(r.passed is False for r in reports):
        return 1
    if any(r.error for r in reports):
        return 2
    return 0


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _load_config(args)
        fmt = cfg.get("format", "json")
        if args.command in ("indices", "delta2"):
            if "phi" not in cfg:
                raise UsageError("--phi is required")
            phi = parse_phi(cfg["phi"])
            if args.command == "indices":
                idx = indices(phi)
                out = {"phi": phi.spec(), "p_phi": idx.p_phi, "q_phi": idx.q_phi}
            else:
                k = delta2_constant(phi)
                out = {"phi": phi.spec(), "delta2": k if math.isfinite(k) else None,
                       "unbounded": not math.isfinite(k)}
            _write(dumps(out) + "\n", cfg.get("out"))
            return 0
        ec = _ensemble_config(cfg)
        if args.command == "interpolate":
            reports = [verify_interpolation_report(ec, cfg.get("op", "transform"))]
        elif args.command == "verify":
            reports = [VERIFIERS[args.which](ec)]
        else:
            which = cfg.get("which", ",".join(INEQUALITIES))
            if isinstance(which, str):
                which = [w.strip() for w in which.split(",") if w.strip()]
            reports = ensemble_run(ec, which)
        _write(emit_report(reports, fmt), cfg.get("out"))
        return _exit_code(reports)
    except (UsageError, NcOrliczError, ValueError, TypeError) as exc:
        sys.stderr.write(f"ncorlicz: error: {type(exc).__name__}: {exc}\n")
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
