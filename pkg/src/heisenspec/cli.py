"""Command-line interface: ``heisenspec <command> [options]``.

Exit status is 0 on success, 2 when an input violates a precondition (or a
checked condition fails) and 1 on internal errors.
"""
import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import conventions
from .errors import HeisenspecError, PreconditionError
from .io import _cell, emit_json, emit_table

EXIT_OK, EXIT_INTERNAL, EXIT_PRECONDITION = 0, 1, 2
THREADS_ENV = "HEISENSPEC_THREADS"


class ConfigError(PreconditionError):
    pass


def _floats(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def read_config(path) -> dict:
    """``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value", {"line": lineno})
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def threads_from_env() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer", {"env": THREADS_ENV})
    if v < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1, got {v}", {"env": THREADS_ENV})
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heisenspec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text, default_format="json"):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="key=value file; command-line flags take precedence")
        sp.add_argument("--format", choices=["json", "csv"], default=default_format)
        sp.add_argument("--output", help="write here instead of stdout")
        return sp

    c = add("conditions", "hypoellipticity conditions Y(q), X(k), X(p,q) and the sublaplacian test")
    c.add_argument("--n", type=int, default=None)
    c.set_defaults(_required=("n",))
    c.add_argument("--kappa", type=int, default=0)
    c.add_argument("--r", type=int)
    c.add_argument("--d", type=int)
    c.add_argument("--q", type=int)
    c.add_argument("--p", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--lam", type=_floats, help="symplectic spectrum for the sublaplacian test, e.g. 1,2")
    c.add_argument("--mu", type=_floats, help="eigenvalues of a diagonal mu, e.g. 0.5,3")

    m = add("mehler", "model heat kernel at a point")
    m.add_argument("--n", type=int, default=None)
    m.set_defaults(_required=("n",))
    m.add_argument("--mu", type=complex, default=0j)
    m.add_argument("--x0", type=float, default=0.0)
    m.add_argument("--xprime", type=_floats, help="2n comma-separated values (default 0)")
    m.add_argument("--t", type=float, default=1.0)
    m.add_argument("--rtol", type=_positive, default=1e-13)

    v = add("nu", "the Weyl factor nu(mu)")
    v.add_argument("--n", type=int, default=None)
    v.set_defaults(_required=("n",))
    v.add_argument("--mu", type=float, default=0.0)

    w = add("weyl-table", "table of alpha, beta or gamma constants", default_format="csv")
    w.add_argument("--family", choices=["alpha", "beta", "gamma"], default=None)
    w.add_argument("--n", type=int, default=None)
    w.set_defaults(_required=("family", "n"))
    w.add_argument("--kappa", type=int, default=0)
    w.add_argument("--convention", choices=["plus_n", "minus_n"], default="plus_n")

    g = add("gg-constant", "counting constant of a product of k sublaplacians")
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--k", type=int, default=None)
    g.set_defaults(_required=("n", "k"))

    nc = add("nilcheck", "grid Weyl-law check on the Heisenberg nilmanifold")
    nc.add_argument("--sizes", type=_ints, default=[24, 32, 48])
    nc.add_argument("--window", type=_floats, default=[10.0, 65.0])
    nc.add_argument("--seed", type=int, default=0)
    nc.add_argument("--tolerance", type=_positive, default=0.10)
    nc.add_argument("--ledger", help="write the adjudication into this ledger file")

    add("conventions", "print the conventions ledger")
    return p


def parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        values = read_config(args.config)
        sp = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sp._actions} - {"help", "config", "_required"}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}", {"keys": unknown})
        sp.set_defaults(**values)
        args = parser.parse_args(argv)
        for a in sp._actions:
            # argparse converts string defaults only for options that have a type
            if a.dest in values and isinstance(getattr(args, a.dest), str) and a.type is not None:
                setattr(args, a.dest, a.type(getattr(args, a.dest)))
            if a.dest in values and a.choices is not None and getattr(args, a.dest) not in a.choices:
                raise ConfigError(f"config value {a.dest}={values[a.dest]} not in {sorted(a.choices)}",
                                  {a.dest: values[a.dest]})
    missing = [f"--{d}" for d in getattr(args, "_required", ()) if getattr(args, d, None) is None]
    if missing:
        raise ConfigError(f"missing required options: {', '.join(missing)}", {"missing": missing})
    return args


def cmd_conditions(args):
    from .levi import (GeometryParams, LeviForm, condition_X, condition_Xpq, sublaplacian_report,
                       y_witness_band)

    g = GeometryParams(args.n, args.kappa, args.r, args.d)
    out, ok = {}, True
    if args.q is not None and args.p is None:
        band = y_witness_band(g, args.q)
        out["Y"] = band is None
        out["witness_band"] = None if band is None else f"[{band[0]},{band[1]}]"
        ok &= band is None
    if args.p is not None and args.q is not None:
        out["Xpq"] = condition_Xpq(g, args.p, args.q)
        ok &= out["Xpq"]
    if args.k is not None:
        out["X"] = condition_X(g.d, g.r, args.k)
        ok &= out["X"]
    if args.lam is not None and args.mu is not None:
        rep = sublaplacian_report(LeviForm.normal_form(args.lam, args.d), np.diag(args.mu))
        out["sublaplacian"] = rep.holds
        out["margin"] = rep.margin
        out["complex_spectrum"] = rep.complex_spectrum
        ok &= rep.holds
    if not out:
        raise PreconditionError("nothing to check: give --q, --p and --q, --k, or --lam with --mu")
    return out, EXIT_OK if ok else EXIT_PRECONDITION


def cmd_mehler(args):
    from .mehler import HeatQuery, heat_kernel_fs_with_error

    q = HeatQuery(args.n, args.mu, args.x0, args.xprime, args.t)
    val, err = heat_kernel_fs_with_error(q, args.rtol)
    return {"k": val, "abs_err": err}, EXIT_OK


def cmd_nu(args):
    from .weyl import nu_with_error

    val, rel = nu_with_error(args.n, args.mu)
    return {"nu": val, "rel_err": rel}, EXIT_OK


def weyl_table(family, n, kappa=0, convention="plus_n"):
    """Records and excluded parameter sets for one family."""
    from .levi import GeometryParams, condition_Xpq, condition_Y
    from .weyl import form_record

    records, excluded = [], []
    if family == "gamma":
        for k in range(2 * n + 1):
            params = {"n": n, "k": k}
            (excluded if k == n else records).append(params)
    else:
        g = GeometryParams(n, kappa, n)
        for p in range(n + 1):
            for q in range(n + 1):
                params = {"n": n, "kappa": kappa, "p": p, "q": q}
                good = condition_Y(g, q) if family == "alpha" else condition_Xpq(g, p, q)
                (records if good else excluded).append(params)
    return [form_record(family, prm, convention) for prm in records], excluded


def cmd_weyl_table(args):
    records, excluded = weyl_table(args.family, args.n, args.kappa, args.convention)
    names = ["n", "k"] if args.family == "gamma" else ["n", "kappa", "p", "q"]
    return emit_table(records, args.format, excluded, names), EXIT_OK


def cmd_gg_constant(args):
    from .weyl import gover_graham_constant

    r = gover_graham_constant(args.n, args.k)
    if args.format == "csv":
        return emit_table([r], "csv"), EXIT_OK
    return {"constant": r.constant, "exponent": r.exponent, "volume_convention": r.volume_convention,
            "provenance": list(r.provenance), "params": r.params, "alternatives": r.alternatives}, EXIT_OK


def cmd_nilcheck(args):
    from .nilmanifold import nilcheck

    if len(args.window) != 2:
        raise PreconditionError("--window needs two values lo,hi", {"window": args.window})
    report = nilcheck(args.sizes, tuple(args.window), args.seed, threads_from_env(), args.tolerance)
    if args.ledger:
        conventions.record_adjudication(report, args.ledger)
    return report.as_dict(), EXIT_OK


def cmd_conventions(args):
    return conventions.full_ledger(), EXIT_OK


COMMANDS = {
    "conditions": cmd_conditions,
    "mehler": cmd_mehler,
    "nu": cmd_nu,
    "weyl-table": cmd_weyl_table,
    "gg-constant": cmd_gg_constant,
    "nilcheck": cmd_nilcheck,
    "conventions": cmd_conventions,
}


def _flatten_csv(payload: dict) -> bytes:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
    w.writerow(list(flat) + ["ledger_hash"])
    w.writerow([_cell(v) for v in flat.values()] + [conventions.ledger_hash()])
    return buf.getvalue().encode("utf-8")


def _write(data: bytes, output):
    if output:
        Path(output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def run_command(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    fmt, output = "json", None
    try:
        args = parse(argv)
        fmt, output = args.format, args.output
        threads_from_env()
        payload, code = COMMANDS[args.command](args)
        if isinstance(payload, bytes):
            data = payload
        elif fmt == "csv":
            data = _flatten_csv(payload)
        else:
            data = emit_json(payload)
        _write(data, output)
        return code
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except PreconditionError as exc:
        reason, code, exc_msg, witness = "precondition", EXIT_PRECONDITION, str(exc), exc.witness
    except HeisenspecError as exc:
        reason, code, exc_msg, witness = "numerical", EXIT_INTERNAL, str(exc), {}
    except Exception as exc:  # noqa: BLE001 - report every failure with a reason
        reason, code, exc_msg, witness = "internal", EXIT_INTERNAL, f"{type(exc).__name__}: {exc}", {}
    print(f"heisenspec: {exc_msg}", file=sys.stderr)
    if fmt == "json":
        _write(emit_json({"error": {"reason": reason, "message": exc_msg, "witness": witness}}), output)
    return code


def main():
    sys.exit(run_command())
