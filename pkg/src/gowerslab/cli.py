"""Command-line workbench.

Every command prints one JSON document (``"schema": 1``), CSV rows, or
whitespace-separated plot columns under a ``#`` header. Errors go to stderr as
JSON with a category, and the exit code encodes that category.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels
from . import ap_forms, gowers, primes, singular_series, structure
from .config import OUTPUT_FORMATS, RunConfig, load_config
from .errors import GowersLabError, InputError
from .zmod import CyclicFn, dft, lp_norm, polynomial_phase, spectral_norm

SCHEMA = 1


# ---------------------------------------------------------------- sources


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"cannot parse integers from {text!r}") from None


def parse_function(spec: str, cfg: RunConfig) -> CyclicFn:
    """Function sources.

    ``const:N:c``, ``interval:N:a:b`` (indicator of a..b), ``random:N[:kind]`` with
    kind in {unit, disk, bool}, ``poly:N:c0,c1,...`` (e_N of the polynomial),
    ``mangoldt:N`` (Lambda on 0..N-1), ``wtrick:N:w:b`` (Lambda on the class
    b mod W, rescaled) or ``file:PATH`` (.json or binary).
    """
    kind, _, rest = spec.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "file":
            path = Path(rest)
            data = path.read_bytes()
            if path.suffix == ".json":
                return CyclicFn.from_json(data.decode("utf-8"))
            return CyclicFn.from_bytes(data)
        n = int(parts[0])
        if kind == "const":
            return CyclicFn.constant(n, complex(parts[1]) if len(parts) > 1 else 1.0)
        if kind == "interval":
            a, b = int(parts[1]), int(parts[2])
            return CyclicFn.indicator(n, range(a, b + 1))
        if kind == "random":
            rng = np.random.default_rng(cfg.seed)
            style = parts[1] if len(parts) > 1 else "unit"
            if style == "unit":
                return CyclicFn(n, rng.random(n))
            if style == "bool":
                return CyclicFn(n, (rng.random(n) < 0.5).astype(float))
            if style == "disk":
                return CyclicFn(n, np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n)))
            raise InputError(f"unknown random kind {style!r}")
        if kind == "poly":
            return polynomial_phase(n, _ints(parts[1]))
        if kind == "mangoldt":
            t = primes.load_sieve(max(n, 2), cfg.cache_dir, cfg.budgets)
            return CyclicFn(n, t.mangoldt[:n])
        if kind == "wtrick":
            w, b = int(parts[1]), int(parts[2])
            W, phi, _ = primes.w_trick(w, cfg.budgets)
            t = primes.load_sieve(max(n, 2), cfg.cache_dir, cfg.budgets)
            return primes.restrict_to_class(t.mangoldt, W, b, phi)
    except (IndexError, ValueError, OSError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad function source {spec!r}: {exc}") from exc
    raise InputError(f"unknown function source {spec!r}")


def parse_set(spec: str, cfg: RunConfig) -> list[int]:
    """Set sources: ``range:a:b[:step]``, ``list:1,2,3``, ``random:N:density``, ``primes:N``, ``file:PATH``."""
    kind, _, rest = spec.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "range":
            a, b = int(parts[0]), int(parts[1])
            step = int(parts[2]) if len(parts) > 2 else 1
            return list(range(a, b + 1, step))
        if kind == "list":
            return _ints(rest)
        if kind == "random":
            n, dens = int(parts[0]), float(parts[1])
            rng = np.random.default_rng(cfg.seed)
            return (np.flatnonzero(rng.random(n) < dens) + 1).tolist()
        if kind == "primes":
            n = int(parts[0])
            return primes.load_sieve(max(n, 2), cfg.cache_dir, cfg.budgets).primes(n).tolist()
        if kind == "file":
            return _ints(Path(rest).read_text(encoding="utf-8"))
    except (IndexError, ValueError, OSError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad set source {spec!r}: {exc}") from exc
    raise InputError(f"unknown set source {spec!r}")


# ---------------------------------------------------------------- commands


def _cnum(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def cmd_norm(args, cfg):
    f = parse_function(args.source, cfg)
    res = {
        "N": f.modulus,
        "d": args.d,
        "u_norm": gowers.u_norm(f, args.d, cfg.budgets),
        "l2": lp_norm(f, 2),
        "linf": lp_norm(f, np.inf),
        "fourier_l4": spectral_norm(dft(f), 4),
        "fourier_linf": spectral_norm(dft(f), np.inf),
    }
    return res, None


def cmd_form(args, cfg):
    fs = [parse_function(s, cfg) for s in args.source]
    if len(fs) == 1:
        fs = fs * args.k
    elif args.k is not None and args.k != len(fs):
        raise InputError("--k disagrees with the number of sources")
    val = ap_forms.lambda_k(fs, budgets=cfg.budgets)
    return {"N": fs[0].modulus, "k": len(fs), "value": _cnum(val)}, None


def cmd_decompose(args, cfg):
    f = parse_function(args.source, cfg)
    d = structure.kvn_decompose(f, args.delta, args.tau, args.atom_budget)
    res = {"N": f.modulus, "delta": args.delta, "tau": args.tau, **d.to_dict()}
    return res, [s.to_dict() for s in d.iterations]


def cmd_roth(args, cfg):
    A = parse_set(args.set, cfg)
    N = args.N if args.N is not None else (max(A) if A else 0)
    r = structure.roth_density_increment_search(A, N, args.delta)
    res = {"N": N, "size": len(A), **r.to_dict()}
    return res, [s.to_dict() for s in r.trace]


CONSTANTS = ("B2", "C3", "C4", "C5", "C6", "Ck", "G2", "G3")


def cmd_constants(args, cfg):
    name, P = args.name, args.P
    if name == "B2":
        r = singular_series.constant_B2(P)
    elif name.startswith("C"):
        k = args.k if name == "Ck" else int(name[1:])
        if k is None:
            raise InputError("Ck needs --k")
        r = singular_series.constant_C_k(k, P)
    elif name in ("G2", "G3"):
        if args.N is None:
            raise InputError(f"{name} needs --N")
        fn = singular_series.constant_G2 if name == "G2" else singular_series.constant_G3
        r = fn(args.N, P, cfg.budgets)
    else:
        raise InputError(f"unknown constant {name!r}")
    return r.to_dict(), None


def cmd_expsum(args, cfg):
    N = args.N
    t = primes.load_sieve(max(N, 2), cfg.cache_dir, cfg.budgets)
    psi = t.psi(N - 1)
    xis = range(N) if args.sweep else [args.xi]
    if not args.sweep and args.xi is None:
        raise InputError("give --xi or --sweep")
    rows = []
    for xi in xis:
        s = primes.exp_sum_mangoldt(N, xi, t)
        arc = primes.classify_arc(N, xi, args.Q)
        rows.append({"xi": xi, "re": s.real, "im": s.imag, "abs_over_psi": abs(s) / psi, "arc": arc["arc"], "q": arc["q"]})
    res = {"N": N, "psi": psi, "sums": rows}
    return res, rows


def cmd_count_aps(args, cfg):
    A = parse_set(args.set, cfg)
    rep = ap_forms.count_aps(A, args.k, args.N)
    return rep.to_dict(), None


def vdc_verify(N: int, k: int = 3, cyclic: bool = False, P: int = 10**5, cfg: RunConfig | None = None) -> dict:
    """E(prod_j Lambda(n + j r) | 1 <= n, r <= N) against the constant C_k.

    The integer-range average sieves to k N, the largest argument that occurs.
    With ``cyclic`` the same average is taken over Z/NZ with Lambda on 0..N-1.
    """
    cfg = cfg or RunConfig()
    if N < 2 or k < 3:
        raise InputError("need N >= 2 and k >= 3")
    ref = singular_series.constant_C_k(k, P).value
    if cyclic:
        from .budgets import check

        check("cyclic_vdc_max_n", N, cfg.budgets)
        t = primes.load_sieve(max(N, 2), cfg.cache_dir, cfg.budgets)
        f = CyclicFn(N, t.mangoldt[:N])
        observed = ap_forms.lambda_k([f] * k, budgets={**cfg.budgets, "lambda_pairs": N * N}).real
    else:
        t = primes.load_sieve(k * N, cfg.cache_dir, cfg.budgets)
        support = np.flatnonzero(t.mangoldt)
        observed = kernels.progression_sum(t.mangoldt, support, N, k)
    return {"N": N, "k": k, "observed": observed, "reference": ref, "ratio": observed / ref, "cyclic": cyclic}


def cmd_vdc_verify(args, cfg):
    Ns = args.sweep or [args.N]
    rows = []
    for N in Ns:
        t0 = time.perf_counter()
        row = vdc_verify(N, args.k, args.cyclic, args.P, cfg)
        row["runtime_ms"] = round(1000 * (time.perf_counter() - t0), 3)
        rows.append(row)
    # wall times stay out of the JSON document so it is reproducible byte for byte
    res = {"rows": [{k: v for k, v in r.items() if k != "runtime_ms"} for r in rows]}
    table = [{c: r[c] for c in ("N", "observed", "reference", "ratio", "runtime_ms")} for r in rows]
    return res, table


# ---------------------------------------------------------------- output


def _emit_table(rows, fmt: str) -> str:
    if not rows:
        return ""
    cols = list(rows[0].keys())
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    lines = ["# " + " ".join(cols)]
    for r in rows:
        lines.append(" ".join("nan" if r[c] is None else str(r[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _flat(res: dict) -> list[dict]:
    row = {}
    for k, v in res.items():
        if isinstance(v, dict) and set(v) == {"re", "im"}:
            row[f"{k}_re"], row[f"{k}_im"] = v["re"], v["im"]
        elif not isinstance(v, (list, dict)):
            row[k] = v
    return [row]


def build_parser() -> argparse.ArgumentParser:
    def common(parser, default):
        parser.add_argument("--config", default=default, help="INI file with [run], [budgets], [tolerances]")
        parser.add_argument("--seed", type=int, default=default)
        parser.add_argument("--output", choices=OUTPUT_FORMATS, default=default)
        parser.add_argument("--cache-dir", default=default)

    p = argparse.ArgumentParser(prog="gowerslab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common(p, None)
    # the same flags are accepted after the subcommand
    shared = argparse.ArgumentParser(add_help=False)
    common(shared, argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norm", parents=[shared], help="U^d and L^p norms of a function")
    s.add_argument("source")
    s.add_argument("--d", type=int, default=2)
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("form", parents=[shared], help="the progression form Lambda_k")
    s.add_argument("source", nargs="+")
    s.add_argument("--k", type=int, default=3)
    s.set_defaults(func=cmd_form)

    s = sub.add_parser("decompose", parents=[shared], help="energy-increment decomposition f = g + b")
    s.add_argument("source")
    s.add_argument("--delta", type=float, default=0.0)
    s.add_argument("--tau", type=float, default=0.05)
    s.add_argument("--atom-budget", type=int)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("roth", parents=[shared], help="density-increment search for a 3-AP")
    s.add_argument("set")
    s.add_argument("--N", type=int)
    s.add_argument("--delta", type=float, default=0.0, help="density floor")
    s.set_defaults(func=cmd_roth)

    s = sub.add_parser("constants", parents=[shared], help="singular-series constants")
    s.add_argument("name", choices=CONSTANTS)
    s.add_argument("--P", type=int, default=10**6, help="truncation prime")
    s.add_argument("--k", type=int)
    s.add_argument("--N", type=int)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("expsum", parents=[shared], help="exponential sums of the von Mangoldt function")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--xi", type=int)
    s.add_argument("--sweep", action="store_true", help="all xi in Z/NZ")
    s.add_argument("--Q", type=int, default=20, help="major-arc denominator cutoff")
    s.set_defaults(func=cmd_expsum)

    s = sub.add_parser("count-aps", parents=[shared], help="exact k-AP count in an integer set")
    s.add_argument("set")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--N", type=int)
    s.set_defaults(func=cmd_count_aps)

    s = sub.add_parser("vdc-verify", parents=[shared], help="prime k-AP average against C_k")
    s.add_argument("--N", type=int, default=10**5)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--sweep", type=int, nargs="+")
    s.add_argument("--cyclic", action="store_true")
    s.add_argument("--P", type=int, default=10**5, help="truncation prime for C_k")
    s.set_defaults(func=cmd_vdc_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config).with_overrides(seed=args.seed, output=args.output, cache_dir=args.cache_dir)
        res, table = args.func(args, cfg)
        if cfg.output == "json":
            doc = {
                "schema": SCHEMA,
                "command": args.command,
                "provenance": {**cfg.provenance(), "backend": kernels.BACKEND, "version": __version__},
                "result": res,
            }
            sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")
        else:
            sys.stdout.write(_emit_table(table if table is not None else _flat(res), cfg.output))
    except GowersLabError as exc:
        err = {"schema": SCHEMA, "error": {"category": exc.category, "message": str(exc)}}
        sys.stderr.write(json.dumps(err) + "\n")
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
