"""Command-line interface.

Subcommands:
  radii      radius/bound report from (u) or (beta, B, C) or a potential
  mayer      fugacity-series coefficient table with bound column
  virial     density-series coefficients by all available routes
  polymer    xi / ursell / fpcheck / pexact / ckn actions on [N]
  canonical  series-vs-direct free-energy comparison report
  verify     run named invariant suites, one PASS/FAIL line each

Exit status: 0 success, 1 verification failure, 2 invalid input.  A JSON
config file can predefine any flag per subcommand plus a shared "potential"
section; command-line flags override config values, and unknown keys are
rejected by name.  Flag defaults are applied only after the config merge,
so a config value always beats a built-in default.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from contextlib import redirect_stdout
from fractions import Fraction
from typing import Dict, List, Optional

from . import __version__, tonks
from .canonical import compare_series_direct
from .cluster import (
    VIRIAL_QUADRATURE_MAX_K,
    mayer_bn,
    penrose_bn_bound,
    virial_bk_direct,
)
from .errors import ClusterKitError, ConfigError
from .polymer import ActivityProfile, ck_finite_N, fp_check, log_xi_ursell, p_exact, p_limit, xi_exact
from .potentials import PairPotential, c_beta, potential_from_config
from .radii import radius_report
from .reporting import dump_csv, dump_json, json_payload, output_dir, rational_fields, render_table
from .series import invert_mayer_oracle, virial_from_mayer
from .verify import SUITES, run_checks


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_potential_args(sp: argparse.ArgumentParser):
    sp.add_argument("--potential", choices=("hard_rod", "hard_sphere", "square_well"),
                    help="potential kind")
    sp.add_argument("--sigma", type=float, help="core diameter")
    sp.add_argument("--epsilon", type=float, help="well depth (square_well)")
    sp.add_argument("--lambda-w", dest="lambda_w", type=float,
                    help="well width ratio (square_well)")
    sp.add_argument("--B", type=float, help="declared stability constant")
    sp.add_argument("--dimension", type=int, help="spatial dimension")


def _add_output_args(sp: argparse.ArgumentParser):
    sp.add_argument("--out", help="output file (default: stdout)")
    sp.add_argument("--format", choices=("json", "csv", "table"), help="output format")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clusterkit",
                                 description="cluster-expansion toolkit")
    ap.add_argument("--version", action="version", version=f"clusterkit {__version__}")
    ap.add_argument("--config", help="JSON config file with per-subcommand defaults")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("radii", help="radius and bound report")
    sp.add_argument("--u", type=float, help="combined variable e^(2 beta B)")
    sp.add_argument("--beta", type=float, help="inverse temperature")
    sp.add_argument("--cbeta", type=float, help="interaction volume C(beta)")
    sp.add_argument("--k-max", dest="k_max", type=int)
    _add_potential_args(sp)
    _add_output_args(sp)

    sp = sub.add_parser("mayer", help="fugacity-series coefficient table")
    _add_potential_args(sp)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--n", type=int, help="highest order")
    sp.add_argument("--volume", help="'inf' or a box side")
    sp.add_argument("--method", choices=("quadrature", "monte_carlo"))
    sp.add_argument("--samples", type=int)
    sp.add_argument("--chunk", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int,
                    help="worker hint; results are worker-count independent")
    _add_output_args(sp)

    sp = sub.add_parser("virial", help="density-series coefficients, all routes")
    _add_potential_args(sp)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--k-max", dest="k_max", type=int)
    sp.add_argument("--method", choices=("quadrature", "monte_carlo"))
    sp.add_argument("--samples", type=int)
    sp.add_argument("--chunk", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int,
                    help="worker hint; results are worker-count independent")
    _add_output_args(sp)

    sp = sub.add_parser("polymer", help="subset-polymer operations")
    sp.add_argument("action", choices=("xi", "ursell", "fpcheck", "pexact", "ckn"))
    sp.add_argument("--n-ground", dest="n_ground", type=int,
                    help="ground-set size N")
    sp.add_argument("--zeta", help="activities like '2=0.5,3=-1/3'")
    sp.add_argument("--orders", type=int, help="expansion order (ursell)")
    sp.add_argument("--a", type=float, help="weight parameter (fpcheck)")
    sp.add_argument("--rho", type=float, help="density for derived activities")
    sp.add_argument("--beta", type=float)
    sp.add_argument("--s", help="part sizes like '2,3' (pexact)")
    sp.add_argument("--k", type=int, help="coefficient order (ckn)")
    _add_potential_args(sp)
    _add_output_args(sp)

    sp = sub.add_parser("canonical", help="series-vs-direct comparison")
    _add_potential_args(sp)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--L", type=float)
    sp.add_argument("--N", type=int)
    sp.add_argument("--k-max", dest="k_max", type=int)
    sp.add_argument("--method",
                    choices=("auto", "tonks_closed", "quadrature", "monte_carlo"))
    sp.add_argument("--samples", type=int)
    sp.add_argument("--chunk", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int,
                    help="worker hint; results are worker-count independent")
    _add_output_args(sp)

    sp = sub.add_parser("verify", help="run invariant suites")
    sp.add_argument("--suite", choices=SUITES)
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--profiles", type=int)
    sp.add_argument("--random-graphs", dest="random_graphs", type=int)
    sp.add_argument("--out", help="also write results as JSON")
    return ap


# config sections accepted per subcommand: dest names of their flags
_CONFIG_SECTIONS: Dict[str, set] = {
    "potential": {"kind", "sigma", "epsilon", "lambda_w", "B", "dimension", "table", "cutoff"},
    "radii": {"u", "beta", "cbeta", "k_max", "out", "format"},
    "mayer": {"beta", "n", "volume", "method", "samples", "chunk", "seed", "workers", "out", "format"},
    "virial": {"beta", "k_max", "method", "samples", "chunk", "seed", "workers", "out", "format"},
    "polymer": {"n_ground", "zeta", "orders", "a", "rho", "beta", "s", "k", "out", "format"},
    "canonical": {"beta", "L", "N", "k_max", "method", "samples", "chunk", "seed", "workers", "out", "format"},
    "verify": {"suite", "nmax", "seed", "profiles", "random_graphs", "out"},
}

_DEFAULTS: Dict[str, Dict[str, object]] = {
    "radii": {"k_max": 8, "format": "json"},
    "mayer": {"beta": 1.0, "n": 4, "volume": "inf", "method": "quadrature",
              "samples": 400_000, "chunk": 20_000,
              "workers": os.cpu_count() or 1, "format": "json"},
    "virial": {"beta": 1.0, "k_max": 3, "method": "quadrature",
               "samples": 400_000, "chunk": 20_000,
               "workers": os.cpu_count() or 1, "format": "json"},
    "polymer": {"orders": 3, "beta": 1.0, "k": 1, "format": "json"},
    "canonical": {"beta": 1.0, "k_max": 6, "method": "auto",
                  "samples": 400_000, "chunk": 20_000,
                  "workers": os.cpu_count() or 1, "format": "json"},
    "verify": {"suite": "all", "nmax": 6, "seed": 20260808, "profiles": 100,
               "random_graphs": 100},
}


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = sorted(set(cfg) - set(_CONFIG_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown config section(s): {', '.join(unknown)}")
    for section, body in cfg.items():
        if not isinstance(body, dict):
            raise ConfigError(f"config section {section!r} must be an object")
        bad = sorted(set(body) - _CONFIG_SECTIONS[section])
        if bad:
            raise ConfigError(
                f"unknown key(s) in config section {section!r}: {', '.join(bad)}"
            )
    return cfg


def _apply_config(args: argparse.Namespace, cfg: dict):
    """Config fills unset flags; built-in defaults fill whatever remains."""
    for key, value in cfg.get(args.command, {}).items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    for key, value in _DEFAULTS.get(args.command, {}).items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    pot = cfg.get("potential")
    args._config_potential = pot if getattr(args, "potential", None) is None else None


def _potential_from_args(args) -> Optional[PairPotential]:
    cfgpot = getattr(args, "_config_potential", None)
    if getattr(args, "potential", None) is None and cfgpot:
        return potential_from_config(cfgpot)
    if getattr(args, "potential", None) is None:
        return None
    cfg = {"kind": args.potential, "sigma": args.sigma if args.sigma is not None else 1.0}
    if args.dimension is not None:
        cfg["dimension"] = args.dimension
    elif args.potential == "hard_sphere":
        cfg["dimension"] = 3
    if args.epsilon is not None:
        cfg["epsilon"] = args.epsilon
    if args.lambda_w is not None:
        cfg["lambda_w"] = args.lambda_w
    if args.B is not None:
        cfg["B"] = args.B
    return potential_from_config(cfg)


def _emit(args, payload: dict, rows=None, header=None) -> str:
    if args.format == "json" or rows is None:
        text = dump_json(payload, path=_out_path(args))
    elif args.format == "csv":
        text = dump_csv(header, rows, path=_out_path(args))
    else:
        text = render_table(header, rows) + "\n"
        if _out_path(args):
            with open(_out_path(args), "w", encoding="utf-8") as fh:
                fh.write(text)
    if not _out_path(args):
        sys.stdout.write(text)
    return text


def _out_path(args) -> Optional[str]:
    out = getattr(args, "out", None)
    if not out:
        return None
    if os.path.isabs(out):
        return out
    return os.path.join(output_dir(), out)


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_radii(args) -> int:
    pot = _potential_from_args(args)
    if args.u is not None:
        if args.u < 1.0:
            raise ConfigError("--u must be >= 1")
        beta, B = 1.0, math.log(args.u) / 2.0
        cb = args.cbeta if args.cbeta is not None else 1.0
    elif args.cbeta is not None:
        beta = args.beta if args.beta is not None else 1.0
        B = args.B if args.B is not None else 0.0
        cb = args.cbeta
    elif pot is not None:
        beta = args.beta if args.beta is not None else 1.0
        B = pot.B
        cb, _ = c_beta(pot, beta)
    else:
        raise ConfigError("radii needs --u, or --cbeta, or a potential")
    report = radius_report(beta, B, cb, k_orders=tuple(range(1, args.k_max + 1)))
    if args.format == "table":
        rows = [[b.k, b.ours, b.lp] for b in report.bounds]
        text = (
            f"u = {report.u:.10g}\n"
            f"F(u) = {report.F:.10g}   maximizer a* = {report.a_star:.10g}\n"
            f"g(u) = {report.g:.10g}   maximizer w* = {report.w_star:.10g}\n"
            f"K* = {report.k_star_closed:.10g} (series check {report.k_star_series:.10g})\n"
            f"density radius = {report.rho_star:.10g}\n"
            f"fugacity radius = {report.mayer_radius:.10g}\n"
            f"base constant (computed a*) = {report.base_constant:.10g}\n"
            f"base constant (reference a = {report.a_reference}) = "
            f"{report.base_constant_reference:.10g}"
            + ("  [discrepancy flagged]\n" if report.a_discrepancy_flagged else "\n")
            + render_table(["k", "bound_ours", "bound_lp"], rows)
            + "\n"
        )
        if _out_path(args):
            with open(_out_path(args), "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    _emit(args, json_payload("radius_report", report.to_dict()))
    return 0


def _describe_potential(pot: PairPotential) -> dict:
    d = {"kind": pot.kind, "sigma": pot.sigma, "dimension": pot.dimension, "B": pot.B}
    if pot.kind == "square_well":
        d["epsilon"] = pot.epsilon
        d["lambda_w"] = pot.lambda_w
    return d


def _require_potential(args) -> PairPotential:
    pot = _potential_from_args(args)
    if pot is None:
        raise ConfigError("this subcommand needs a potential (--potential ...)")
    return pot


def _parse_volume(raw) -> Optional[float]:
    if raw in (None, "inf", "infinite", ""):
        return None
    v = float(raw)
    if v <= 0:
        raise ConfigError("box side must be positive")
    return v


def _cmd_mayer(args) -> int:
    pot = _require_potential(args)
    if args.method == "monte_carlo" and args.seed is None:
        raise ConfigError("--seed is mandatory for monte_carlo")
    volume = _parse_volume(args.volume)
    cb, _ = c_beta(pot, args.beta)
    rows = []
    records = []
    for n in range(1, args.n + 1):
        if n == 1:
            val, err = 1.0, 0.0
        else:
            val, err = mayer_bn(pot, args.beta, n, volume, args.method,
                                seed=args.seed, samples=args.samples,
                                chunk=args.chunk, workers=args.workers)
        bound = penrose_bn_bound(n, args.beta, pot.B, cb) if n >= 2 else 1.0
        rows.append([f"b_{n}", n, args.beta, val, err, bound])
        records.append({
            "quantity": "b_n", "n": n, "beta": args.beta,
            "potential": _describe_potential(pot),
            "volume": volume, "value": val, "error": err,
            "penrose_bound": bound,
            "method": args.method, "seed": args.seed,
        })
    payload = json_payload("mayer_table", {"records": records, "cbeta": cb})
    _emit(args, payload, rows=rows,
          header=["quantity", "n", "beta", "value", "error", "penrose_bound"])
    return 0


def _cmd_virial(args) -> int:
    pot = _require_potential(args)
    if args.method == "monte_carlo" and args.seed is None:
        raise ConfigError("--seed is mandatory for monte_carlo")
    k_max = args.k_max
    b = {1: 1.0}
    for n in range(2, k_max + 2):
        b[n], _ = mayer_bn(pot, args.beta, n, method=args.method, seed=args.seed,
                           samples=args.samples, chunk=args.chunk,
                           workers=args.workers)
    inv = invert_mayer_oracle(b, k_max)
    rows = []
    records = []
    for k in range(1, k_max + 1):
        transform = float(virial_from_mayer(b, k))
        inversion = float(inv.coeff(k))
        if k == 1 or (args.method == "quadrature" and k <= VIRIAL_QUADRATURE_MAX_K
                      and pot.dimension == 1):
            direct, derr = virial_bk_direct(pot, args.beta, k)
        else:
            direct, derr = None, None
        closed = tonks.beta_k_value(k, pot.sigma) if pot.kind == "hard_rod" else None
        rows.append([k, transform, "mayer_transform", 0.0])
        rows.append([k, inversion, "inversion_oracle", 0.0])
        if direct is not None:
            rows.append([k, direct, "direct_integral", derr])
        if closed is not None:
            rows.append([k, closed, "closed_form", 0.0])
        records.append({
            "quantity": "beta_k", "k": k, "beta": args.beta,
            "potential": _describe_potential(pot),
            "transform": transform, "inversion": inversion,
            "direct": direct, "direct_error": derr,
            "closed_form": closed,
            "method": args.method, "seed": args.seed,
        })
    payload = json_payload("virial_table", {"records": records})
    _emit(args, payload, rows=rows, header=["k", "C_k", "source", "error"])
    return 0


def _parse_zeta(raw: Optional[str]) -> Dict[int, object]:
    if not raw:
        raise ConfigError("this action needs --zeta (like '2=0.5,3=-1/3')")
    out: Dict[int, object] = {}
    for item in raw.split(","):
        if "=" not in item:
            raise ConfigError(f"bad --zeta entry {item!r}")
        key, val = item.split("=", 1)
        out[int(key)] = Fraction(val) if "/" in val else float(val)
    return out


def _polymer_profile(args) -> ActivityProfile:
    N = args.n_ground
    if args.zeta:
        return ActivityProfile(N, _parse_zeta(args.zeta))
    pot = _potential_from_args(args)
    if pot is not None and args.rho is not None:
        if pot.kind != "hard_rod":
            raise ConfigError("derived activities are implemented for hard rods")
        b = {s: tonks.bn_value(s, pot.sigma) for s in range(2, N + 1)}
        return ActivityProfile.from_mayer(b, N, args.rho)
    raise ConfigError("polymer needs --zeta or a potential with --rho")


def _num_field(v) -> object:
    return rational_fields(v) if isinstance(v, Fraction) else v


def _cmd_polymer(args) -> int:
    if args.n_ground is None:
        raise ConfigError("polymer needs --n-ground")
    N = args.n_ground
    if args.action == "xi":
        prof = _polymer_profile(args)
        data = {"N": N,
                "zeta": {str(m): _num_field(v) for m, v in sorted(prof.zeta.items())},
                "xi": _num_field(xi_exact(N, prof, "recursion"))}
        if N <= 8:
            data["xi_bruteforce"] = _num_field(xi_exact(N, prof, "bruteforce"))
        _emit(args, json_payload("polymer_xi", data))
        return 0
    if args.action == "ursell":
        prof = _polymer_profile(args)
        terms = log_xi_ursell(N, prof, args.orders)
        partial = {}
        acc = 0.0
        for n in sorted(terms):
            acc += float(terms[n])
            partial[str(n)] = acc
        _emit(args, json_payload("polymer_ursell", {
            "N": N,
            "orders": {str(n): _num_field(v) for n, v in terms.items()},
            "partial_sums": partial,
        }))
        return 0
    if args.action == "fpcheck":
        prof = _polymer_profile(args)
        if args.a is None:
            raise ConfigError("fpcheck needs --a")
        res = fp_check(prof, args.a)
        _emit(args, json_payload("polymer_fpcheck", {
            "N": N, "a": args.a, "lhs": res.lhs, "rhs": res.rhs, "holds": res.holds,
        }))
        return 0
    if args.action == "pexact":
        if not args.s:
            raise ConfigError("pexact needs --s like '2,3'")
        s = tuple(int(x) for x in args.s.split(","))
        _emit(args, json_payload("polymer_pexact", {
            "N": N, "s": list(s),
            "value": rational_fields(p_exact(N, s)),
            "limit": rational_fields(p_limit(s)),
        }))
        return 0
    if args.action == "ckn":
        pot = _potential_from_args(args)
        if pot is None or pot.kind != "hard_rod":
            raise ConfigError(
                "ckn is wired to the hard-rod coefficients; pass --potential hard_rod"
            )
        b = {n: tonks.bn_exact(n) for n in range(2, args.k + 2)}
        _emit(args, json_payload("polymer_ckn", {
            "N": N, "k": args.k,
            "value": _num_field(ck_finite_N(N, b, args.k)),
            "limit": float(virial_from_mayer(b, args.k)),
        }))
        return 0
    raise ConfigError(f"unknown polymer action {args.action!r}")


def _cmd_canonical(args) -> int:
    pot = _require_potential(args)
    if args.L is None or args.N is None:
        raise ConfigError("canonical needs --L and --N")
    if args.method == "monte_carlo" and args.seed is None:
        raise ConfigError("--seed is mandatory for monte_carlo")
    rep = compare_series_direct(
        pot, args.beta, args.L, args.N, args.k_max,
        direct_method=args.method, seed=args.seed,
        samples=args.samples, chunk=args.chunk, workers=args.workers,
    )
    _emit(args, json_payload("canonical_comparison", rep.to_dict()))
    return 0


def _cmd_verify(args) -> int:
    results = run_checks(
        suite=args.suite, nmax=args.nmax, seed=args.seed,
        profiles=args.profiles, random_graphs=args.random_graphs,
    )
    ok = all(r.passed for r in results)
    if args.out:
        payload = json_payload("verify_report", {
            "suite": args.suite,
            "checks": [
                {"name": r.name, "suite": r.suite, "passed": r.passed, "detail": r.detail}
                for r in results
            ],
            "passed": ok,
        })
        dump_json(payload, path=args.out)
    print(f"{'PASS' if ok else 'FAIL'}: {sum(r.passed for r in results)}/{len(results)} checks")
    return 0 if ok else 1


_COMMANDS = {
    "radii": _cmd_radii,
    "mayer": _cmd_mayer,
    "virial": _cmd_virial,
    "polymer": _cmd_polymer,
    "canonical": _cmd_canonical,
    "verify": _cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        _apply_config(args, cfg)
        return _COMMANDS[args.command](args)
    except ClusterKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run_for_test(argv: List[str]) -> str:
    """Run the CLI capturing stdout; raises on nonzero exit (test helper)."""
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    if code != 0:
        raise ClusterKitError(f"CLI exited with {code}: {buf.getvalue()}")
    return buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
