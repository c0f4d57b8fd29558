"""Command-line driver: ``psgap <subcommand> [flags]``.

Exit codes: 0 success, 1 invariant violation, 2 invalid input,
3 precision could not be resolved within the bit budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import __version__
from .config import ConfigError, SieveConfig, derive_config, load_config_file, parse_exponent
from .powerfloor import PrecisionUnresolved

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3

COMMANDS = (
    "ps",
    "density",
    "gaps",
    "cluster",
    "witness",
    "mk",
    "sieve-check",
    "smooth",
    "expsum",
    "hb-check",
    "vdc",
    "verify-identities",
)


class InvariantViolation(AssertionError):
    pass


# -- output ----------------------------------------------------------------------------------


def fmt_float(x: float) -> str:
    return format(x, ".17g")


def dump_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits (NaN/inf as null)."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return fmt_float(x) if math.isfinite(x) else "null"
    if isinstance(obj, complex):
        return dump_json([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dump_json(v, indent, _level + 1)}" for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + dump_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return json.dumps(str(obj))


def dict_csv(d: dict) -> str:
    """Flatten scalar entries of a result dict into key,value rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])

    def walk(prefix, v):
        if isinstance(v, dict):
            for k in sorted(v, key=str):
                walk(f"{prefix}.{k}" if prefix else str(k), v[k])
        elif isinstance(v, (list, tuple)):
            for i, x in enumerate(v):
                walk(f"{prefix}[{i}]", x)
        elif isinstance(v, (float, np.floating)):
            w.writerow([prefix, fmt_float(float(v))])
        else:
            w.writerow([prefix, "" if v is None else v])

    walk("", d)
    return buf.getvalue()


@dataclass
class Outcome:
    data: dict
    csv: str | None = None
    violation: str | None = None


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    config: dict
    versions: dict
    wall_time: float = 0.0
    outputs: list[str] = field(default_factory=list)
    exit_code: int = 0

    def to_json(self) -> str:
        return dump_json(self.__dict__)


def versions() -> dict:
    import scipy
    import sympy

    return {
        "psgap": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "sympy": sympy.__version__,
    }


# -- arguments ------------------------------------------------------------------------------


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        lo, hi = int(float(lo)), int(float(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if hi < lo:
        raise argparse.ArgumentTypeError("range must have LO <= HI")
    return lo, hi


def _int(text: str) -> int:
    """Integers, also in 1e6 form."""
    try:
        v = float(text) if any(ch in text for ch in "eE.") else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if isinstance(v, float):
        if not v.is_integer():
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        v = int(v)
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--c", default=None, help="exponent as p/q")
    common.add_argument("--k0", type=_int, default=None)
    common.add_argument("--m", type=_int, default=None)
    common.add_argument("--X", type=_int, default=None)
    common.add_argument("--w0", type=_int, default=None)
    common.add_argument("--range", type=_range, default=None, metavar="LO:HI")
    common.add_argument("--degree", type=_int, default=None)
    common.add_argument("--out", default=None, help="output file (manifest goes to OUT.manifest.json)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--threads", type=_int, default=None)
    common.add_argument("--scale", type=float, default=None)
    common.add_argument("--max-precision-bits", type=_int, default=None, dest="max_precision_bits")
    common.add_argument("--config", default=None, help="key=value file (default: $PSGAP_CONFIG)")

    p = argparse.ArgumentParser(prog="psgap", description="Piatetski-Shapiro prime cluster toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("ps", parents=[common], help="list [n^c] up to --max or within --range")
    s.add_argument("--max", type=_int, default=None)
    s.add_argument("--primes-only", action="store_true")

    s = sub.add_parser("density", parents=[common], help="PS prime count against x^gamma/log x")
    s.add_argument("--points", default=None, help="comma list of x values (default: --X)")

    s = sub.add_parser("gaps", parents=[common], help="normalised gaps of consecutive PS primes up to --X")
    s.add_argument("--tau", type=float, default=None)
    s.add_argument("--bins", type=_int, default=20)

    s = sub.add_parser("cluster", parents=[common], help="windows of k0+1 values holding many primes")
    s.add_argument("--min-primes", type=_int, default=None)

    s = sub.add_parser("witness", parents=[common], help="first window at scale X holding m+1 primes")
    s.add_argument("--n-max", type=_int, default=10**6)

    sub.add_parser("mk", parents=[common], help="variational ratio for k = k0+1")

    s = sub.add_parser("sieve-check", parents=[common], help="desk-scale weighted sieve sums")
    s.add_argument("--which", choices=("prop21", "prop31", "combined", "all"), default="all")
    s.add_argument("--h", type=_int, default=None)

    s = sub.add_parser("smooth", parents=[common], help="bump functions and their Fourier decay")
    s.add_argument("--bump", choices=("chi", "psi", "chi_star", "psi_star"), default="chi")
    s.add_argument("--jmax", type=_int, default=64)
    s.add_argument("--r-max", type=_int, default=None, dest="r_max")

    s = sub.add_parser("expsum", parents=[common], help="sum of Lambda(n) e(j n^gamma + C1 n + C2 n^-gamma)")
    s.add_argument("--j", type=float, default=1.0)
    s.add_argument("--C1", type=float, default=0.0)
    s.add_argument("--C2", type=float, default=0.0)
    s.add_argument("--weight", choices=("mangoldt", "varpi"), default="mangoldt")

    s = sub.add_parser("hb-check", parents=[common], help="Heath-Brown identity recovery of Lambda(n)")
    s.add_argument("--J", type=_int, default=2)

    s = sub.add_parser("vdc", parents=[common], help="second-derivative test on calibration and family phases")
    s.add_argument("--theta3", type=float, default=1.0)
    s.add_argument("--Y", type=_int, default=None)

    sub.add_parser("verify-identities", parents=[common], help="progression identity checks on [X, 2X]")
    return p


DEFAULTS = {"c": "11/10", "k0": 5, "m": 1, "X": 10**6, "degree": 3, "threads": 1}


def resolve(ns: argparse.Namespace, env: dict | None = None) -> dict:
    """Merge defaults < config file (--config or $PSGAP_CONFIG) < explicit flags."""
    env = os.environ if env is None else env
    opts = dict(DEFAULTS)
    path = ns.config or env.get("PSGAP_CONFIG")
    if path:
        opts.update(load_config_file(path))
    for k, v in vars(ns).items():
        if v is not None and k not in ("config", "command"):
            opts[k] = v
    return opts


def make_config(opts: dict, theorem: bool = False) -> SieveConfig:
    """Config from merged options; ``theorem`` demands 1 < c < 9/8 (sigma0 > 0)."""
    c = parse_exponent(str(opts["c"]))
    over = {k: opts[k] for k in ("w0", "scale", "max_precision_bits", "epsilon0", "b", "r_max") if opts.get(k) is not None}
    return derive_config(c, int(opts["k0"]), int(opts["m"]), int(opts["X"]), over, membership_only=not theorem)


# -- commands --------------------------------------------------------------------------------


def cmd_ps(o: dict) -> Outcome:
    from .psprimes import ps_values
    from .primes import prime_mask

    c = parse_exponent(str(o["c"]))
    if o.get("range"):
        lo, hi = o["range"]
    elif o.get("max") is not None:
        lo, hi = 1, o["max"]
    else:
        raise ConfigError("ps needs --max or --range")
    if lo < 1 or hi > 10**9:
        raise ConfigError("ps range must lie in [1, 10^9]")
    vals, ns = ps_values(lo, hi, c)
    isp = prime_mask(hi)[vals] if hi >= 2 else np.zeros(len(vals), dtype=bool)
    if o.get("primes_only"):
        vals, ns, isp = vals[isp], ns[isp], isp[isp]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "n", "is_prime"])
    for m, n, pr in zip(vals.tolist(), ns.tolist(), isp.tolist()):
        w.writerow([m, n, int(pr)])
    rows = [{"m": m, "n": n, "is_prime": bool(pr)} for m, n, pr in zip(vals.tolist(), ns.tolist(), isp.tolist())]
    return Outcome({"c": str(c), "lo": lo, "hi": hi, "count": len(rows), "elements": rows}, buf.getvalue())


def cmd_density(o: dict) -> Outcome:
    from .psprimes import density_csv, density_report

    c = parse_exponent(str(o["c"]))
    pts = [int(float(x)) for x in o["points"].split(",")] if o.get("points") else [int(o["X"])]
    rows = [density_report(x, c) for x in pts]
    data = {"c": str(c), "rows": [{"x": r.x, "count": r.count, "main_term": r.main_term, "ratio": r.ratio} for r in rows]}
    return Outcome(data, density_csv(rows))


def cmd_gaps(o: dict) -> Outcome:
    from .cluster import gap_stats

    st = gap_stats(str(o["c"]), int(o["X"]), o.get("tau"), bins=int(o.get("bins", 20)))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_lo", "count"])
    for e, k in st.histogram:
        w.writerow([fmt_float(e), k])
    bad = f"{st.rigorous_floor_violations} gaps below c - p^-(1-gamma)" if st.rigorous_floor_violations else None
    return Outcome(st.as_dict(), buf.getvalue(), bad)


def cmd_cluster(o: dict) -> Outcome:
    from .cluster import clusters_csv, scan_clusters

    c = parse_exponent(str(o["c"]))
    k0 = int(o["k0"])
    lo, hi = o.get("range") or (1, 10**5)
    mp = o.get("min_primes")
    mp = int(o["m"]) + 1 if mp is None else int(mp)
    recs = scan_clusters(c, k0, lo, hi, mp, threads=int(o["threads"]))
    return Outcome({"c": str(c), "k0": k0, "range": [lo, hi], "min_primes": mp, "count": len(recs), "records": [r.as_dict() for r in recs]}, clusters_csv(recs))


def cmd_witness(o: dict) -> Outcome:
    from .cluster import theorem_witness

    cfg = make_config(o)
    w = theorem_witness(cfg, int(o["m"]), n_max=int(o.get("n_max") or 10**6), threads=int(o["threads"]))
    data = json.loads(w.to_json())
    bad = None
    if w.shift_map_consistent is False:
        bad = "window values disagree with the shift map"
    elif w.certified_progression is False:
        bad = "certified window is not an arithmetic progression"
    return Outcome(data, None, bad)


def cmd_mk(o: dict) -> Outcome:
    from .variational import mk_report

    rep = mk_report(int(o["k0"]), int(o["degree"]))
    return Outcome(rep)


def cmd_sieve_check(o: dict) -> Outcome:
    from .maynard import combined_sum, prop21_sum, prop31_sum

    cfg = make_config(o, theorem=True)
    th = int(o["threads"])
    which = o.get("which", "all")
    out = {"config": cfg.as_dict()}
    if which in ("prop21", "all"):
        out["prop21"] = prop21_sum(cfg, h=o.get("h"), threads=th).as_dict()
    if which in ("prop31", "all"):
        out["prop31"] = prop31_sum(cfg, threads=th).as_dict()
    if which in ("combined", "all"):
        out["combined"] = combined_sum(cfg, threads=th).as_dict()
    return Outcome(out)


def cmd_smooth(o: dict) -> Outcome:
    from .smoothing import bump_fourier, coefficients_csv, decay_report, grid_for, paper_bumps

    cfg = make_config(o, theorem=True)
    bumps = paper_bumps(cfg, o.get("r_max"))
    data = {"r_used": bumps.r_used, "r_requested": bumps.r_requested, "bumps": {}}
    jmax = int(o.get("jmax") or 64)
    chosen = None
    for name, b in zip(("chi", "psi", "chi_star", "psi_star"), bumps.as_tuple()):
        J = max(jmax, 1024)
        b = bump_fourier(b, J, grid_for(b.spec, J))
        rep = decay_report(b)
        s = b.spec
        data["bumps"][name] = {
            "alpha": s.alpha,
            "beta": s.beta,
            "Delta": s.Delta,
            "r": s.r,
            "shift": s.shift,
            "plateau": list(b.plateau_interval()),
            "support": list(b.support_interval()),
            "a0": b.a0,
            "K": rep.K,
            "K_resolved": rep.K_resolved,
            "a0_error": rep.a0_error,
            "closed_form_error": rep.max_closed_form_error,
        }
        if name == o.get("bump", "chi"):
            chosen = b
    return Outcome(data, coefficients_csv(chosen, jmax))


def cmd_expsum(o: dict) -> Outcome:
    from .expsums import PhaseFamily, expsum_csv, lambda_exp_sum

    ph = PhaseFamily.for_exponent(str(o["c"]), j=o.get("j", 1.0), C1=o.get("C1", 0.0), C2=o.get("C2", 0.0))
    X = int(o["X"])
    r = lambda_exp_sum(X, ph, weight=o.get("weight", "mangoldt"), threads=int(o["threads"]))
    data = {"c": str(o["c"]), "j": ph.j, "C1": ph.C1, "C2": ph.C2, "X": X, "value": r.value, "trivial": r.trivial, "ratio": r.ratio, "terms": r.terms, "phase_error": r.phase_error}
    return Outcome(data, expsum_csv([(ph, X, r)]))


def cmd_hb_check(o: dict) -> Outcome:
    from .expsums import heath_brown_check

    n = int(o["X"])
    J = int(o.get("J", 2))
    err = heath_brown_check(n, J)
    return Outcome({"n_max": n, "J": J, "max_error": err}, None, None if err <= 1e-9 else f"max error {err:.3g} > 1e-9")


def cmd_vdc(o: dict) -> Outcome:
    from .expsums import family_phase_check, quadratic_calibration

    X = int(o["X"])
    Y = int(o.get("Y") or max(1, X // 10))
    cal = quadratic_calibration()
    fam = family_phase_check(str(o["c"]), float(o.get("theta3", 1.0)), X, Y)
    data = {
        "calibration": {"value": cal.value, "bound": cal.bound, "K": cal.K, "passed": cal.passed},
        "family": {"theta3": o.get("theta3", 1.0), "X": X, "Y": Y, "value": fam.value, "bound": fam.bound, "K": fam.K, "passed": fam.passed},
    }
    bad = None if (cal.passed and fam.passed) else "empirical constant above 10"
    return Outcome(data, None, bad)


def cmd_verify_identities(o: dict) -> Outcome:
    from .psprimes import verify_lemma_nchi, verify_lemma_shnchi

    cfg = make_config(o)
    lo, hi = o.get("range") or (cfg.X, 2 * cfg.X)
    th = int(o["threads"])
    a = verify_lemma_nchi(cfg, lo, hi, threads=th)
    b = verify_lemma_shnchi(cfg, lo, hi, threads=th)

    def rep(r):
        return {k: v for k, v in r.__dict__.items() if k != "examples"}

    data = {"config": cfg.as_dict(), "progression_identity": rep(a), "positivity_consequences": rep(b)}
    if a.unresolved or b.unresolved:
        raise PrecisionUnresolved("window", -1, cfg.max_precision_bits)
    bad = None
    if a.counterexamples or b.counterexamples:
        bad = f"counterexamples: {a.counterexamples}, {b.counterexamples}"
    return Outcome(data, None, bad)


HANDLERS: dict[str, Callable[[dict], Outcome]] = {
    "ps": cmd_ps,
    "density": cmd_density,
    "gaps": cmd_gaps,
    "cluster": cmd_cluster,
    "witness": cmd_witness,
    "mk": cmd_mk,
    "sieve-check": cmd_sieve_check,
    "smooth": cmd_smooth,
    "expsum": cmd_expsum,
    "hb-check": cmd_hb_check,
    "vdc": cmd_vdc,
    "verify-identities": cmd_verify_identities,
}

DEFAULT_FORMAT = {"ps": "csv", "density": "csv", "cluster": "csv", "smooth": "csv", "expsum": "csv"}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code not in (0, None) else EXIT_OK
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        opts = resolve(ns)
        out = HANDLERS[ns.command](opts)
    except PrecisionUnresolved as e:
        print(f"psgap: precision unresolved: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except (AssertionError,) as e:
        print(f"psgap: invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigError, ValueError, OSError) as e:
        print(f"psgap: invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT
    if out.violation:
        print(f"psgap: invariant violation: {out.violation}", file=sys.stderr)
        code = EXIT_INVARIANT
    fmt = opts.get("format") or DEFAULT_FORMAT.get(ns.command, "json")
    text = (out.csv if out.csv is not None else dict_csv(out.data)) if fmt == "csv" else dump_json(out.data) + "\n"
    if opts.get("out"):
        path = opts["out"]
        with open(path, "w") as fh:
            fh.write(text)
        cfg_snap = {k: (list(v) if isinstance(v, tuple) else v) for k, v in opts.items() if k != "out"}
        man = RunManifest(ns.command, argv, cfg_snap, versions(), time.perf_counter() - t0, [os.path.abspath(path)], code)
        with open(path + ".manifest.json", "w") as fh:
            fh.write(man.to_json() + "\n")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
