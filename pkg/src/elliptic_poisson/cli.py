"""Command-line driver: configuration, sweeps, golden files, and reports.

Reports stream as JSON lines (one object per check plus a summary object);
``--format text`` renders the same data as a table.  Exit codes: 0 all
checks passed, 1 at least one failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from fractions import Fraction
from importlib import resources
from random import Random

from .brackets import BracketSpec, generator_bracket, verify_closure, verify_jacobi_window
from .casimirs import build_matrix, casimirs, involution_family, rank1_identity_check, verify_central
from .leaves import (
    CONVENTION_PRINTED,
    LeafConfig,
    diagonal_vanish_check,
    draw_leaf_sample,
    kernel_check,
    nondegeneracy_check,
    prop3_check,
)
from .poly import IndexSet
from .report import Report, make_report, render_table, summary
from .weierstrass import (
    SamplePlan,
    identity5_sweep,
    lattice_init,
    verify_functional,
    weierstrass_selftest,
)

SEED_ENV = "ELLIPTIC_POISSON_SEED"
DEFAULT_SEED = 20240915
DEFAULT_TAU = "i"
TRIPLE_GUARDRAIL = 10_000

CORE_WINDOW = (0, 2, 3, 4, 5, 6, 7, 8, 9, 10)
ACCEPTANCE_TAUS = ("i", "0.3+1.1i")
ACCEPTANCE_FUNCTIONAL_N = (2, 3, 5, 8)
ACCEPTANCE_CENTRAL_N = (3, 4, 5, 6, 7, 8)
ACCEPTANCE_PROP3 = ((1, 4), (2, 5), (2, 6), (3, 7))
ACCEPTANCE_KERNEL = ((4, 1), (6, 2), (3, 1), (5, 2), (7, 3))
ACCEPTANCE_INVOLUTION_N = (4, 5, 6)


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 2."""


def parse_tau(text: str) -> complex:
    """Parse 'a+bi' style complex numbers ('i', '1.1i', '0.3+1.1i', ...)."""
    s = text.strip().replace(" ", "").replace("i", "j")
    if not s:
        raise UsageError("empty tau")
    try:
        return complex(s)
    except ValueError:
        raise UsageError(f"malformed tau {text!r} (expected a+bi)") from None


def parse_window(text: str) -> list[int]:
    """Window syntax: 'a..b' (inclusive range), 'FN' (the {0} u {2..N}
    subalgebra window), or a comma list of integers."""
    s = text.strip()
    m = re.fullmatch(r"[Ff](\d+)", s)
    if m:
        return IndexSet.fn(int(m.group(1))).members()
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", s)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise UsageError(f"empty window {text!r}")
        return list(range(lo, hi + 1))
    try:
        return sorted({int(p) for p in s.split(",")})
    except ValueError:
        raise UsageError(f"malformed window {text!r}") from None


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"malformed rational {text!r}") from None


def _load_config(path: str) -> dict[str, str]:
    config: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key, value = line.split("=", 1)
                config[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    return config


_CONFIG_PARSERS = {
    "seed": int,
    "samples": int,
    "n": str,
    "p": int,
    "tol": float,
    "tau": str,
    "window": str,
    "format": str,
    "out": str,
    "force": lambda v: v.lower() in ("1", "true", "yes"),
}


def _effective(args: argparse.Namespace, config: dict[str, str], key: str, default):
    value = getattr(args, key, None)
    if value is not None and value is not False:
        return value
    if key in config:
        parser = _CONFIG_PARSERS.get(key, str)
        try:
            return parser(config[key])
        except ValueError:
            raise UsageError(f"bad config value for {key}: {config[key]!r}") from None
    return default


def _resolve_bracket(name: str) -> BracketSpec:
    if name == "elliptic":
        return BracketSpec.elliptic()
    if name in ("1", "2", "3"):
        return BracketSpec.basis(int(name))
    if name == "lambda":
        return BracketSpec.custom()
    m = re.fullmatch(r"custom:([^,]+),([^,]+),([^,]+)", name)
    if m:
        return BracketSpec.custom(*(parse_rational(g) for g in m.groups()))
    raise UsageError(f"unknown bracket {name!r}")


def _golden_text(n: int) -> str:
    path = resources.files("elliptic_poisson").joinpath(f"golden/v1/casimir_n{n}.txt")
    return path.read_text(encoding="utf-8")


def casimir_lines(n: int) -> list[str]:
    cs = casimirs(n)
    label = {"even-pair": ("C0", "C1"), "odd-single": ("C",)}[cs.kind]
    return [f"{name} = {elem.to_text()}" for name, elem in zip(label, cs.elements)]


def golden_casimir_check(n: int) -> Report:
    """Compare the built central elements with the shipped golden file."""
    built = "\n".join(casimir_lines(n)) + "\n"
    frozen = _golden_text(n)
    failures = []
    if built != frozen:
        failures.append({
            "witness": f"casimir n={n}",
            "residual-text": f"built:\n{built}\ngolden:\n{frozen}",
        })
    return make_report(f"casimir-golden-n{n}", {"n": n}, failures)


def bracket_table(window: list[int], n_value: Fraction | None) -> tuple[Report, list[str]]:
    """Render every generator bracket over a window, for the three basis
    brackets and the elliptic combination."""
    lines = []
    specs = [("1", BracketSpec.basis(1)), ("2", BracketSpec.basis(2)),
             ("3", BracketSpec.basis(3)), ("elliptic", BracketSpec.elliptic())]
    for i, alpha in enumerate(window):
        for beta in window[i:]:
            for name, spec in specs:
                value = generator_bracket(alpha, beta, spec, n_value=n_value)
                lines.append(f"{{e[{alpha}], e[{beta}]}}_{name} = {value.to_text()}")
    rep = make_report("bracket-table", {
        "window": window,
        "n": "formal" if n_value is None else str(n_value),
        "rows": len(lines),
    }, [])
    return rep, lines


# -- command implementations --------------------------------------------------


def _cmd_bracket_table(args, config, out):
    window = parse_window(_effective(args, config, "window", "0..6"))
    n_text = _effective(args, config, "n", None)
    n_value = None if n_text in (None, "formal") else parse_rational(str(n_text))
    rep, lines = bracket_table(window, n_value)
    for line in lines:
        out.write(line + "\n")
    return [rep]


def _cmd_verify_jacobi(args, config, out):
    window = parse_window(_effective(args, config, "window", "F10"))
    triples = len(window) * (len(window) - 1) * (len(window) - 2) // 6
    force = _effective(args, config, "force", False)
    if triples > TRIPLE_GUARDRAIL and not force:
        raise UsageError(
            f"window yields {triples} triples (> {TRIPLE_GUARDRAIL}); pass --force to proceed")
    if args.formal_lambda:
        spec = BracketSpec.custom()
    else:
        spec = _resolve_bracket(_effective(args, config, "bracket", "elliptic"))
    n_text = _effective(args, config, "n", None)
    n_value = None if args.formal_n or n_text in (None, "formal") else parse_rational(str(n_text))
    return [verify_jacobi_window(window, spec, n_value=n_value)]


def _cmd_verify_closure(args, config, out):
    n_text = _effective(args, config, "n", "2..10")
    m = re.fullmatch(r"(\d+)\.\.(\d+)", str(n_text))
    ns = list(range(int(m.group(1)), int(m.group(2)) + 1)) if m else [int(parse_rational(str(n_text)))]
    bracket = _effective(args, config, "bracket", "all")
    specs = ([("elliptic", BracketSpec.elliptic()), ("1", BracketSpec.basis(1)),
              ("2", BracketSpec.basis(2)), ("3", BracketSpec.basis(3))]
             if bracket == "all" else [(bracket, _resolve_bracket(bracket))])
    reports = []
    for n in ns:
        for name, spec in specs:
            reports.append(verify_closure(n, spec, check_name=f"closure-n{n}-b{name}"))
    return reports


def _make_lattice(args, config):
    tau = parse_tau(_effective(args, config, "tau", DEFAULT_TAU))
    try:
        return lattice_init(1, tau)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _make_plan(args, config, default_samples=20, default_tol=1e-6):
    return SamplePlan(
        seed=int(_effective(args, config, "seed", _default_seed())),
        count=int(_effective(args, config, "samples", default_samples)),
        tolerance=float(_effective(args, config, "tol", default_tol)),
    )


def _cmd_verify_elliptic(args, config, out):
    L = _make_lattice(args, config)
    plan = _make_plan(args, config)
    reports = [
        weierstrass_selftest(L, SamplePlan(plan.seed, plan.count, tolerance=1e-9), tol=1e-9),
        identity5_sweep(L, SamplePlan(plan.seed, plan.count, tolerance=1e-8), tol=1e-8),
    ]
    n_text = _effective(args, config, "n", None)
    ns = [parse_rational(str(n_text))] if n_text is not None else [Fraction(k) for k in ACCEPTANCE_FUNCTIONAL_N]
    for n in ns:
        hi = min(8, int(n)) if n == int(n) else 8
        window = [0] + list(range(2, hi + 1))
        reports.append(verify_functional(L, n, window, plan))
    return reports


def _cmd_casimir_build(args, config, out):
    n_text = _effective(args, config, "n", None)
    if n_text is None:
        raise UsageError("casimir-build needs --n")
    n = int(parse_rational(str(n_text)))
    if n < 3:
        raise UsageError("casimir construction needs n >= 3")
    for line in casimir_lines(n):
        out.write(line + "\n")
    cs = casimirs(n)
    return [make_report(f"casimir-build-n{n}", {
        "n": n, "kind": cs.kind,
        "degrees": [c.homogeneous_degree() for c in cs.elements],
    }, [])]


def _cmd_casimir_verify(args, config, out):
    n_text = _effective(args, config, "n", None)
    ns = [int(parse_rational(str(n_text)))] if n_text is not None else list(ACCEPTANCE_CENTRAL_N)
    reports = []
    for n in ns:
        reports.append(verify_central(casimirs(n)))
        if n % 2 == 0:
            reports.append(rank1_identity_check(build_matrix("g", n), check_name=f"rank1-g-n{n}"))
            reports.append(rank1_identity_check(build_matrix("g2m", n), check_name=f"rank1-g2m-n{n}"))
    return reports


def _cmd_involution(args, config, out):
    n_text = _effective(args, config, "n", None)
    ns = [int(parse_rational(str(n_text)))] if n_text is not None else list(ACCEPTANCE_INVOLUTION_N)
    return [involution_family(n) for n in ns]


def _cmd_leaves_verify(args, config, out):
    L = _make_lattice(args, config)
    plan = _make_plan(args, config, default_samples=10)
    n_text = _effective(args, config, "n", None)
    p_value = _effective(args, config, "p", None)
    cases = [(int(p_value), int(parse_rational(str(n_text))))] if n_text and p_value \
        else [(p, n) for p, n in ACCEPTANCE_PROP3]
    reports = []
    for p, n in cases:
        cfg = LeafConfig(p=p, n_value=Fraction(n), lattice=L)
        window = IndexSet.fn(n).members()
        reports.append(prop3_check(cfg, window, plan))
        if 2 * p < n:
            cs = casimirs(n)
            kplan = SamplePlan(plan.seed, plan.count, tolerance=1e-8)
            reports.append(kernel_check(cfg, cs, kplan))
            for ci, elem in enumerate(cs.elements):
                reports.append(diagonal_vanish_check(
                    cfg, elem, SamplePlan(plan.seed, max(2, plan.count // 3), tolerance=1e-8),
                    check_name=f"diagonal-vanish-n{n}-p{p}-c{ci}"))
        rng = Random(plan.seed)
        reports.append(nondegeneracy_check(cfg, draw_leaf_sample(cfg, rng)))
    return reports


def _cmd_all(args, config, out):
    reports = []
    reports.append(verify_jacobi_window(list(CORE_WINDOW), BracketSpec.custom(),
                                        check_name="jacobi-core"))
    for n in range(2, 11):
        for name, spec in (("elliptic", BracketSpec.elliptic()), ("1", BracketSpec.basis(1)),
                           ("2", BracketSpec.basis(2)), ("3", BracketSpec.basis(3))):
            reports.append(verify_closure(n, spec, check_name=f"closure-n{n}-b{name}"))
    for n in (4, 6):
        reports.append(golden_casimir_check(n))
    for n in ACCEPTANCE_CENTRAL_N:
        reports.append(verify_central(casimirs(n)))
    seed = int(_effective(args, config, "seed", _default_seed()))
    samples = int(_effective(args, config, "samples", 20))
    for tau_text in ACCEPTANCE_TAUS:
        tau = parse_tau(tau_text)
        L = lattice_init(1, tau)
        tag = tau_text.replace("+", "p")
        reports.append(weierstrass_selftest(
            L, SamplePlan(seed, samples, tolerance=1e-9), tol=1e-9,
            check_name=f"weierstrass-selftest-tau{tag}"))
        reports.append(identity5_sweep(
            L, SamplePlan(seed, samples, tolerance=1e-8), tol=1e-8,
            check_name=f"identity5-tau{tag}"))
        for n in ACCEPTANCE_FUNCTIONAL_N:
            window = [0] + list(range(2, min(8, n) + 1))
            reports.append(verify_functional(
                L, Fraction(n), window, SamplePlan(seed, samples, tolerance=1e-6),
                check_name=f"functional-tau{tag}-n{n}"))
    L = lattice_init(1, parse_tau(ACCEPTANCE_TAUS[0]))
    plan = SamplePlan(seed, 10, tolerance=1e-6)
    for p, n in ACCEPTANCE_PROP3:
        cfg = LeafConfig(p=p, n_value=Fraction(n), lattice=L)
        reports.append(prop3_check(cfg, IndexSet.fn(n).members(), plan))
    cfg = LeafConfig(p=2, n_value=Fraction(5), lattice=L)
    neg = prop3_check(cfg, IndexSet.fn(5).members(),
                      SamplePlan(seed, 5, tolerance=1e-2),
                      convention=CONVENTION_PRINTED,
                      check_name="homomorphism-printed-control")
    # the control must FAIL; invert its status for aggregation
    inverted = make_report("homomorphism-printed-control-expectfail",
                           neg.parameters,
                           [] if not neg.passed else [{"witness": "printed convention passed"}],
                           max_residual=neg.max_residual)
    reports.append(inverted)
    for n, p in ACCEPTANCE_KERNEL:
        cfg = LeafConfig(p=p, n_value=Fraction(n), lattice=L)
        cs = casimirs(n)
        reports.append(kernel_check(cfg, cs, SamplePlan(seed, 5, tolerance=1e-8)))
        for ci, elem in enumerate(cs.elements):
            reports.append(diagonal_vanish_check(
                cfg, elem, SamplePlan(seed, 3, tolerance=1e-8),
                check_name=f"diagonal-vanish-n{n}-p{p}-c{ci}"))
    for n in ACCEPTANCE_INVOLUTION_N:
        reports.append(involution_family(n))
    for p, n in ((1, 4), (2, 6), (2, 4)):
        cfg = LeafConfig(p=p, n_value=Fraction(n), lattice=L)
        rng = Random(seed)
        reports.append(nondegeneracy_check(cfg, draw_leaf_sample(cfg, rng)))
    return reports


_COMMANDS = {
    "bracket-table": _cmd_bracket_table,
    "verify-jacobi": _cmd_verify_jacobi,
    "verify-closure": _cmd_verify_closure,
    "verify-elliptic": _cmd_verify_elliptic,
    "casimir-build": _cmd_casimir_build,
    "casimir-verify": _cmd_casimir_verify,
    "involution": _cmd_involution,
    "leaves-verify": _cmd_leaves_verify,
    "all": _cmd_all,
}


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"bad {SEED_ENV} value {env!r}") from None
    return DEFAULT_SEED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elliptic-poisson",
        description="Exact verification suite for the compatible quadratic "
                    "bracket family and its elliptic realization.",
    )
    parser.add_argument("--config", help="flat key=value configuration file; flags win")
    parser.add_argument("--out", help="write reports to this path (default stdout)")
    parser.add_argument("--format", choices=("json", "text"), default=None,
                        help="report rendering (default json lines)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key=value configuration file; flags win")
        p.add_argument("--out", help="write reports to this path (default stdout)")
        p.add_argument("--format", choices=("json", "text"), default=None)
        p.add_argument("--n", default=None, help="degree parameter (rational, range, or 'formal')")
        p.add_argument("--p", type=int, default=None, help="number of leaf points")
        p.add_argument("--window", default=None,
                       help="index window: 'a..b', 'FN', or comma list")
        p.add_argument("--tau", default=None, help="period ratio a+bi")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--bracket", default=None,
                       help="elliptic | 1 | 2 | 3 | lambda | custom:a,b,c")
        p.add_argument("--formal-n", action="store_true",
                       help="keep the degree parameter formal")
        p.add_argument("--formal-lambda", action="store_true",
                       help="use the fully formal three-parameter combination")
        p.add_argument("--force", action="store_true",
                       help="override the sweep-size guardrail")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        config = _load_config(args.config) if args.config else {}
        out_path = _effective(args, config, "out", None)
        fmt = _effective(args, config, "format", None) or "json"
        if fmt not in ("json", "text"):
            raise UsageError(f"unknown format {fmt!r}")
        sink = open(out_path, "w", encoding="utf-8") if out_path else sys.stdout
        try:
            reports = _COMMANDS[args.command](args, config, sink)
            reports.append(summary(reports))
            if fmt == "json":
                for rep in reports:
                    sink.write(rep.to_json() + "\n")
            else:
                sink.write(render_table(reports) + "\n")
        finally:
            if out_path:
                sink.close()
        return 0 if all(r.passed for r in reports) else 1
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
