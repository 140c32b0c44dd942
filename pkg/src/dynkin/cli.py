"""Command-line interface: ``dynkin solve|verify|oracle|simulate|example``.

Exit codes: 0 ok, 1 I/O, 2 validation, 3 iteration overflow,
4 verification failure, 5 oracle gap, 6 simulation discrepancy.
"""
import argparse
import os
import sys

import numpy as np

from . import serialize
from .errors import (
    BadParameter,
    DimensionMismatch,
    InvalidGame,
    InvalidGenerator,
    IterationOverflow,
    OverlappingSets,
    PreconditionViolated,
    SpecFileError,
    TooManyStates,
)
from .game import InitMode, compare_modes, solve_game, verify_equilibrium
from .oracle import SimulationConfig, enumerate_equilibria, simulate_hitting_payoff, value_iteration
from .recipes import EXAMPLES, gen_birth_death, gen_four_state, gen_lattice, example_spec
from .resolvent import hitting_payoff

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_OVERFLOW = 0, 1, 2, 3
EXIT_VERIFY, EXIT_ORACLE, EXIT_SIMULATION = 4, 5, 6

ORACLE_GAP = 1e-6


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _fmt_set(spec, members):
    return "{" + ",".join(spec.states.labels[x] for x in sorted(members)) + "}"


def _fmt_vec(values):
    return "(" + ", ".join(str(v) if not isinstance(v, float) else f"{v:.10g}" for v in values) + ")"


def _load(args):
    """Spec from ``--recipe`` or a spec file, honouring --arithmetic/--mode/--tol."""
    exact_flag = getattr(args, "arithmetic", None)
    if getattr(args, "recipe", None):
        spec = example_spec(args.recipe, exact=exact_flag == "rational")
        if exact_flag == "rational" and not spec.exact:
            spec = _to_exact(spec)
        init = "strict"
    else:
        if not args.spec:
            raise _Exit(EXIT_IO, "give a spec file or --recipe")
        try:
            spec, init, _ = serialize.parse_spec_file(args.spec)
        except OSError as exc:
            raise _Exit(EXIT_IO, f"cannot read {args.spec}: {exc.strerror}") from None
        except SpecFileError as exc:
            code = EXIT_IO if exc.field is None and exc.line is not None else EXIT_VALIDATION
            raise _Exit(code, f"{args.spec}: {exc}") from None
        if exact_flag == "rational" and not spec.exact:
            spec = _to_exact(spec)
        elif exact_flag == "float" and spec.exact:
            spec = spec.to_float()
    if getattr(args, "tol", None) is not None:
        spec = spec.with_tol(args.tol)
    mode = getattr(args, "mode", None) or init
    return spec, InitMode(mode)


def _to_exact(spec):
    from .resolvent import GameSpec

    return GameSpec.build(spec.Q.entries, spec.beta, spec.psi, spec.phi, spec.states, exact=True)


def _labels_to_set(spec, text):
    if text is None or text.strip() == "":
        return frozenset()
    try:
        return frozenset(spec.states.index(s.strip()) for s in text.split(","))
    except KeyError as exc:
        raise _Exit(EXIT_VALIDATION, str(exc.args[0])) from None


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot write {path}: {exc.strerror}") from None


def cmd_solve(args):
    spec, mode = _load(args)
    try:
        sol = solve_game(spec, mode)
    except IterationOverflow as exc:
        raise _Exit(EXIT_OVERFLOW, str(exc)) from None
    out = args.out
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot create {out}: {exc.strerror}") from None
    _write(os.path.join(out, "solution.json"), serialize.dumps(serialize.solution_to_dict(spec, sol)))
    _write(os.path.join(out, "trace.json"), serialize.dumps(serialize.trace_to_dict(spec, sol)))
    _write(os.path.join(out, "values.csv"), serialize.values_csv(spec, sol))
    if args.recipe:
        # keep the solved instance next to the outputs so verify can reuse it
        _write(os.path.join(out, "spec.json"), serialize.dumps(serialize.spec_to_dict(spec, mode.value)))
    print(f"mode: {mode.value}")
    if sol.shortcut_used:
        print("V0 <= phi everywhere: V = V0 (no outer iterations)")
    for rec in sol.trace.outer:
        print(f"k={rec.k}: S={_fmt_set(spec, rec.inf_set)} D={_fmt_set(spec, rec.sup_set)}")
    print(f"terminated at V{sol.outer_iterations} after {sol.trace.total_inner_steps} inner steps")
    print(f"sup_stop = {_fmt_set(spec, sol.sup_stop)}")
    print(f"inf_stop = {_fmt_set(spec, sol.inf_stop)}")
    print(f"wrote {out}/solution.json, trace.json, values.csv")
    return EXIT_OK


def cmd_verify(args):
    spec, _ = _load(args)
    try:
        sup_stop, inf_stop, V = serialize.load_solution(args.solution, spec)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {args.solution}: {exc.strerror}") from None
    except SpecFileError as exc:
        raise _Exit(EXIT_VALIDATION, f"{args.solution}: {exc}") from None
    eq = spec.equal_set()
    try:
        report = verify_equilibrium(spec, sup_stop - eq, inf_stop - eq, V)
    except PreconditionViolated as exc:
        print(f"FAIL: {exc}")
        return EXIT_VERIFY
    print(f"{'state':>8} {'region':>6} {'defect':>12} {'V-psi':>12} {'phi-V':>12}  status")
    for c in report.checks:
        label = spec.states.labels[c.state]
        status = "ok" if c.ok else f"FAIL ({c.reason})"
        print(f"{label:>8} {c.region:>6} {c.defect:12.3e} {c.above_psi:12.3e} {c.below_phi:12.3e}  {status}")
    if report.passed:
        print(f"PASS (tol {report.tol:.3e})")
        return EXIT_OK
    bad = ",".join(spec.states.labels[x] for x in report.failing_states)
    print(f"FAIL at states {bad}")
    return EXIT_VERIFY


def cmd_oracle(args):
    spec, mode = _load(args)
    try:
        sol = solve_game(spec, mode)
    except IterationOverflow as exc:
        raise _Exit(EXIT_OVERFLOW, str(exc)) from None
    W = value_iteration(spec, tol=1e-10)
    gap = float(np.max(np.abs(np.asarray(sol.value, dtype=float) - W)))
    print(f"value iteration gap: {gap:.3e}")
    code = EXIT_OK if gap <= ORACLE_GAP else EXIT_ORACLE

    try:
        eqs = enumerate_equilibria(spec)
    except TooManyStates:
        eqs = None
    if eqs is not None:
        A, B = sol.equilibrium_sets(spec)
        print(f"{len(eqs)} equilibrium pair(s) by enumeration:")
        for a, b, v in eqs:
            mark = "  <- solver" if (a, b) == (A, B) else ""
            print(f"  A={_fmt_set(spec, a)} B={_fmt_set(spec, b)} V={_fmt_vec(v)}{mark}")
        if not any((a, b) == (A, B) for a, b, _ in eqs):
            print("solver pair not found among enumerated equilibria")
            code = EXIT_ORACLE
        spread = max(
            (float(np.max(np.abs(np.asarray(v, dtype=float) - np.asarray(sol.value, dtype=float))))
             for _, _, v in eqs),
            default=0.0,
        )
        if not eqs or spread > ORACLE_GAP:
            print(f"enumerated values disagree with the solver by {spread:.3e}")
            code = EXIT_ORACLE

    if args.compare:
        cmp = compare_modes(spec)
        m = max(cmp.strict.outer_iterations, cmp.weak.outer_iterations)
        for k in range(m):
            s = cmp.strict.trace.outer[min(k, cmp.strict.outer_iterations - 1)].inf_set \
                if cmp.strict.outer_iterations else cmp.strict.inf_stop
            w = cmp.weak.trace.outer[min(k, cmp.weak.outer_iterations - 1)].inf_set \
                if cmp.weak.outer_iterations else cmp.weak.inf_stop
            print(f"k={k + 1}: S={_fmt_set(spec, s)} weak S={_fmt_set(spec, w)}")
        S, Sw = cmp.strict.inf_stop, cmp.weak.inf_stop
        if cmp.limits_equal:
            print(f"S_inf = weak S_inf = {_fmt_set(spec, S)}")
        else:
            print(f"S_inf={_fmt_set(spec, S)}, weak S_inf={_fmt_set(spec, Sw)}")
        print("values equal" if cmp.value_gap <= ORACLE_GAP else f"values differ by {cmp.value_gap:.3e}")
        for v in cmp.violations:
            print(f"violation: {v}")
        if not cmp.ok:
            code = EXIT_ORACLE
    return code


def cmd_simulate(args):
    spec, _ = _load(args)
    B = _labels_to_set(spec, args.B)
    C = _labels_to_set(spec, args.C)
    try:
        x = spec.states.index(args.x)
    except KeyError as exc:
        raise _Exit(EXIT_VALIDATION, str(exc.args[0])) from None
    try:
        cfg = SimulationConfig(paths=args.paths, seed=args.seed, horizon=args.horizon,
                               confidence_z=args.z)
        est = simulate_hitting_payoff(spec, B, C, x, cfg)
        exact = float(hitting_payoff(spec, B, C)[x])
    except (OverlappingSets, ValueError) as exc:
        raise _Exit(EXIT_VALIDATION, str(exc)) from None
    diff = abs(exact - est.mean)
    bound = cfg.confidence_z * est.stderr + est.bias_bound
    print(f"estimate: {est.mean!r} +/- {cfg.confidence_z * est.stderr!r} (z={cfg.confidence_z})")
    print(f"stderr: {est.stderr!r}  bias bound: {est.bias_bound!r}  horizon: {est.horizon!r}")
    print(f"paths: {est.paths_used}  truncated: {est.truncated}  rng: {est.rng}  seed: {cfg.seed}")
    if est.truncated == est.paths_used:
        print("warning: every path hit the horizon; the estimate is pure truncation")
    print(f"exact: {exact!r}")
    z = diff / est.stderr if est.stderr > 0 else (0.0 if diff == 0 else float("inf"))
    print(f"discrepancy: {diff!r} ({z:.2f} stderr), allowed {bound!r}")
    return EXIT_OK if diff <= bound else EXIT_SIMULATION


def cmd_example(args):
    exact = args.arithmetic == "rational"
    fam = args.family
    if fam == "birth-death":
        spec = gen_birth_death(args.N or 50, args.lam, args.r, args.beta, args.selector or "1.1")
    elif fam == "lattice":
        spec = gen_lattice(args.N or 13, args.r, args.beta, args.selector or "2.1",
                           delta=args.delta, absorbing_axis=args.absorbing_axis)
    elif fam in ("four-state-equal", "four-state-neq"):
        spec = gen_four_state(fam.rsplit("-", 1)[1], exact=exact)
    else:
        spec = example_spec(fam, exact=exact)
    if exact and not spec.exact:
        spec = _to_exact(spec)
    text = serialize.dumps(serialize.spec_to_dict(spec))
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        _write(args.out, text)
    return EXIT_OK


def _add_source(p):
    p.add_argument("spec", nargs="?", help="JSON spec file")
    p.add_argument("--recipe", choices=sorted(EXAMPLES), help="built-in example instead of a file")
    p.add_argument("--arithmetic", choices=("float", "rational"), help="override the spec file")
    p.add_argument("--tol", type=float, help="classification slack (default scales with the payoffs)")


def build_parser():
    parser = argparse.ArgumentParser(prog="dynkin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a game and write solution/trace/CSV")
    _add_source(p)
    p.add_argument("--mode", choices=("strict", "weak"))
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a stored solution against the equilibrium conditions")
    _add_source(p)
    p.add_argument("--solution", required=True, help="solution.json written by solve")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="compare the solver with value iteration and enumeration")
    _add_source(p)
    p.add_argument("--mode", choices=("strict", "weak"))
    p.add_argument("--compare", action="store_true", help="also compare strict and weak runs")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="Monte Carlo check of a hitting payoff")
    _add_source(p)
    p.add_argument("--B", default="", help="comma-separated labels where psi is paid")
    p.add_argument("--C", default="", help="comma-separated labels where phi is paid")
    p.add_argument("--x", required=True, help="start state label")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float)
    p.add_argument("--z", type=float, default=3.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("example", help="write a spec file for an example chain")
    p.add_argument("family", choices=("birth-death", "lattice")
                   + tuple(sorted(EXAMPLES, key=list(EXAMPLES).index)))
    p.add_argument("--N", type=int)
    p.add_argument("--lam", type=float, default=40.0)
    p.add_argument("--r", type=float, default=28.0)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--selector", help="payoff pair: 1.1, 1.2, 1.3 (birth-death) or 2.1, 2.2 (lattice)")
    p.add_argument("--delta", type=float, default=8.0)
    p.add_argument("--absorbing-axis", choices=("i", "j"), default="j")
    p.add_argument("--arithmetic", choices=("float", "rational"), default="float")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (InvalidGenerator, InvalidGame, DimensionMismatch, BadParameter) as exc:
        field = getattr(exc, "field", None)
        where = f" ({field})" if field else ""
        print(f"validation error{where}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except IterationOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    sys.exit(main())
