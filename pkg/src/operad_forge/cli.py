"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 unsupported
configuration.  Reports are plain text with a version header and contain
no timings, so runs with different ``--jobs`` values are byte-identical.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from . import __version__
from .algebra import (
    BUILTIN_ALGEBRAS,
    AlgebraError,
    AlgebraModel,
    builtin_algebra,
    check_bv,
    check_cbv_infty,
    check_diff_operator_order,
    check_ebv,
    check_ecbv_algebra,
    check_gerstenhaber,
    check_jacobi_algebra,
    check_shifted_lie,
    check_trivialization,
    commutator,
    koszul_bracket,
    parse_algebra,
)
from .complexes import FormatError, ShapeError, parse_sdr, validate_sdr
from .expressions import ParseError
from .homotopy import NoHomotopy, verify_block, OperadSdr
from .morphisms import (
    BUILTIN_MORPHISMS,
    IllTyped,
    MorphismReport,
    builtin_morphism,
    check_morphism,
    composite_consistency,
    parse_morphism,
)
from .presentations import BUILTIN_NAMES, builtin, check_presentation, parse_presentation
from .quotient import IdealSpan, NotWeightHomogeneous, OutsideCaps, Unsupported, check_h_preserves_ideal, homology_block
from .report import TextReport

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3

ALGEBRA_CHECKS = ("order", "bv", "ebv", "jacobi", "cbv", "ecbv", "trivialization", "gerstenhaber")


class InputError(Exception):
    pass


class UnsupportedConfig(Exception):
    pass


# -- presentation sources and block workers ----------------------------------------------


@dataclass(frozen=True)
class Source:
    """Picklable description of a presentation, so worker processes can rebuild it."""

    kind: str  # builtin | file
    value: str
    index_cap: int

    def load(self):
        if self.kind == "builtin":
            return builtin(self.value, self.index_cap)
        with open(self.value, encoding="utf-8") as fh:
            return parse_presentation(fh.read(), name=os.path.basename(self.value))


_CACHE: dict = {}


def _cached(key, factory):
    if key not in _CACHE:
        _CACHE[key] = factory()
    return _CACHE[key]


def _sdr_task(args):
    source, n, w = args
    pres = _cached(("pres", source), source.load)
    sdr = _cached(("sdr", source), lambda: OperadSdr(pres.ctx, pres.h_gen))
    return verify_block(sdr, n, w)


def _homology_task(args):
    source, max_arity, max_weight, n, w = args
    pres = _cached(("pres", source), source.load)
    span = _cached(("span", source, max_arity, max_weight), lambda: IdealSpan(pres, max_arity, max_weight))
    return homology_block(span, n, w)


def _run_tasks(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _fmt_dims(d: dict) -> str:
    return "{" + ", ".join(f"{k}: {v}" for k, v in sorted(d.items())) + "}"


# -- pipelines -------------------------------------------------------------------------------


def run_verify_presentation(source: Source, max_arity: int, max_weight: int, jobs: int = 1) -> TextReport:
    pres = source.load()
    rep = TextReport("verify-presentation", pres.name,
                     [("max-arity", max_arity), ("max-weight", max_weight), ("index-cap", source.index_cap)])
    check = check_presentation(pres, max_arity, max_weight)
    rep.add_check(check)
    ok = check.passed
    lines = rep.section("operad SDR blocks (arity, weight, monomials, failures)")
    if pres.h_gen is None:
        lines.append("not applicable: no contracting homotopy on the generators")
    else:
        tasks = [(source, n, w) for n in range(1, max_arity + 1) for w in range(0, max_weight + 1)]
        for b in _run_tasks(_sdr_task, tasks, jobs):
            lines.append(f"{b.arity} {b.weight} {b.monomials} {len(b.failures)}")
            lines.extend(f"  FAIL {msg}" for msg in b.failures[:5])
            ok = ok and not b.failures
    rep.verdict = "pass" if ok else "fail"
    return rep


def run_quasi_iso(source: Source, max_arity: int, max_weight: int, jobs: int = 1) -> TextReport:
    pres = source.load()
    rep = TextReport("quasi-iso", pres.name,
                     [("max-arity", max_arity), ("max-weight", max_weight), ("index-cap", source.index_cap)])
    if not pres.differential_is_weight_homogeneous():
        raise UnsupportedConfig(
            f"the differential of {pres.name} does not preserve weight; (arity, weight) blocks are not subcomplexes"
        )
    if pres.h_gen is None:
        raise UnsupportedConfig(f"{pres.name} declares no contracting homotopy on its generators")
    try:
        rel_arity = max((r.element.arity() for r in pres.ideal_relations if r.element), default=1)
        rel_weight = max((max(r.element.weights()) for r in pres.ideal_relations if r.element), default=0)
        hyp_span = IdealSpan(pres, max(max_arity, rel_arity), max(max_weight, rel_weight))
        checks = check_h_preserves_ideal(pres, hyp_span)
    except NotWeightHomogeneous as exc:
        raise UnsupportedConfig(str(exc)) from None
    ok = True
    lines = rep.section("hypothesis: h(r) lies in the ideal for each generating relation")
    for c in checks:
        lines.append(f"{'ok  ' if c.member else 'FAIL'} {c.name}" + ("" if c.h_image else "  [h(r) = 0]"))
        ok = ok and c.member
    tasks = [(source, max_arity, max_weight, n, w) for n in range(1, max_arity + 1) for w in range(0, max_weight + 1)]
    lines = rep.section("homology of P/I by block (arity weight | basis | ideal | homology | closed euler)")
    for b in _run_tasks(_homology_task, tasks, jobs):
        expected = {0: 1} if b.weight == 0 else {}
        good = b.closed and b.euler_ok() and b.homology == expected
        ok = ok and good
        lines.append(
            f"{'ok  ' if good else 'FAIL'} {b.arity} {b.weight} | {_fmt_dims(b.basis)} | {_fmt_dims(b.ideal)} | "
            f"{_fmt_dims(b.homology)} | {b.closed} {b.euler_ok()}"
        )
    rep.verdict = "pass" if ok else "fail"
    return rep


def _morphism_section(rep: TextReport, result: MorphismReport) -> bool:
    lines = rep.section(f"morphism {result.name} (caps arity {result.max_arity}, weight {result.max_weight})")
    for o in result.obligations:
        mark = {"ok": "ok  ", "fail": "FAIL", "skipped": "SKIP"}[o.status]
        lines.append(f"{mark} {o.label}" + (f"  [{o.detail}]" if o.detail else ""))
    if result.note:
        lines.append(f"note: {result.note}")
    lines.append(f"result: {result.verdict}")
    return result.verdict == "pass"


def run_check_morphism(name: str | None, path: str | None, index_cap: int, max_arity, max_weight) -> TextReport:
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(str(exc)) from None
        m = parse_morphism(text, os.path.dirname(os.path.abspath(path)), index_cap, os.path.basename(path))
        results = [check_morphism(m, max_arity, max_weight)]
        subject = m.name
    elif name == "composite":
        results = [composite_consistency(index_cap)]
        subject = "composite"
    elif name == "all":
        cache: dict = {}
        results = [check_morphism(builtin_morphism(n, index_cap, cache), max_arity, max_weight) for n in BUILTIN_MORPHISMS]
        results.append(composite_consistency(index_cap))
        subject = "all built-in morphisms"
    else:
        try:
            m = builtin_morphism(name, index_cap)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
        results = [check_morphism(m, max_arity, max_weight)]
        subject = name
    rep = TextReport("check-morphism", subject, [("index-cap", index_cap),
                                                 ("max-arity", "auto" if max_arity is None else max_arity),
                                                 ("max-weight", "auto" if max_weight is None else max_weight)])
    verdicts = []
    for r in results:
        _morphism_section(rep, r)
        verdicts.append(r.verdict)
    rep.verdict = "fail" if "fail" in verdicts else "incomplete" if "incomplete" in verdicts else "pass"
    return rep


# -- algebra -------------------------------------------------------------------------------


def _indexed(model: AlgebraModel, prefix: str) -> list:
    out = []
    n = 1
    while f"{prefix}_{n}" in model.operators:
        out.append(model.operators[f"{prefix}_{n}"])
        n += 1
    return out


def _assign_deltas(model: AlgebraModel) -> tuple[list, str]:
    A = model.algebra
    deltas = _indexed(model, "Delta")
    if deltas:
        return deltas, "Delta_n as given"
    ins = _indexed(model, "i")
    if ins:
        return [commutator(op, A.d) for op in ins], "Delta_n = [i_n,d]"
    if "Delta" in model.operators:
        return [model.operators["Delta"]], "Delta_1 = Delta"
    i, j = model.get("i", -2), model.get("j", -1)
    return [commutator(i, A.d), -(j.compose(i))], "Delta_1 = [i,d], Delta_2 = -ji"


def _assign_phis(model: AlgebraModel) -> tuple[list, str]:
    phis = _indexed(model, "phi")
    if phis:
        return phis, "phi_n as given"
    ins = _indexed(model, "i")
    if ins:
        return ins, "phi_n = i_n"
    return [model.get("i", -2)], "phi_1 = i"


def run_algebra(model: AlgebraModel, check: str, n: int, operator: str, z_order: int) -> TextReport:
    A = model.algebra
    rep = TextReport("algebra", model.name, [("check", check), ("dimension", A.dim)])
    problems = A.problems()
    if problems:
        lines = rep.section("algebra axioms")
        lines.extend(f"FAIL {p}" for p in problems[:10])
        rep.verdict = "fail"
        return rep
    rep.section("algebra axioms", ["ok   graded commutative, associative, d^2 = 0, d a derivation"])
    reports = []
    if check == "order":
        if operator == "d":
            D = A.d
        elif operator in model.operators:
            D = model.operators[operator]
        else:
            raise InputError(f"unknown operator {operator!r}")
        rep.params.append(("operator", operator))
        rep.params.append(("order", n))
        reports.append(check_diff_operator_order(A, D.named(operator), n))
    elif check in ("bv", "gerstenhaber"):
        if "Delta" in model.operators:
            delta, how = model.operators["Delta"], "Delta as given"
        else:
            delta, how = commutator(model.get("i", -2), A.d), "Delta = [i,d]"
        rep.params.append(("assignment", how))
        if check == "bv":
            reports.append(check_bv(A, delta))
        table = koszul_bracket(A, delta)
        reports.append(check_gerstenhaber(A, table))
        if check == "gerstenhaber":
            reports.append(check_shifted_lie(A, table))
    elif check == "ebv":
        reports.append(check_ebv(A, model.get("i", -2)))
    elif check == "jacobi":
        reports.append(check_jacobi_algebra(A, model.get("i", -2), model.get("j", -1)))
    elif check == "cbv":
        deltas, how = _assign_deltas(model)
        rep.params.append(("assignment", how))
        reports.append(check_cbv_infty(A, deltas))
    elif check == "ecbv":
        ins = _indexed(model, "i") or [model.get("i", -2)]
        reports.append(check_ecbv_algebra(A, ins))
    elif check == "trivialization":
        deltas, how = _assign_deltas(model)
        phis, how_phi = _assign_phis(model)
        rep.params.append(("assignment", f"{how}; {how_phi}"))
        rep.params.append(("z-order", z_order))
        reports.append(check_trivialization(A, deltas, phis, z_order))
    else:
        raise InputError(f"unknown check {check!r}")
    for r in reports:
        rep.add_check(r)
    rep.verdict = "pass" if all(r.passed for r in reports) else "fail"
    return rep


def run_check_sdr(path: str) -> TextReport:
    try:
        with open(path, encoding="utf-8") as fh:
            s = parse_sdr(fh.read())
    except OSError as exc:
        raise InputError(str(exc)) from None
    rep = TextReport("check-sdr", os.path.basename(path))
    problems = validate_sdr(s)
    lines = rep.section("strong deformation retract identities")
    lines.extend(f"FAIL {p}" for p in problems)
    if not problems:
        lines.append("ok   p i = 1, d h + h d = 1 - i p, i and p chain maps")
    rep.verdict = "pass" if not problems else "fail"
    return rep


def run_suite(max_arity: int, max_weight: int, index_cap: int, z_order: int, jobs: int) -> TextReport:
    """Every pipeline on every built-in, merged into one report."""
    rep = TextReport("suite", "built-ins", [("max-arity", max_arity), ("max-weight", max_weight),
                                            ("index-cap", index_cap), ("z-order", z_order)])
    verdicts = []

    def merge(sub: TextReport, label: str, required: bool = True) -> bool:
        for title, lines in sub.sections:
            rep.sections.append((f"{label}: {title}", lines))
        if required:
            rep.sections.append((f"{label}: verdict", [sub.verdict]))
            verdicts.append(sub.verdict)
        else:
            holds = "holds" if sub.verdict == "pass" else "does not hold"
            rep.sections.append((f"{label}: hypothesis", [holds]))
        return sub.verdict == "pass"

    for name in BUILTIN_NAMES:
        merge(run_verify_presentation(Source("builtin", name, index_cap), max_arity, max_weight, jobs),
              f"verify-presentation {name}")
    for name in ("EBV", "J", "ECBV"):
        merge(run_quasi_iso(Source("builtin", name, index_cap), max_arity, max_weight, jobs), f"quasi-iso {name}")
    merge(run_check_morphism("all", None, index_cap, None, None), "check-morphism")
    # implication chains run wherever their hypothesis holds
    for name in BUILTIN_ALGEBRAS:
        model = builtin_algebra(name)
        if merge(run_algebra(model, "ebv", 1, "d", z_order), f"algebra {name} ebv", required=False):
            for check in ("bv", "gerstenhaber", "ecbv"):
                merge(run_algebra(model, check, 1, "d", z_order), f"algebra {name} {check}")
        if merge(run_algebra(model, "jacobi", 1, "d", z_order), f"algebra {name} jacobi", required=False):
            for check in ("cbv", "trivialization"):
                merge(run_algebra(model, check, 1, "d", z_order), f"algebra {name} {check}")
    rep.sections.append(("summary", [f"{sum(v == 'pass' for v in verdicts)} of {len(verdicts)} pipelines pass"]))
    rep.verdict = "pass" if all(v == "pass" for v in verdicts) else "fail"
    return rep


# -- argument handling ------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("caps must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="operad-forge", description="Exact checks for DG operad presentations.")
    parser.add_argument("--version", action="version", version=f"operad-forge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, source=True, caps=True):
        if source:
            g = p.add_mutually_exclusive_group(required=True)
            g.add_argument("--builtin")
            g.add_argument("--file")
        if caps:
            p.add_argument("--max-arity", type=_positive, default=3)
            p.add_argument("--max-weight", type=_positive, default=3)
            p.add_argument("--index-cap", type=_positive, default=3)
        p.add_argument("--out")
        p.add_argument("--jobs", type=_positive, default=1)

    common(sub.add_parser("verify-presentation", help="sanity checks and the operad SDR on a presentation"))
    common(sub.add_parser("quasi-iso", help="ideal hypothesis and truncated homology of P/I"))
    p = sub.add_parser("check-morphism", help="check a morphism given on generators")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--builtin", help=f"one of {', '.join(BUILTIN_MORPHISMS)}, 'composite' or 'all'")
    g.add_argument("--file")
    p.add_argument("--max-arity", type=_positive, default=None)
    p.add_argument("--max-weight", type=_positive, default=None)
    p.add_argument("--index-cap", type=_positive, default=3)
    p.add_argument("--out")
    p.add_argument("--jobs", type=_positive, default=1)
    p = sub.add_parser("algebra", help="algebra-level checks on a finite model")
    common(p, caps=False)
    p.add_argument("--check", choices=ALGEBRA_CHECKS, required=True)
    p.add_argument("--n", type=_positive, default=1, help="order for --check order")
    p.add_argument("--operator", default="d", help="operator for --check order")
    p.add_argument("--z-order", type=_positive, default=4)
    p = sub.add_parser("check-sdr", help="validate a strong deformation retract file")
    p.add_argument("--file", required=True)
    p.add_argument("--out")
    p.add_argument("--jobs", type=_positive, default=1)
    p = sub.add_parser("suite", help="run every pipeline on every built-in")
    p.add_argument("--max-arity", type=_positive, default=3)
    p.add_argument("--max-weight", type=_positive, default=3)
    p.add_argument("--index-cap", type=_positive, default=3)
    p.add_argument("--z-order", type=_positive, default=4)
    p.add_argument("--out")
    p.add_argument("--jobs", type=_positive, default=1)
    return parser


def _presentation_source(args) -> Source:
    if args.builtin is not None:
        if args.builtin not in BUILTIN_NAMES:
            raise InputError(f"unknown presentation {args.builtin!r}; choose from {', '.join(BUILTIN_NAMES)}")
        return Source("builtin", args.builtin, args.index_cap)
    if args.file is None:
        raise InputError("give --builtin or --file")
    if not os.path.isfile(args.file):
        raise InputError(f"no such file: {args.file}")
    return Source("file", os.path.abspath(args.file), args.index_cap)


def _load_model(args) -> AlgebraModel:
    if args.builtin is not None:
        try:
            return builtin_algebra(args.builtin)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    if args.file is None:
        raise InputError("give --builtin or --file")
    try:
        with open(args.file, encoding="utf-8") as fh:
            return parse_algebra(fh.read(), name=os.path.basename(args.file))
    except OSError as exc:
        raise InputError(str(exc)) from None


def dispatch(args) -> TextReport:
    if args.command == "verify-presentation":
        return run_verify_presentation(_presentation_source(args), args.max_arity, args.max_weight, args.jobs)
    if args.command == "quasi-iso":
        return run_quasi_iso(_presentation_source(args), args.max_arity, args.max_weight, args.jobs)
    if args.command == "check-morphism":
        return run_check_morphism(args.builtin, args.file, args.index_cap, args.max_arity, args.max_weight)
    if args.command == "algebra":
        return run_algebra(_load_model(args), args.check, args.n, args.operator, args.z_order)
    if args.command == "check-sdr":
        return run_check_sdr(args.file)
    if args.command == "suite":
        return run_suite(args.max_arity, args.max_weight, args.index_cap, args.z_order, args.jobs)
    raise InputError(f"unknown command {args.command!r}")


@dataclass
class RunConfig:
    """Parsed command line; ``None`` caps on check-morphism mean "fit the obligations"."""

    command: str
    builtin: str | None = None
    file: str | None = None
    max_arity: int | None = 3
    max_weight: int | None = 3
    index_cap: int = 3
    z_order: int = 4
    out: str | None = None
    jobs: int = 1
    check: str | None = None
    n: int = 1
    operator: str = "d"

    def __post_init__(self):
        for key in ("max_arity", "max_weight", "index_cap", "z_order", "jobs", "n"):
            value = getattr(self, key)
            if value is not None and value < 1:
                raise InputError(f"{key.replace('_', '-')} must be positive")


def execute(cfg: RunConfig) -> tuple[int, str]:
    """Run one command; returns the exit code and the report text (empty on errors)."""
    try:
        rep = dispatch(cfg)
    except (InputError, ParseError, FormatError, ShapeError, AlgebraError, IllTyped, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT, ""
    except (UnsupportedConfig, Unsupported, NoHomotopy, NotWeightHomogeneous, OutsideCaps) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED, ""
    text = rep.render()
    if rep.verdict == "pass":
        return EXIT_PASS, text
    if rep.verdict == "incomplete":
        return EXIT_UNSUPPORTED, text
    return EXIT_FAIL, text


def cmd_verify_presentation(cfg: RunConfig) -> tuple[int, str]:
    return execute(replace(cfg, command="verify-presentation"))


def cmd_quasi_iso(cfg: RunConfig) -> tuple[int, str]:
    return execute(replace(cfg, command="quasi-iso"))


def cmd_check_morphism(cfg: RunConfig) -> tuple[int, str]:
    return execute(replace(cfg, command="check-morphism"))


def cmd_algebra(cfg: RunConfig) -> tuple[int, str]:
    return execute(replace(cfg, command="algebra"))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    code, text = execute(RunConfig(**fields))
    if text:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
