"""Command-line front end: ``modalip <subcommand> ...``.

Exit codes: 0 positive answer, 1 negative answer, 2 usage or parse error,
3 a size or time guard tripped.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import ExitStack
from typing import Optional, Sequence

from . import bench, ksat, nabla, quasimodel, semantics, sequent, verify
from .errors import ModalError, NotValidError, ParseError, PreconditionError, ResourceGuardError
from .formula import Formula, expand_nabla, modal_depth, nnf, polarity, sig, size_dag, size_string
from .interpolation import METHODS, interpolate
from .limits import deadline, type_limit
from .parsing import parse, to_text

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit on its own; we want our exit code mapping
        raise _UsageError(f"{self.prog}: {message}")


def _read(arg: str) -> str:
    if arg.startswith("@"):
        try:
            with open(arg[1:], encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as exc:
            raise _UsageError(f"cannot read {arg[1:]}: {exc}") from None
    return arg


def _formula(arg: str) -> Formula:
    return parse(_read(arg))


def _model(arg: str):
    text = _read(arg)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        try:
            return semantics.load_model(text)
        except (OSError, json.JSONDecodeError) as exc:
            raise _UsageError(f"cannot read model {arg!r}: {exc}") from None
    return semantics.model_from_dict(data)


def _letters(text: Optional[str]) -> list[str]:
    return [p.strip() for p in (text or "").split(",") if p.strip()]


class _Out:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.data: dict = {}
        self.lines: list[str] = []

    def text(self, line: str) -> None:
        self.lines.append(line)

    def emit(self) -> None:
        if self.fmt == "json":
            print(json.dumps(self.data, indent=2, sort_keys=True))
        else:
            for line in self.lines:
                print(line)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_parse(a, out: _Out) -> int:
    f = _formula(a.formula)
    pol = polarity(f)
    out.data = {"formula": to_text(f), "signature": sorted(sig(f)), "modal_depth": modal_depth(f),
                "size_dag": size_dag(f), "polarity": pol.to_dict()}
    if "nabla" not in to_text(f):
        out.data["size_string"] = size_string(f)
    out.text(to_text(f))
    return EXIT_OK


def _cmd_nnf(a, out: _Out) -> int:
    g = nnf(expand_nabla(_formula(a.formula)))
    out.data = {"formula": to_text(g)}
    out.text(to_text(g))
    return EXIT_OK


def _cmd_nabla_nf(a, out: _Out) -> int:
    g = nabla.to_nabla_nf(_formula(a.formula))
    out.data = {"formula": to_text(g)}
    out.text(to_text(g))
    return EXIT_OK


def _cmd_sat(a, out: _Out) -> int:
    f = _formula(a.formula)
    if a.explain and a.engine == "exact":
        trace = quasimodel.eliminate(f, quasimodel.BOT, seed=a.seed)
    else:
        trace = None
    res = quasimodel.satisfiable(f, engine=a.engine)
    out.data = {"satisfiable": res.satisfiable,
                "witness": res.witness.to_dict() if res.witness is not None else None}
    out.text("SAT" if res.satisfiable else "UNSAT")
    if trace is not None:
        out.data["trace"] = trace.to_dict()
        for k, (t, reason) in enumerate(trace.steps):
            out.text(f"  step {k}: removed {_type_text(t)}  because {_reason_text(reason)}")
        out.text(f"  surviving types: {len(trace.final)}")
    if res.witness is not None and (a.explain or a.report):
        out.text("witness: " + json.dumps(res.witness.to_dict(), sort_keys=True))
    return EXIT_OK if res.satisfiable else EXIT_NEGATIVE


def _type_text(t) -> str:
    left = ", ".join(sorted(to_text(f) for f in t.left))
    right = ", ".join(sorted(to_text(f) for f in t.right))
    return f"({{{left}}}, {{{right}}})"


def _reason_text(r) -> str:
    d = r.to_dict()
    return " ".join(f"{k}={v}" for k, v in sorted(d.items()))


def _cmd_valid(a, out: _Out) -> int:
    phi = _formula(a.phi)
    psi = _formula(a.psi) if a.psi is not None else None
    if psi is None:
        phi, psi = quasimodel.TOP, phi
    ok = quasimodel.is_valid_implication(phi, psi)
    out.data = {"valid": ok}
    out.text("VALID" if ok else "INVALID")
    if not ok and (a.explain or a.report or a.format == "json"):
        cm = quasimodel.countermodel(phi, psi)
        out.data["countermodel"] = cm.to_dict()
        out.text("countermodel: " + json.dumps(cm.to_dict(), sort_keys=True))
    return EXIT_OK if ok else EXIT_NEGATIVE


def _cmd_interpolate(a, out: _Out) -> int:
    phi, psi = _formula(a.phi), _formula(a.psi)
    methods = list(METHODS) if a.method == "all" else [a.method]
    results = []
    status = EXIT_OK
    for m in methods:
        try:
            theta = interpolate(phi, psi, m)
        except NotValidError as exc:
            out.data = {"valid": False, "error": str(exc)}
            out.text(f"INVALID: {exc}")
            cm = ksat.countermodel(phi, psi)
            if cm is not None:
                out.data["countermodel"] = cm.to_dict()
                if a.explain or a.report:
                    out.text("countermodel: " + json.dumps(cm.to_dict(), sort_keys=True))
            return EXIT_NEGATIVE
        rep = verify.check_lyndon(expand_nabla(theta), phi, psi)
        entry = {"method": m, "interpolant": to_text(theta), "verified": rep.ok, "report": rep.to_dict()}
        results.append(entry)
        label = f"[{m}] " if len(methods) > 1 else ""
        out.text(f"{label}{to_text(theta)}")
        summary = (f"{label}verified: left={rep.left_valid} right={rep.right_valid} "
                   f"signature={rep.signature_ok} lyndon={rep.lyndon_ok} "
                   f"size_string={rep.size_string} size_dag={rep.size_dag}")
        out.text(summary)
        if a.report:
            out.text(f"{label}report: " + json.dumps(rep.to_dict(), sort_keys=True))
        if not rep.left_valid or not rep.right_valid or not rep.signature_ok:
            status = EXIT_NEGATIVE
    if len(methods) > 1:
        flat = [expand_nabla(parse(r["interpolant"])) for r in results]
        agree = all(verify.equivalent(flat[0], g) for g in flat[1:])
        out.text(f"all methods equivalent: {agree}")
        out.data = {"results": results, "equivalent": agree}
    else:
        out.data = results[0]
    return status


def _cmd_uniform(a, out: _Out) -> int:
    f = _formula(a.formula)
    u = nabla.uniform_interpolant(f, _letters(a.keep))
    out.data = {"uniform_interpolant": to_text(u), "expanded": to_text(expand_nabla(u))}
    out.text(to_text(u))
    if a.explain:
        out.text("expanded: " + to_text(expand_nabla(u)))
    return EXIT_OK


def _cmd_check_model(a, out: _Out) -> int:
    m = _model(a.model)
    f = _formula(a.formula)
    if isinstance(m, semantics.PointedModel):
        model, point = m.model, a.world or m.point
    else:
        if a.world is None:
            raise _UsageError("the model has no point; pass --world")
        model, point = m, a.world
    truth = semantics.eval_formula(model, point, f)
    out.data = {"world": point, "holds": truth}
    if a.explain:
        out.data["truth_set"] = sorted(model.truth_set(f))
    out.text("TRUE" if truth else "FALSE")
    if a.explain:
        out.text("holds at: " + ", ".join(sorted(model.truth_set(f))))
    return EXIT_OK if truth else EXIT_NEGATIVE


def _cmd_bisim(a, out: _Out) -> int:
    m1, m2 = _model(a.left), _model(a.right)
    k1 = m1.model if isinstance(m1, semantics.PointedModel) else m1
    k2 = m2.model if isinstance(m2, semantics.PointedModel) else m2
    letters = _letters(a.letters) if a.letters else sorted(k1.signature | k2.signature)
    z = semantics.largest_bisimulation(k1, k2, letters)
    pairs = sorted(z.pairs)
    out.data = {"signature": sorted(z.signature), "relation": [list(p) for p in pairs]}
    if isinstance(m1, semantics.PointedModel) and isinstance(m2, semantics.PointedModel):
        ok = (m1.point, m2.point) in z.pairs
        out.data["bisimilar"] = ok
        out.text("BISIMILAR" if ok else "NOT BISIMILAR")
        status = EXIT_OK if ok else EXIT_NEGATIVE
    else:
        ok = bool(pairs)
        status = EXIT_OK if ok else EXIT_NEGATIVE
    if a.explain or not isinstance(m1, semantics.PointedModel) or not isinstance(m2, semantics.PointedModel):
        out.text("largest bisimulation: " + " ".join(f"({w},{v})" for w, v in pairs))
    return status


def _cmd_prove(a, out: _Out) -> int:
    if a.psi is not None:
        s = sequent.Sequent.of([sequent.desugar(_formula(a.target))], [sequent.desugar(_formula(a.psi))])
    else:
        text = _read(a.target)
        if "=>" in text:
            s = sequent.Sequent.parse(text)
        else:
            s = sequent.Sequent.of([], [sequent.desugar(parse(text))])
    pt = sequent.prove(s)
    out.data = {"sequent": str(s), "provable": pt is not None}
    out.text("PROVABLE" if pt is not None else "NOT PROVABLE")
    if pt is not None:
        out.data["proof"] = pt.to_dict()
        if a.explain:
            out.text(pt.render())
        if a.psi is not None:
            chi = sequent.craig_via_sequent(_formula(a.target), _formula(a.psi))
            out.data["interpolant"] = to_text(chi)
            out.text("interpolant: " + to_text(chi))
    return EXIT_OK if pt is not None else EXIT_NEGATIVE


def _cmd_bench(a, out: _Out) -> int:
    if a.family != "lower-bound":
        raise _UsageError(f"unknown bench family {a.family!r}")
    methods = list(METHODS) if a.method == "all" else [a.method]
    rows = bench.run_bench(n_max=a.n, n_min=a.n_min or a.n, methods=methods,
                           timeout_ms=a.timeout_ms, jobs=a.jobs)
    if a.format == "json":
        print(bench.rows_to_json(rows))
    elif a.format == "csv":
        sys.stdout.write(bench.rows_to_csv(rows))
    else:
        for r in rows:
            out.text(f"n={r.n} {r.method:<10} string={r.size_string} dag={r.size_dag} "
                     f"ms={r.millis:.1f} verified={r.verified}" + (f" error={r.error}" if r.error else ""))
        out.emit()
    return EXIT_OK if all(r.verified for r in rows) else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = _ArgumentParser(add_help=False)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--format", choices=["text", "json", "csv"], default=None)
    fmt.add_argument("--json", action="store_true", help="same as --format json")
    p.add_argument("--report", action="store_true", help="print the full verification report")
    p.add_argument("--explain", action="store_true", help="print the elimination trace or proof tree")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized elimination orders")
    p.add_argument("--max-types", type=int, default=None, help="cap on combined types")
    p.add_argument("--timeout-ms", type=float, default=None, help="wall-clock limit")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for bench sweeps")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    root = _ArgumentParser(prog="modalip", description="Interpolation toolkit for the modal logic K.")
    sub = root.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("parse", "parse and pretty-print a formula")
    p.add_argument("formula")
    p.set_defaults(run=_cmd_parse)
    p = add("nnf", "negation normal form")
    p.add_argument("formula")
    p.set_defaults(run=_cmd_nnf)
    p = add("nabla-nf", "cover-modality normal form")
    p.add_argument("formula")
    p.set_defaults(run=_cmd_nabla_nf)
    p = add("sat", "satisfiability by type elimination")
    p.add_argument("formula")
    p.add_argument("--engine", choices=["exact", "lazy"], default="exact")
    p.set_defaults(run=_cmd_sat)
    p = add("valid", "validity of a formula, or of PHI -> PSI")
    p.add_argument("phi")
    p.add_argument("psi", nargs="?")
    p.set_defaults(run=_cmd_valid)
    p = add("interpolate", "Craig interpolant for a valid PHI -> PSI")
    p.add_argument("phi")
    p.add_argument("psi")
    p.add_argument("--method", choices=list(METHODS) + ["all"], default="quasimodel")
    p.set_defaults(run=_cmd_interpolate)
    p = add("uniform", "uniform interpolant over the kept letters")
    p.add_argument("formula")
    p.add_argument("--keep", required=True, help="comma-separated letters to keep")
    p.set_defaults(run=_cmd_uniform)
    p = add("check-model", "evaluate a formula on a JSON model")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--world", default=None)
    p.set_defaults(run=_cmd_check_model)
    p = add("bisim", "largest bisimulation between two JSON models")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--letters", default=None, help="comma-separated signature (default: all letters)")
    p.set_defaults(run=_cmd_bisim)
    p = add("prove", "sequent proof search; 'A, B => C' or PHI PSI")
    p.add_argument("target")
    p.add_argument("psi", nargs="?")
    p.set_defaults(run=_cmd_prove)
    p = add("bench", "size and time table on the lower-bound family")
    p.add_argument("family", choices=["lower-bound"])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--method", choices=list(METHODS) + ["all"], default="all")
    p.set_defaults(run=_cmd_bench)
    return root


_COMMANDS = ("parse", "nnf", "nabla-nf", "sat", "valid", "interpolate", "uniform",
             "check-model", "bisim", "prove", "bench")


def _flags_after_command(argv: list[str]) -> list[str]:
    """Allow shared flags before the subcommand by moving them behind it."""
    for i, tok in enumerate(argv):
        if tok in _COMMANDS:
            return [tok] + argv[i + 1:] + argv[:i] if i else argv
        if not tok.startswith("-") and (i == 0 or not argv[i - 1].startswith("--")):
            break
    return argv


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = _flags_after_command(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.json:
        args.format = "json"
    if args.format is None:
        args.format = "text"
    if args.format == "csv" and args.command != "bench":
        print("modalip: --format csv is only available for bench", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "bench" and args.n < 1:
        print("modalip: --n must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    out = _Out(args.format)
    try:
        with ExitStack() as stack:
            stack.enter_context(deadline(args.timeout_ms))
            stack.enter_context(type_limit(args.max_types))
            code = args.run(args, out)
    except _UsageError as exc:
        print(f"modalip: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"modalip: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceGuardError as exc:
        print(f"modalip: limit reached: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except NotValidError as exc:
        print(f"modalip: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (PreconditionError, ModalError) as exc:
        print(f"modalip: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command != "bench":
        out.emit()
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
