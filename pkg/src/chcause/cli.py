"""Command-line driver.

Exit codes: 0 success, 1 inconsistent family on a probability or cause
query, 2 parse or semantic error, 3 usage error.  Each non-zero exit
writes one machine-greppable reason line to stderr.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence, TextIO

from . import scenarios as sc
from .causes import (
    DEFAULT_THRESHOLD,
    Event,
    classify_cause,
    compare_intervention,
    event,
    event_probability,
    find_causes,
    find_common_causes,
)
from .dsl import ScenarioDoc, parse_scenario
from .errors import CHError, InconsistentFamily, ParseError
from .histories import HistoryFamily, check_consistency
from .numerics import DEFAULT_EPS, Tolerance
from .report import (
    common_cause_dict,
    consistency_dict,
    intervention_dict,
    new_report,
    probability_rows,
    render_text,
    to_json,
    verdict_dict,
)

EXIT_OK, EXIT_INCONSISTENT, EXIT_INVALID, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Context:
    def __init__(self, args: argparse.Namespace, scenario: dict):
        self.eps = args.eps
        self.threshold = args.threshold
        self.report = new_report(scenario, args.eps, args.threshold, args.seed)

    def family(self, key: str, fam: HistoryFamily, probabilities: bool = True) -> None:
        rep = check_consistency(fam, self.eps)
        self.report["families"][key] = consistency_dict(fam, rep)
        if probabilities:
            if not rep.consistent:
                raise InconsistentFamily(rep.max_offdiag)
            self.report["probabilities"][key] = probability_rows(rep)

    def prob(self, name: str, fam: HistoryFamily, e: Event) -> float:
        p = event_probability(fam, e, self.eps)
        self.report["observables"][name] = p
        return p

    def causes_of(self, fam: HistoryFamily, g: Event) -> None:
        for v in find_causes(fam, g, self.threshold, self.eps):
            self.report["verdicts"].append(verdict_dict(v))

    def verdict(self, fam: HistoryFamily, f: Event, g: Event) -> None:
        self.report["verdicts"].append(verdict_dict(classify_cause(fam, f, g, self.threshold, self.eps)))

    def common(self, fam: HistoryFamily, f: Event, g: Event) -> None:
        self.report["common_causes"].append(common_cause_dict(find_common_causes(fam, f, g, self.threshold, self.eps)))

    def compare(self, base: HistoryFamily, other: HistoryFamily, f: Event, g: Event) -> None:
        self.report["interventions"].append(intervention_dict(compare_intervention(base, other, f, g, self.eps)))


# -- argument types -----------------------------------------------------------


def _eps(text: str) -> float:
    try:
        return Tolerance(float(text)).eps
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _threshold(text: str) -> float:
    try:
        t = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < t <= 1:
        raise argparse.ArgumentTypeError("threshold must be in (0, 1]")
    return t


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _real(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError("angles must be finite")
    return x


def _axis(text: str) -> sc.SpinDirection:
    if text in sc.AXES:
        return sc.AXES[text]
    try:
        theta, phi = (_real(x) for x in text.split(","))
    except (ValueError, argparse.ArgumentTypeError):
        raise argparse.ArgumentTypeError(f"axis must be x, y, z or THETA,PHI in radians, got {text!r}") from None
    return sc.SpinDirection(theta, phi)


def _rotation(text: str) -> tuple[sc.SpinDirection, float]:
    axis, sep, angle = text.rpartition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"rotation must be AXIS:ANGLE, got {text!r}")
    return _axis(axis), _real(angle)


# -- demos ----------------------------------------------------------------------


def demo_beamsplitter(args, ctx: Context) -> None:
    params = sc.BeamsplitterParams(args.alpha, args.beta)
    fam = sc.build_beamsplitter(params, args.block_a, args.mirror, ctx.eps)
    ctx.family("base", fam)
    for label in ("Da", "Db", "absorbed", "D*a"):
        e = event(fam, "t2", label)
        if ctx.prob(f"Pr({label})", fam, e) > ctx.eps:
            ctx.causes_of(fam, e)
    if args.block_a or args.mirror:
        plain = sc.build_beamsplitter(params, tol=ctx.eps)
        ctx.family("unmodified", plain)
        for path, det in (("a", "Da"), ("b", "Db")):
            ctx.compare(plain, fam, event(fam, "t1", path), event(fam, "t2", det))


def demo_mach_zehnder(args, ctx: Context) -> None:
    params = sc.MachZehnderParams(args.phi_a, args.phi_b, args.bs2, args.block_a, args.block_b)
    fam = sc.build_mach_zehnder(params, args.intermediate, ctx.eps)
    ctx.family("base", fam)
    for label in ("Dc", "Dd", "absorbed"):
        e = event(fam, "t2", label)
        if ctx.prob(f"Pr({label})", fam, e) > ctx.eps and label != "absorbed":
            ctx.causes_of(fam, e)


def demo_spin_half(args, ctx: Context) -> None:
    fam = sc.build_spin_half(args.prep, args.measure, args.intermediate, ctx.eps)
    ctx.family("base", fam)
    mid = fam.pdis[0]
    for outcome in ("+", "-"):
        g = event(fam, "t2", outcome)
        if ctx.prob(f"Pr(pointer {outcome})", fam, g) > ctx.eps:
            if len(mid) > 1:
                for label in mid.labels:
                    ctx.verdict(fam, event(fam, "t1", label), g)
            else:
                ctx.causes_of(fam, g)


def demo_eprb(args, ctx: Context) -> None:
    fam = sc.build_eprb(args.alice, args.bob, args.bob_rotation, ctx.eps)
    ctx.family("base", fam)
    for a in "+-":
        for b in "+-":
            ctx.prob(f"Pr(A={a},B={b})", fam, sc.eprb_pointer_event(fam, a, b))
    ctx.report["observables"]["E"] = sc.eprb_correlation(fam, ctx.eps)
    ctx.report["observables"]["angle"] = args.alice.angle_to(args.bob)
    for side in ("alice", "bob"):
        for s in "+-":
            g = sc.eprb_pointer_event(fam, **{side: s})
            if event_probability(fam, g, ctx.eps) > ctx.eps:
                ctx.causes_of(fam, g)
    for a in "+-":
        for b in "+-":
            f, g = sc.eprb_pointer_event(fam, alice=a), sc.eprb_pointer_event(fam, bob=b)
            if event_probability(fam, sc.eprb_pointer_event(fam, a, b), ctx.eps) > ctx.eps:
                ctx.common(fam, f, g)
    if args.bob_rotation is not None:
        base = sc.build_eprb(args.alice, args.bob, tol=ctx.eps)
        ctx.family("unrotated", base)
        for b in "+-":
            ctx.compare(base, fam, sc.eprb_pointer_event(fam, alice="+"), sc.eprb_pointer_event(fam, bob=b))


def demo_charlie(args, ctx: Context) -> None:
    base = sc.build_charlie_model(False, ctx.eps)
    flipped = sc.build_charlie_model(True, ctx.eps)
    fam = flipped if args.flip_bob else base
    ctx.family("base", fam)
    if args.flip_bob:
        ctx.family("unmodified", base)
    for bit in "01":
        bob = str(int(bit) ^ int(args.flip_bob))
        a, b = event(fam, "t2", f"Alice={bit}"), event(fam, "t3", f"Bob={bob}")
        ctx.verdict(fam, a, b)
        ctx.common(fam, a, b)
    ctx.compare(base, flipped, event(base, "t2", "Alice=1"), event(base, "t3", "Bob=1"))


DEMOS: dict[str, Callable] = {
    "beamsplitter": demo_beamsplitter,
    "mach-zehnder": demo_mach_zehnder,
    "spin-half": demo_spin_half,
    "eprb": demo_eprb,
    "charlie": demo_charlie,
}


# -- document commands -----------------------------------------------------------


def _doc_families(doc: ScenarioDoc, ctx: Context, probabilities: bool) -> tuple[HistoryFamily, Optional[HistoryFamily]]:
    base = doc.base_family()
    ctx.family("base", base, probabilities)
    other = doc.intervened_family()
    if other is not None:
        rep = check_consistency(other, ctx.eps)
        ctx.family("intervened", other, probabilities and rep.consistent)
    return base, other


def cmd_check(doc: ScenarioDoc, ctx: Context) -> None:
    _doc_families(doc, ctx, probabilities=False)


def cmd_probs(doc: ScenarioDoc, ctx: Context) -> None:
    _doc_families(doc, ctx, probabilities=True)


def cmd_causes(doc: ScenarioDoc, ctx: Context) -> None:
    fam, _ = _doc_families(doc, ctx, probabilities=True)
    queries = [q for q in doc.queries if q.kind in ("cause", "causes", "common_cause")]
    if not queries:
        last = fam.pdis[-1]
        for label in last.labels:
            g = event(fam, fam.n_times, label)
            if event_probability(fam, g, ctx.eps) > ctx.eps:
                ctx.causes_of(fam, g)
    for q in queries:
        evs = [doc.event(e) for e in q.events]
        if q.kind == "cause":
            ctx.verdict(fam, *evs)
        elif q.kind == "causes":
            ctx.causes_of(fam, evs[0])
        else:
            ctx.common(fam, *evs)


def cmd_compare(doc: ScenarioDoc, ctx: Context) -> None:
    base, other = _doc_families(doc, ctx, probabilities=True)
    queries = [q for q in doc.queries if q.kind == "compare"]
    if other is None or not queries:
        raise CHError("document needs an 'intervened' family and at least one 'query compare'")
    if not check_consistency(other, ctx.eps).consistent:
        raise InconsistentFamily(check_consistency(other, ctx.eps).max_offdiag)
    for q in queries:
        ctx.compare(base, other, *(doc.event(e) for e in q.events))


FILE_COMMANDS = {"check": cmd_check, "probs": cmd_probs, "causes": cmd_causes, "compare": cmd_compare}


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--eps", type=_eps, default=DEFAULT_EPS, help="comparison tolerance (default 1e-9)")
    common.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD, help="cause threshold (default 1-1e-6)")
    common.add_argument("--json", action="store_true", help="write the structured report to stdout")
    common.add_argument("--seed", type=int, default=None, help="reserved; echoed in the report")

    p = _Parser(prog="chq", description="Consistent-histories probabilities and quantum causes.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    demo = sub.add_parser("demo", help="run a built-in gedanken experiment")
    demos = demo.add_subparsers(dest="demo", parser_class=_Parser)
    demos.required = True

    d = demos.add_parser("beamsplitter", parents=[common])
    d.add_argument("--alpha", type=_complex, default=complex(math.sqrt(0.5)))
    d.add_argument("--beta", type=_complex, default=complex(math.sqrt(0.5)))
    g = d.add_mutually_exclusive_group()
    g.add_argument("--block-a", action="store_true", help="absorb the photon on path a")
    g.add_argument("--mirror", action="store_true", help="deflect path a into detector D*a")

    d = demos.add_parser("mach-zehnder", parents=[common])
    d.add_argument("--bs2", action="store_true", help="insert the second beamsplitter")
    d.add_argument("--phi-a", type=_real, default=0.0)
    d.add_argument("--phi-b", type=_real, default=0.0)
    d.add_argument("--block-a", action="store_true")
    d.add_argument("--block-b", action="store_true")
    d.add_argument("--intermediate", choices=sc.INTERMEDIATE_CHOICES, default="trivial")

    d = demos.add_parser("spin-half", parents=[common])
    d.add_argument("--prep", type=_axis, default=sc.X_AXIS)
    d.add_argument("--measure", type=_axis, default=sc.Z_AXIS)
    d.add_argument("--intermediate", choices=sc.SPIN_FRAMEWORKS, default="along_measure")

    d = demos.add_parser("eprb", parents=[common])
    d.add_argument("--alice", type=_axis, default=sc.Z_AXIS)
    d.add_argument("--bob", type=_axis, default=sc.Z_AXIS)
    d.add_argument("--bob-rotation", type=_rotation, default=None, metavar="AXIS:ANGLE")

    d = demos.add_parser("charlie", parents=[common])
    d.add_argument("--flip-bob", action="store_true", help="Eve inverts the bit sent to Bob")

    for name in FILE_COMMANDS:
        f = sub.add_parser(name, parents=[common])
        f.add_argument("file", type=Path)
    return p


def _scenario(args) -> dict:
    if args.command == "demo":
        params = {
            k: (v.tag if isinstance(v, sc.SpinDirection) else str(v) if isinstance(v, (complex, tuple)) else v)
            for k, v in sorted(vars(args).items())
            if k not in ("command", "demo", "eps", "threshold", "json", "seed")
        }
        return {"kind": "demo", "name": args.demo, "params": params}
    return {"kind": "file", "name": args.file.name, "command": args.command}


def run(argv: Optional[Sequence[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage-error: {exc}", file=stderr)
        return EXIT_USAGE

    ctx = Context(args, _scenario(args))
    human = stderr if args.json else stdout
    code, reason = EXIT_OK, None
    try:
        if args.command == "demo":
            DEMOS[args.demo](args, ctx)
        else:
            try:
                source = args.file.read_bytes()
            except OSError as exc:
                print(f"usage-error: cannot read {args.file}: {exc.strerror}", file=stderr)
                return EXIT_USAGE
            doc = parse_scenario(source, args.eps)
            FILE_COMMANDS[args.command](doc, ctx)
    except InconsistentFamily as exc:
        code, reason = EXIT_INCONSISTENT, f"inconsistent-family max_offdiag={exc.max_offdiag:.6g}"
    except ParseError as exc:
        print(f"parse-error line={exc.line} column={exc.column}: {exc.message}", file=stderr)
        return EXIT_INVALID
    except (CHError, ValueError) as exc:
        name = type(exc).__name__
        kind = "invalid-document" if type(exc) is CHError else re.sub(r"(?<=[a-z0-9])(?=[A-Z])", "-", name).lower()
        print(f"semantic-error {kind}: {exc}", file=stderr)
        return EXIT_INVALID

    if reason is not None:
        ctx.report["error"] = {"kind": "inconsistent-family", "reason": reason}
    if args.json:
        stdout.write(to_json(ctx.report))
    human.write(render_text(ctx.report))
    if reason is not None:
        print(reason, file=stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
