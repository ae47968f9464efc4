"""Command-line front end: problem files in, deterministic reports out.

Four subcommands:

  compute <file> [--milnor] [--bound N] [--json]
      parse a problem file, run both Chern character routes plus the
      cycle and commutator identities, print a report
  verify (<file> | --random N --seed S)
      run the invariant suite on a file or on N seeded random instances;
      the first failing random instance is serialized for replay
  examples <name>
      run a built-in corpus instance against its golden report
  milnor "<poly>" --vars x,y,z
      Jacobian Groebner basis, standard monomials, Milnor number

Problem files are JSON with `#`-prefixed comment lines allowed (stripped
before parsing).  Parse-time validation mirrors the module invariants;
rejected inputs name the violated clause.  Reports are byte-stable for a
fixed input: the only nondeterministic lines are prefixed `# time:` and
carry no mathematical content.

Exit codes: 0 pass, 2 invalid input, 3 identity failure, 4 internal
consistency failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources

from .errors import (
    EngineError,
    IdentityFailure,
    InternalCheckFailure,
    InvalidInput,
)
from .forms import DiffForm, USeries, milnor_representative
from .groebner import (
    Infinite,
    buchberger,
    jacobian_ideal,
    milnor_number,
    standard_monomials,
)
from .hochschild import chern_via_chains
from .matform import Mat
from .modules import (
    Connection,
    CurvedAlgebra,
    CurvedModule,
    IdentityVerdict,
    check_module,
    chern_weil,
    commutator_check,
    connection_with_mu,
    cycle_check,
    levi_civita,
)
from .randomgen import random_module_instance
from .rings import GradedRing, RingElement, _mono_str

EXAMPLE_NAMES = ("mf-xy", "a1-ci", "s4-nonflat", "classical-free", "sphere-bundle")


# -- problem files -----------------------------------------------------


def strip_comments(text: str) -> str:
    """Drop `#`-prefixed lines so hand-written corpus files can carry notes."""
    return "\n".join(
        line for line in text.splitlines() if not line.lstrip().startswith("#")
    )


def canonical_spec(data: dict) -> str:
    return json.dumps(data, indent=1, sort_keys=True)


@dataclass
class Instance:
    """A parsed and validated problem: everything a report needs."""

    label: str
    data: dict
    ring: GradedRing
    algebra: CurvedAlgebra
    module: CurvedModule
    connection: Connection
    connection_kind: str
    options: dict = field(default_factory=dict)

    @property
    def sha256(self) -> str:
        return hashlib.sha256(canonical_spec(self.data).encode()).hexdigest()


def _require(cond: bool, clause: str) -> None:
    if not cond:
        raise InvalidInput(clause)


def _split_form_terms(text: str):
    """Split a form entry on top-level ` + ` / ` - `, keeping signs."""
    terms = []
    depth = 0
    sign = 1
    start = 0
    k = 0
    while k < len(text):
        c = text[k]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif depth == 0 and c == " " and text[k + 1 : k + 3] in ("+ ", "- "):
            terms.append((sign, text[start:k]))
            sign = 1 if text[k + 1] == "+" else -1
            start = k + 3
            k += 2
        k += 1
    terms.append((sign, text[start:]))
    return terms


def parse_form_entry(ring: GradedRing, text: str) -> DiffForm:
    """One-form matrix entries: sums of `poly*d(var)` terms (or `0`)."""
    text = text.strip()
    if text in ("0", ""):
        return DiffForm.zero(ring)
    out = DiffForm.zero(ring)
    for sign, term in _split_form_terms(text):
        term = term.strip()
        if term.startswith("d(") and term.endswith(")"):
            poly, var = "1", term[2:-1]
        elif term.startswith("-d(") and term.endswith(")"):
            poly, var = "-1", term[3:-1]
        else:
            cut = term.rfind("*d(")
            _require(
                cut >= 0 and term.endswith(")"),
                f"connection block: cannot read one-form term {term!r} "
                "(expected poly*d(var))",
            )
            poly, var = term[:cut], term[cut + 3 : -1]
        _require(
            var in ring.variables,
            f"connection block: unknown variable {var!r} in one-form entry",
        )
        piece = DiffForm.from_ring(ring.from_string(poly)).wedge(
            DiffForm.d_var(ring, var)
        )
        out = out + (piece if sign > 0 else -piece)
    return out


def parse_instance(text: str, label: str) -> Instance:
    """Validate a problem file; every violated clause is named."""
    try:
        data = json.loads(strip_comments(text))
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"problem file is not valid JSON: {exc}") from exc
    _require(isinstance(data, dict), "problem file: top level must be an object")
    known = {"ring", "curved", "module", "connection", "options"}
    for key in data:
        _require(key in known, f"problem file: unknown block {key!r}")
    _require("ring" in data, "problem file: missing ring block")
    _require("module" in data, "problem file: missing module block")

    rb = data["ring"]
    _require(isinstance(rb, dict), "ring block: must be an object")
    for key in rb:
        _require(
            key in {"grading", "variables", "degrees", "relation"},
            f"ring block: unknown key {key!r}",
        )
    grading = rb.get("grading", "Z2")
    _require(grading in ("Z", "Z2"), "ring block: grading must be Z or Z2")
    variables = rb.get("variables")
    _require(
        isinstance(variables, list) and variables, "ring block: variables required"
    )
    degrees = rb.get("degrees", [0] * len(variables))
    _require(
        isinstance(degrees, list) and len(degrees) == len(variables),
        "ring block: one degree per variable required",
    )
    ring = GradedRing(
        tuple(variables),
        tuple(int(d) for d in degrees),
        grading=grading,
        relation=rb.get("relation"),
    )

    cb = data.get("curved", {})
    _require(isinstance(cb, dict), "curved block: must be an object")
    for key in cb:
        _require(key == "h", f"curved block: unknown key {key!r}")
    algebra = CurvedAlgebra(ring, ring.from_string(cb.get("h", "0")))

    mb = data["module"]
    _require(isinstance(mb, dict), "module block: must be an object")
    for key in mb:
        _require(
            key in {"degrees", "idempotent", "delta"},
            f"module block: unknown key {key!r}",
        )
    _require("degrees" in mb and "delta" in mb, "module block: degrees and delta required")
    module = CurvedModule.from_stored(
        algebra, mb["degrees"], mb["delta"], idempotent_rows=mb.get("idempotent")
    )
    verdict = check_module(module)
    if not verdict.ok:
        raise InvalidInput("module block: " + "; ".join(verdict.failures))

    nb = data.get("connection", {"kind": "levi-civita"})
    _require(isinstance(nb, dict), "connection block: must be an object")
    kind = nb.get("kind", "levi-civita")
    if kind == "levi-civita":
        for key in nb:
            _require(key == "kind", f"connection block: unknown key {key!r}")
        connection = levi_civita(module)
    elif kind == "explicit":
        for key in nb:
            _require(key in {"kind", "mu"}, f"connection block: unknown key {key!r}")
        _require("mu" in nb, "connection block: explicit kind requires mu rows")
        rows = nb["mu"]
        _require(
            isinstance(rows, list) and len(rows) == len(module.degrees),
            "connection block: mu must be a square matrix over the basis",
        )
        mu = Mat.from_stored(
            ring,
            module.degrees,
            [[parse_form_entry(ring, v) for v in row] for row in rows],
        )
        connection = connection_with_mu(module, mu)
    else:
        raise InvalidInput("connection block: kind must be levi-civita or explicit")

    ob = data.get("options", {})
    _require(isinstance(ob, dict), "options block: must be an object")
    for key in ob:
        _require(
            key in {"milnor", "bound", "seed"}, f"options block: unknown key {key!r}"
        )
    return Instance(label, data, ring, algebra, module, connection, kind, dict(ob))


def load_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read problem file: {exc}") from exc
    return parse_instance(text, path)


# -- serialization (random instances, for replay) ----------------------


def _ring_entry_str(v: USeries) -> str:
    form = v.coefficient(0)
    return str(form.coefficient(()))


def _form_entry_str(v: USeries) -> str:
    return str(v.coefficient(0))


def instance_to_spec(M: CurvedModule, C: Connection) -> dict:
    """Serialize a module/connection pair in the problem-file format."""
    ring = M.ring
    data: dict = {
        "ring": {
            "grading": ring.grading,
            "variables": list(ring.variables),
            "degrees": list(ring.degrees),
        },
        "curved": {"h": str(M.algebra.h)},
        "module": {
            "degrees": list(M.degrees),
            "idempotent": [
                [_ring_entry_str(v) for v in row] for row in M.e.display()
            ],
            "delta": [[_ring_entry_str(v) for v in row] for row in M.delta.display()],
        },
    }
    if ring.relation is not None:
        data["ring"]["relation"] = str(ring.relation)
    if C.theta.is_zero():
        data["connection"] = {"kind": "levi-civita"}
    else:
        data["connection"] = {
            "kind": "explicit",
            "mu": [[_form_entry_str(v) for v in row] for row in C.theta.display()],
        }
    return data


# -- the invariant suite -----------------------------------------------


@dataclass
class SuiteResult:
    """Everything cmd_compute and cmd_verify report."""

    ch_weil: USeries
    ch_chains: USeries
    routes_equal: bool
    first_mismatch: int | None
    cycle: IdentityVerdict
    commutator: IdentityVerdict
    milnor_f: RingElement | None = None
    milnor_rep: RingElement | None = None
    timing: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.routes_equal and self.cycle.ok and self.commutator.ok


def run_suite(
    M: CurvedModule, C: Connection, *, bound: int | None = None, milnor: bool = False
) -> SuiteResult:
    timing: dict[str, float] = {}
    t0 = time.monotonic()
    ch_weil = chern_weil(M, C)
    timing["chern_weil"] = time.monotonic() - t0
    t0 = time.monotonic()
    ch_chains = chern_via_chains(M, C)
    timing["chern_via_chains"] = time.monotonic() - t0
    diff = ch_weil - ch_chains
    routes_equal = diff.is_zero()
    first_mismatch = None if routes_equal else min(diff.coeffs)
    t0 = time.monotonic()
    cycle = cycle_check(M, C, bound, ch=ch_weil)
    commutator = commutator_check(M, C, bound)
    timing["identity_checks"] = time.monotonic() - t0
    result = SuiteResult(
        ch_weil, ch_chains, routes_equal, first_mismatch, cycle, commutator,
        timing=timing,
    )
    if milnor:
        f = -M.algebra.h
        if f.is_zero():
            raise InvalidInput("milnor reduction needs a nonzero curvature h")
        top = ch_weil.coefficient(0).component(M.ring.nvars)
        result.milnor_f = f
        result.milnor_rep = milnor_representative(top, f)
    return result


def _raise_on_failure(res: SuiteResult) -> None:
    if not res.routes_equal:
        J = res.first_mismatch
        raise IdentityFailure(
            f"route mismatch at u^{J}: chern-weil gives "
            f"{res.ch_weil.coefficient(J)}, chain route gives "
            f"{res.ch_chains.coefficient(J)}"
        )
    if not res.cycle.ok:
        raise IdentityFailure(f"cycle check failed: {res.cycle.detail}")
    if not res.commutator.ok:
        raise IdentityFailure(f"commutator check failed: {res.commutator.detail}")


# -- reports -----------------------------------------------------------


def _verdict_text(v: IdentityVerdict) -> str:
    mode = v.mode if not v.detail else f"{v.mode}, {v.detail}"
    return f"{'ok' if v.ok else 'FAIL'} [{mode}]"


def _useries_lines(p: USeries) -> list[str]:
    if p.is_zero():
        return ["  (zero)"]
    return [f"  u^{J}: {p.coeffs[J]}" for J in sorted(p.coeffs)]


def render_report(inst: Instance, res: SuiteResult, *, timing: bool = True) -> str:
    ring = inst.ring
    trace_e = ring.zero()
    for k in range(len(inst.module.degrees)):
        trace_e = trace_e + inst.module.e.entry(k, k).coefficient(0).coefficient(())
    lines = [
        "curvedchern report",
        "==================",
        f"input: {inst.label}",
        f"sha256: {inst.sha256}",
        f"ring: {', '.join(ring.variables)} | grading {ring.grading}"
        f" | degrees {', '.join(str(d) for d in ring.degrees)}"
        f" | relation: {ring.relation if ring.relation is not None else 'none'}",
        f"h: {inst.algebra.h}",
        f"module: ambient rank {len(inst.module.degrees)}"
        f" | trace(e) = {trace_e}"
        f" | basis degrees {', '.join(str(d) for d in inst.module.degrees)}",
        f"connection: {inst.connection_kind}",
        "check_module: ok",
        f"realized curvature: delta^2 = -(h)*e with h = {inst.algebra.h} [exact]",
        "chern character (chern-weil):",
        *_useries_lines(res.ch_weil),
        "chern character (chain route):",
        *_useries_lines(res.ch_chains),
        f"route agreement: {'exact' if res.routes_equal else 'MISMATCH'}",
        f"cycle check (u*d + dh): {_verdict_text(res.cycle)}",
        f"commutator check ([u*nabla + delta, R] = dh*e): {_verdict_text(res.commutator)}",
    ]
    if res.milnor_rep is not None:
        lines.append(
            f"milnor representative (u^0 top part, f = {res.milnor_f}): {res.milnor_rep}"
        )
    lines.extend(["input echo:", canonical_spec(inst.data)])
    if timing:
        for name in sorted(res.timing):
            lines.append(f"# time: {name} {res.timing[name]:.3f}s")
    return "\n".join(lines) + "\n"


def render_json(inst: Instance, res: SuiteResult) -> str:
    doc = {
        "input": inst.label,
        "sha256": inst.sha256,
        "spec": inst.data,
        "chern_weil": {f"u^{J}": str(res.ch_weil.coeffs[J]) for J in res.ch_weil.coeffs},
        "chern_chains": {
            f"u^{J}": str(res.ch_chains.coeffs[J]) for J in res.ch_chains.coeffs
        },
        "route_agreement": res.routes_equal,
        "cycle_check": {"ok": res.cycle.ok, "mode": res.cycle.mode, "detail": res.cycle.detail},
        "commutator_check": {
            "ok": res.commutator.ok,
            "mode": res.commutator.mode,
            "detail": res.commutator.detail,
        },
        "milnor_representative": (
            None if res.milnor_rep is None else str(res.milnor_rep)
        ),
        "timing": {k: round(v, 6) for k, v in res.timing.items()},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- subcommands -------------------------------------------------------


def cmd_compute(args) -> int:
    inst = load_instance(args.file)
    bound = args.bound if args.bound is not None else inst.options.get("bound")
    milnor = bool(args.milnor or inst.options.get("milnor"))
    res = run_suite(inst.module, inst.connection, bound=bound, milnor=milnor)
    if args.json:
        sys.stdout.write(render_json(inst, res))
    else:
        sys.stdout.write(render_report(inst, res))
    _raise_on_failure(res)
    return 0


def cmd_verify(args) -> int:
    if args.random is not None:
        if args.seed is None:
            raise InvalidInput("--random requires an explicit --seed")
        return _verify_random(args.random, args.seed)
    if args.file is None:
        raise InvalidInput("verify needs a problem file or --random N --seed S")
    inst = load_instance(args.file)
    bound = inst.options.get("bound")
    res = run_suite(inst.module, inst.connection, bound=bound)
    print(f"verify {inst.label}")
    print("PASS check_module")
    print(f"{'PASS' if res.routes_equal else 'FAIL'} route equivalence")
    print(f"{'PASS' if res.cycle.ok else 'FAIL'} cycle check [{res.cycle.mode}]")
    print(
        f"{'PASS' if res.commutator.ok else 'FAIL'} commutator check"
        f" [{res.commutator.mode}]"
    )
    _raise_on_failure(res)
    return 0


def _verify_random(count: int, seed: int) -> int:
    for k in range(count):
        s = seed + k
        M, C = random_module_instance(s)
        res = run_suite(M, C)
        status = "PASS" if res.ok else "FAIL"
        powers = ",".join(str(J) for J in res.ch_weil.u_powers()) or "-"
        print(
            f"{status} instance {k:02d} (seed {s}): ring {len(M.ring.variables)} vars"
            f" {M.ring.grading}, rank {len(M.degrees)}, u-powers {powers}"
        )
        if not res.ok:
            out = f"failing-instance-{s}.json"
            with open(out, "w", encoding="utf-8") as fh:
                json.dump(instance_to_spec(M, C), fh, indent=2, sort_keys=True)
                fh.write("\n")
            print(f"failing instance written to {out}")
            _raise_on_failure(res)
    print(f"all {count} random instances passed")
    return 0


def _corpus_text(filename: str) -> str:
    return (resources.files("curvedchern") / "corpus" / filename).read_text(
        encoding="utf-8"
    )


def _load_golden(name: str) -> str:
    return _corpus_text(f"{name.replace('-', '_')}.golden.txt")


def cmd_examples(args) -> int:
    name = args.name
    if name not in EXAMPLE_NAMES:
        raise InvalidInput(
            f"unknown example {name!r}; choose from {', '.join(EXAMPLE_NAMES)}"
        )
    inst = parse_instance(
        _corpus_text(f"{name.replace('-', '_')}.json"), f"examples:{name}"
    )
    res = run_suite(
        inst.module,
        inst.connection,
        bound=inst.options.get("bound"),
        milnor=bool(inst.options.get("milnor")),
    )
    report = render_report(inst, res, timing=False)
    sys.stdout.write(report)
    _raise_on_failure(res)
    golden = _load_golden(name)
    if report != golden:
        print("golden report mismatch:")
        gotn = report.splitlines()
        want = golden.splitlines()
        for k in range(max(len(gotn), len(want))):
            g = gotn[k] if k < len(gotn) else "<missing>"
            w = want[k] if k < len(want) else "<missing>"
            if g != w:
                print(f"  line {k + 1}: got  {g}")
                print(f"  line {k + 1}: want {w}")
        raise InternalCheckFailure(f"report for {name} differs from its golden file")
    print("golden: match")
    return 0


def cmd_milnor(args) -> int:
    names = [v.strip() for v in args.vars.split(",") if v.strip()]
    if not names:
        raise InvalidInput("--vars needs a comma-separated list of variable names")
    ring = GradedRing(tuple(names), (0,) * len(names), grading="Z2")
    f = ring.from_string(args.poly)
    G = buchberger(jacobian_ideal(f))
    print(f"f = {f}")
    print("jacobian groebner basis:")
    for g in G.elements:
        print(f"  {g}")
    sm = standard_monomials(G)
    if isinstance(sm, Infinite):
        print(f"standard monomials: infinite ({sm.reason})")
        print("milnor number: infinite (non-isolated critical locus)")
        return 0
    shown = ", ".join(_mono_str(ring, m) or "1" for m in sm) or "(none)"
    print(f"standard monomials: {shown}")
    mu = milnor_number(f)
    print(f"milnor number: {mu}")
    return 0


# -- entry point -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvedchern",
        description="Exact Chern characters of curved modules, two ways.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="run both routes on a problem file")
    p.add_argument("file")
    p.add_argument("--milnor", action="store_true", help="reduce the u^0 top form")
    p.add_argument("--bound", type=int, default=None, help="degree bound for mod-relation checks")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="invariant suite on a file or random instances")
    p.add_argument("file", nargs="?", default=None)
    p.add_argument("--random", type=int, default=None, metavar="N")
    p.add_argument("--seed", type=int, default=None, metavar="S")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("examples", help="run a built-in example against its golden report")
    p.add_argument("name", help=f"one of: {', '.join(EXAMPLE_NAMES)}")
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("milnor", help="Milnor number of an isolated singularity")
    p.add_argument("poly")
    p.add_argument("--vars", required=True, help="comma-separated variable names")
    p.set_defaults(func=cmd_milnor)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except IdentityFailure as exc:
        print(f"identity failure: {exc}", file=sys.stderr)
        return 3
    except InternalCheckFailure as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 4
    except EngineError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
