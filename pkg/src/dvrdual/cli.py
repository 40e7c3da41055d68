"""Command-line front end.

One subcommand per computation (`snf`, `dual`, `pair`, `double-dual`,
`square`, `ell`, `transport`, `torsion-count`, `zdelta`) plus `verify`,
which runs the whole property suite and emits a machine-readable report.

Exit codes: 0 on success, 1 when a checked property fails, 2 on
usage/parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .circle import (
    CircleElem,
    adjoint_transport,
    ell,
    ell_inv,
    torsion_count,
    zd_delta_complex,
    zdelta_validate,
    zdf_make,
)
from .duality import (
    DualElem,
    check_inf_res_square,
    double_dual_map,
    dual_elements,
    dual_structure,
    eval_pairing,
    make_dual_elem,
)
from .errors import DvrError, SpecParseError
from .modules import (
    InvariantFactors,
    ModElem,
    entry_to_relem,
    load_matrix_json,
    make_mod_elem,
    module_element_list,
    module_spec,
    parse_module_spec,
    snf,
)
from .ring import RElem, RingCtx, TElem, parse_ring_spec
from .verify import DEFAULT_RING_SPECS, VerifyConfig, run_suite, suite_entry_names


# ---------------------------------------------------------------------------
# JSON value forms


def _read_json_arg(value: str):
    """Inline JSON, an @file reference, or a bare path to a JSON file."""
    text = value
    if value.startswith("@"):
        with open(value[1:], "r", encoding="utf-8") as fh:
            text = fh.read()
    elif os.path.isfile(value):
        with open(value, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"could not parse JSON argument {value!r}: {exc}") from exc


def telem_json(t: TElem) -> dict:
    return {"n": t.n, "num": list(t.numerator)}


def telem_from_json(ctx: RingCtx, obj) -> TElem:
    if not isinstance(obj, dict) or "n" not in obj:
        raise SpecParseError("a T-value needs fields 'n' and 'num'")
    n = int(obj["n"])
    if n == 0:
        return TElem(0, ())
    num = entry_to_relem(ctx, obj.get("num", []), n)
    from .ring import t_from_fraction

    return t_from_fraction(ctx, num, n)


def telem_text(t: TElem) -> str:
    if t.is_zero():
        return "0"
    return f"{list(t.numerator)}/pi^{t.n}"


def circle_json(c: CircleElem) -> dict:
    return {"k": c.k, "num": c.numerator}


def circle_text(ctx: RingCtx, c: CircleElem) -> str:
    if c.k == 0:
        return "0"
    return f"{c.numerator}/{ctx.p}^{c.k}"


def dual_elem_json(phi: DualElem) -> dict:
    return {
        "torsion": [list(b.digits) for b in phi.torsion_coords],
        "t": [telem_json(t) for t in phi.t_coords],
    }


def dual_elem_from_json(ctx: RingCtx, m: InvariantFactors, obj) -> DualElem:
    if not isinstance(obj, dict):
        raise SpecParseError("a dual element must be a JSON object")
    torsion_raw = obj.get("torsion", [])
    t_raw = obj.get("t", [])
    if len(torsion_raw) != m.n_torsion or len(t_raw) != m.free_rank:
        raise SpecParseError("dual element shape does not match the module")
    torsion = tuple(
        entry_to_relem(ctx, ent, e) for ent, e in zip(torsion_raw, m.torsion_exps)
    )
    ts = tuple(telem_from_json(ctx, t) for t in t_raw)
    return make_dual_elem(ctx, dual_structure(m), torsion, ts)


def mod_elem_json(elem: ModElem) -> dict:
    out = {"torsion": [list(c.digits) for c in elem.torsion_coords]}
    if elem.free_coords:
        out["free"] = [list(c.digits) for c in elem.free_coords]
    return out


def mod_elem_from_json(ctx: RingCtx, m: InvariantFactors, obj) -> ModElem:
    if not isinstance(obj, dict):
        raise SpecParseError("a module element must be a JSON object")
    torsion_raw = obj.get("torsion", [])
    free_raw = obj.get("free", [])
    prec = int(obj.get("precision", ctx.default_precision))
    torsion = tuple(
        entry_to_relem(ctx, ent, e) for ent, e in zip(torsion_raw, m.torsion_exps)
    )
    free = tuple(entry_to_relem(ctx, ent, prec) for ent in free_raw)
    return make_mod_elem(ctx, m, torsion, free)


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (exit_code, payload, text_lines)


def _cmd_snf(args) -> tuple[int, dict, list[str]]:
    override = parse_ring_spec(args.ring) if args.ring else None
    if args.matrix.startswith("@") or os.path.isfile(args.matrix):
        path = args.matrix[1:] if args.matrix.startswith("@") else args.matrix
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = args.matrix
    ctx, mat = load_matrix_json(text, override)
    res = snf(ctx, mat)
    payload = {
        "ring": args.ring or json.loads(text).get("ring"),
        "torsion_exps": list(res.factors.torsion_exps),
        "free_rank": res.factors.free_rank,
        "pivot_valuations": list(res.pivot_valuations),
        "row_op_count": len(res.row_ops),
        "col_op_count": len(res.col_ops),
    }
    lines = [
        f"invariant factors: {module_spec(res.factors)}",
        f"pivot valuations: {list(res.pivot_valuations)}",
    ]
    return 0, payload, lines


def _cmd_dual(args) -> tuple[int, dict, list[str]]:
    m = parse_module_spec(args.module)
    d = dual_structure(m)
    payload = {
        "module": module_spec(m),
        "torsion_exps": list(d.torsion_exps),
        "t_copies": d.t_copies,
    }
    lines = [f"dual of {module_spec(m)}: torsion {list(d.torsion_exps)}, "
             f"{d.t_copies} copies of the divisible quotient"]
    return 0, payload, lines


def _cmd_pair(args) -> tuple[int, dict, list[str]]:
    ctx = parse_ring_spec(args.ring)
    m = parse_module_spec(args.module)
    phi = dual_elem_from_json(ctx, m, _read_json_arg(args.phi))
    elem = mod_elem_from_json(ctx, m, _read_json_arg(args.elem))
    value = eval_pairing(ctx, dual_structure(m), phi, elem)
    return 0, {"value": telem_json(value)}, [f"pairing value: {telem_text(value)}"]


def _cmd_double_dual(args) -> tuple[int, dict, list[str]]:
    ctx = parse_ring_spec(args.ring)
    m = parse_module_spec(args.module)
    elem = mod_elem_from_json(ctx, m, _read_json_arg(args.elem))
    image = double_dual_map(ctx, m, elem)
    identity = image == elem
    payload = {
        "element": mod_elem_json(elem),
        "image": mod_elem_json(image),
        "identity": identity,
    }
    lines = [f"double dual image: {mod_elem_json(image)}",
             f"identity: {'yes' if identity else 'NO'}"]
    return (0 if identity else 1), payload, lines


def _cmd_square(args) -> tuple[int, dict, list[str]]:
    ctx = parse_ring_spec(args.ring)
    a, b = args.a, args.b
    if a > b:
        raise SpecParseError("requires a <= b")
    if args.phi is not None:
        residue = entry_to_relem(ctx, _read_json_arg(args.phi), b)
        phi = DualElem((residue,), ())
        ok = check_inf_res_square(ctx, a, b, phi)
        payload = {"a": a, "b": b, "checked": 1, "all_commute": ok}
        return (0 if ok else 1), payload, [f"square commutes: {'yes' if ok else 'NO'}"]
    checked = 0
    for phi in dual_elements(ctx, InvariantFactors((b,))):
        if not check_inf_res_square(ctx, a, b, phi):
            payload = {
                "a": a,
                "b": b,
                "checked": checked,
                "all_commute": False,
                "counterexample": list(phi.torsion_coords[0].digits),
            }
            return 1, payload, ["square FAILED to commute"]
        checked += 1
    payload = {"a": a, "b": b, "checked": checked, "all_commute": True}
    return 0, payload, [f"square commutes for all {checked} functionals"]


def _cmd_ell(args) -> tuple[int, dict, list[str]]:
    ctx = parse_ring_spec(args.ring)
    if args.invert:
        t = telem_from_json(ctx, _read_json_arg(args.invert))
        phi = ell_inv(ctx, t)
        payload = {"coeffs": list(phi.coeffs)}
        return 0, payload, [f"functional coefficients: {list(phi.coeffs)}"]
    obj = _read_json_arg(args.phi)
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise SpecParseError("the functional needs a 'coeffs' field")
    phi = zdf_make(ctx, obj["coeffs"])
    t = ell(ctx, phi)
    return 0, {"value": telem_json(t)}, [f"quotient-field image: {telem_text(t)}"]


def _cmd_transport(args) -> tuple[int, dict, list[str]]:
    ctx = parse_ring_spec(args.ring)
    m = parse_module_spec(args.module)
    psi = dual_elem_from_json(ctx, m, _read_json_arg(args.psi))
    table = adjoint_transport(ctx, m, psi)
    payload = {
        "table": [
            {"element": mod_elem_json(e), "value": circle_json(v)}
            for e, v in table.items()
        ]
    }
    lines = [
        f"{mod_elem_json(e)['torsion']} -> {circle_text(ctx, v)}"
        for e, v in table.items()
    ]
    return 0, payload, lines


def _cmd_torsion_count(args) -> tuple[int, dict, list[str]]:
    ctx = parse_ring_spec(args.ring)
    try:
        count, expected = torsion_count(ctx, args.n)
    except AssertionError:
        return 1, {"n": args.n, "match": False}, ["torsion count MISMATCH"]
    payload = {"n": args.n, "count": count, "expected": expected, "match": True}
    return 0, payload, [f"level <= {args.n}: {count} elements (expected {expected})"]


def _cmd_zdelta(args) -> tuple[int, dict, list[str]]:
    try:
        ring = zdelta_validate(args.a, args.b)
    except ValueError as exc:
        payload = {"a": args.a, "b": args.b, "accepted": False, "reason": str(exc)}
        return 0, payload, [str(exc)]
    delta = zd_delta_complex(ring)
    payload = {
        "a": ring.a,
        "b": ring.b,
        "accepted": True,
        "delta": {"re": delta.real, "im": delta.imag},
        "multiplication": "delta^2 = b*delta + a",
        "norm": "N(x + y*delta) = x^2 + b*x*y - a*y^2",
    }
    lines = [
        f"accepted: Z[delta] with delta = {delta.real:+.6f}{delta.imag:+.6f}i",
        "multiplication rule: delta^2 = b*delta + a",
    ]
    return 0, payload, lines


def _cmd_verify(args) -> tuple[int, dict, list[str]]:
    ring_specs = tuple(args.ring) if args.ring else DEFAULT_RING_SPECS
    only = None
    if args.only is not None:
        only = tuple(name for name in args.only.split(",") if name)
    cfg = VerifyConfig(
        ring_specs=ring_specs,
        seed=args.seed,
        max_elements=args.budget,
        only=only,
    )
    report = run_suite(cfg)
    payload = report.to_dict()
    lines = []
    for entry in report.entries:
        mark = "PASS" if entry["status"] == "pass" else "FAIL"
        secs = report.per_entry_s.get(entry["name"], 0.0)
        lines.append(f"{mark}  {entry['name']}  ({secs:.2f}s)")
        if entry["counterexample"] is not None:
            lines.append(f"      counterexample: {entry['counterexample']}")
    lines.append(
        f"{payload['totals']['pass']}/{payload['totals']['total']} properties pass"
    )
    return (0 if report.passed else 1), payload, lines


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dvrdual",
        description="exact duality computations over compact discrete valuation rings",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result to this path")
    common.add_argument(
        "--format", choices=("json", "text"), default="text", help="output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("snf", parents=[common], help="invariant factors of a relation matrix")
    p.add_argument("--matrix", required=True, help="matrix JSON (inline, @file or path)")
    p.add_argument("--ring", help="ring spec override")
    p.set_defaults(fn=_cmd_snf)

    p = sub.add_parser("dual", parents=[common], help="shape of the dual module")
    p.add_argument("--module", required=True, help="module spec, e.g. '[1,2];f=1'")
    p.set_defaults(fn=_cmd_dual)

    p = sub.add_parser("pair", parents=[common], help="evaluate a functional on an element")
    p.add_argument("--ring", required=True)
    p.add_argument("--module", required=True)
    p.add_argument("--phi", required=True, help="dual element JSON")
    p.add_argument("--elem", required=True, help="module element JSON")
    p.set_defaults(fn=_cmd_pair)

    p = sub.add_parser("double-dual", parents=[common], help="double-dual image of an element")
    p.add_argument("--ring", required=True)
    p.add_argument("--module", required=True)
    p.add_argument("--elem", required=True)
    p.set_defaults(fn=_cmd_double_dual)

    p = sub.add_parser("square", parents=[common], help="inflation/restriction square check")
    p.add_argument("--ring", required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--phi", help="optional residue mod pi^b; sweeps all when omitted")
    p.set_defaults(fn=_cmd_square)

    p = sub.add_parser("ell", parents=[common], help="functional to quotient-field image")
    p.add_argument("--ring", required=True)
    p.add_argument("--phi", help="functional JSON {'coeffs': [...]}")
    p.add_argument("--invert", help="T-value JSON to map back to a functional")
    p.set_defaults(fn=_cmd_ell)

    p = sub.add_parser("transport", parents=[common], help="tabulate the additive circle map")
    p.add_argument("--ring", required=True)
    p.add_argument("--module", required=True)
    p.add_argument("--psi", required=True, help="dual element JSON")
    p.set_defaults(fn=_cmd_transport)

    p = sub.add_parser("torsion-count", parents=[common], help="count torsion up to a level")
    p.add_argument("--ring", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(fn=_cmd_torsion_count)

    p = sub.add_parser("zdelta", parents=[common], help="validate a discrete complex ring")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.set_defaults(fn=_cmd_zdelta)

    p = sub.add_parser("verify", parents=[common], help="run the verification suite")
    p.add_argument("--ring", action="append", help="ring spec (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=65536, help="enumeration budget")
    p.add_argument(
        "--only",
        help="comma-separated entry names (empty string selects nothing); "
        f"known: {', '.join(suite_entry_names())}",
    )
    p.set_defaults(fn=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, payload, lines = args.fn(args)
    except (SpecParseError, DvrError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        rendered = json.dumps(payload, indent=2) + "\n"
    else:
        rendered = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return code


if __name__ == "__main__":
    sys.exit(main())
