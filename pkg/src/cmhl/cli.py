"""Command-line interface.

    cmhl characters --modulus 12 --odd
    cmhl lfun --modulus 4 --char 1 --s 1
    cmhl height --modulus 4 --type 1 --json
    cmhl torsion --nu 1 --angle 1/2 --ltr 1+0i
    cmhl relation --target "log2 - 3*log3" --basis log2,log3
    cmhl verify all

Exit codes: 0 success, 2 domain error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

import mpmath

from . import __version__
from .arith import PrecisionContext
from .characters import SubfieldDescriptor, characters, unit_group
from .cmtypes import validate_type
from .errors import CMHLError, DomainError, PrecisionTooLow
from .heights import compare_routes, extension_invariance_check, height_character_route
from .lfunctions import dirichlet_l, dirichlet_l_ds
from .relation import evaluate_expression, logspan_basis, pslq_search
from .torsion import TorsionInstance, torsion_closed_form, torsion_spectral_oracle
from .verify import SUITES, run_suite

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY = 0, 2, 3


# -- serialisation ---------------------------------------------------------------------


class Emitter:
    def __init__(self, ctx: PrecisionContext):
        self.ctx = ctx

    def num(self, x):
        """Decimal string at full precision; complex numbers become {re, im}."""
        if x is None:
            return None
        if isinstance(x, Fraction):
            return str(x)
        if isinstance(x, (mpmath.mpc, complex)):
            return {"re": self.num(mpmath.re(x)), "im": self.num(mpmath.im(x))}
        with self.ctx.workprec():
            return mpmath.nstr(mpmath.mpf(x), self.ctx.dps, min_fixed=-5, max_fixed=5)


def _flatten(row: dict, prefix="") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, sort_keys=True)
        else:
            out[key] = v
    return out


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2)
    rows = payload.get("rows")
    if fmt == "csv":
        buf = io.StringIO()
        records = [_flatten(r) for r in rows] if rows is not None else [_flatten({k: v for k, v in payload.items()})]
        header = sorted({k for r in records for k in r})
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        return buf.getvalue().rstrip("\n")
    lines = []
    for k, v in sorted(payload.items()):
        if k == "rows":
            continue
        lines.append(f"{k}: {json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}")
    for r in rows or []:
        lines.append("  " + "  ".join(f"{k}={json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}" for k, v in sorted(r.items())))
    return "\n".join(lines)


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _split_top(text: str) -> list[str]:
    """Split on commas not enclosed in parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += (ch == "(") - (ch == ")")
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


# -- commands ---------------------------------------------------------------------------


def cmd_characters(args, ctx, em):
    filt = "odd" if args.odd else "even" if args.even else "all"
    if args.subgroup:
        grp = SubfieldDescriptor.create(args.modulus, _ints(args.subgroup)).quotient
    else:
        grp = unit_group(args.modulus)
    rows = [
        {
            "character_index": chi.index,
            "conductor": chi.conductor,
            "order": chi.order,
            "parity": "odd" if chi.is_odd else "even",
            "exponents": list(chi.exponents),
        }
        for chi in characters(grp, filt)
    ]
    return {"modulus": args.modulus, "filter": filt, "rows": rows}, EXIT_OK


def _character_by_index(n, idx):
    for chi in characters(n):
        if chi.index == idx:
            return chi
    raise DomainError(f"no character with index {idx} modulo {n}")


def cmd_lfun(args, ctx, em):
    chi = _character_by_index(args.modulus, args.char)
    if args.primitive:
        chi = chi.primitive_part
    with ctx.workprec():
        s = mpmath.mpmathify(args.s.replace("i", "j"))
    value = dirichlet_l_ds(chi, s, ctx) if args.derivative else dirichlet_l(chi, s, ctx)
    return {
        "modulus": args.modulus,
        "character_index": args.char,
        "conductor": chi.conductor,
        "s": args.s,
        "derivative": bool(args.derivative),
        "primitive": bool(args.primitive),
        "value": em.num(value),
    }, EXIT_OK


def cmd_height(args, ctx, em):
    n = args.modulus
    members = _ints(args.type)
    payload = {"modulus": n, "type": members}
    if args.subgroup:
        desc = SubfieldDescriptor.create(n, _ints(args.subgroup))
        phi = validate_type(desc.quotient, members)
        rep = height_character_route(phi, ctx)
        inv = extension_invariance_check(desc, phi, ctx)
        payload.update(
            subgroup=list(desc.quotient.subgroup),
            h_system=None,
            calibration_c=None,
            residual_coefficients=None,
            invariance_residual=em.num(inv.residual),
        )
    else:
        phi = validate_type(n, members)
        rep = compare_routes(phi, ctx)
        payload.update(
            h_system=em.num(rep.h_system),
            calibration_c=str(rep.calibration.c),
            residual_coefficients={k: str(v) for k, v in rep.calibration.coefficients.items()},
            calibration_residual=em.num(rep.calibration.residual),
        )
    payload["h_character"] = em.num(rep.h_character)
    payload["note"] = rep.note
    payload["per_character"] = [
        {
            "character_index": r.character_index,
            "conductor": r.conductor,
            "pairing": em.num(r.pairing),
            "l_ratio": em.num(r.l_ratio),
            "contribution": em.num(r.contribution),
        }
        for r in rep.per_character
    ]
    return payload, EXIT_OK


def _complex(text: str):
    return mpmath.mpmathify(text.replace(" ", "").replace("i", "j"))


def cmd_torsion(args, ctx, em):
    with ctx.workprec():
        nus = [mpmath.mpmathify(t) if "/" not in t else Fraction(t) for t in args.nu.split(",")]
        angles = [Fraction(t) for t in args.angle.split(",")]
        if len(nus) != len(angles):
            raise DomainError("--nu and --angle need the same number of entries")
        inst = TorsionInstance(tuple(zip(nus, angles)), _complex(args.ltr))
        closed = torsion_closed_form(inst, ctx, theorem_sign=args.theorem_sign)
        payload = {
            "eigenpairs": [{"nu": str(nu), "angle_turns": str(t)} for nu, t in inst.eigenpairs],
            "ltr": em.num(inst.ltr),
            "theorem_sign": bool(args.theorem_sign),
            "torsion": em.num(closed),
            "oracle": None,
            "difference": None,
        }
        if all(nu > 0 for nu, _ in inst.eigenpairs):
            oracle = torsion_spectral_oracle(inst, ctx)
            payload["oracle"] = em.num(oracle)
            payload["difference"] = em.num(abs(closed - oracle))
    return payload, EXIT_OK


def cmd_relation(args, ctx, em):
    target = evaluate_expression(args.target, ctx)
    if args.basis:
        labels = _split_top(args.basis)
        values = [evaluate_expression(b, ctx) for b in labels]
    elif args.modulus:
        basis = logspan_basis(args.modulus, ctx=ctx)
        labels = [lab for lab, _ in basis]
        values = [v for _, v in basis]
    else:
        raise DomainError("give --basis or --modulus")
    res = pslq_search([target] + values, ctx)
    payload = {"target": args.target, "basis": labels, "norm_bound": em.num(res.norm_bound), "iterations": res.iterations}
    if res.found and res.relation[0] != 0:
        m0 = res.relation[0]
        payload["result"] = "relation"
        payload["relation"] = res.relation
        payload["coefficients"] = {lab: str(Fraction(-m, m0)) for lab, m in zip(labels, res.relation[1:])}
    else:
        payload["result"] = "NONE"
        payload["relation"] = res.relation
        payload["coefficients"] = None
    return payload, EXIT_OK


def cmd_verify(args, ctx, em):
    if ctx.bits < 128:
        raise PrecisionTooLow("verify needs at least 128 bits")
    params = {"seed": args.seed}
    if args.trials is not None:
        params["trials"] = args.trials
    if args.modulus is not None:
        params["moduli"] = tuple(args.modulus)
    suites = SUITES if args.suite == "all" else (args.suite,)
    cases = []
    for suite in suites:
        sp = dict(params)
        if suite in ("invariance", "collapse"):
            sp.pop("moduli", None)
        if suite not in ("half-sum", "waslem", "torsion"):
            sp.pop("trials", None)
        if suite == "torsion":
            sp.pop("moduli", None)
        cases.extend(run_suite(suite, ctx, **sp))
    rows = [
        {
            "suite": c.suite,
            "case": c.name,
            "status": "PASS" if c.passed else "FAIL",
            "residual": em.num(c.residual),
            "tolerance": em.num(c.tolerance),
            "detail": c.detail,
        }
        for c in cases
    ]
    failed = sum(1 for c in cases if not c.passed)
    payload = {"suite": args.suite, "passed": len(cases) - failed, "failed": failed, "rows": rows}
    return payload, EXIT_VERIFY if failed else EXIT_OK


# -- parser -----------------------------------------------------------------------------


def _default_prec() -> int:
    return int(os.environ.get("CMHL_PREC", "256"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=None, help="precision in bits (env CMHL_PREC, default 256)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--json", action="store_true", help="shorthand for --format json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cache-dir", default=None, help="unit-group table cache (env CMHL_CACHE_DIR)")

    p = argparse.ArgumentParser(prog="cmhl", description="CM heights, L-values and torsion at high precision")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("characters", parents=[common], help="list Dirichlet characters")
    c.add_argument("--modulus", type=int, required=True)
    g = c.add_mutually_exclusive_group()
    g.add_argument("--odd", action="store_true")
    g.add_argument("--even", action="store_true")
    c.add_argument("--subgroup", help="comma-separated generators of H")
    c.set_defaults(func=cmd_characters)

    c = sub.add_parser("lfun", parents=[common], help="Dirichlet L-value")
    c.add_argument("--modulus", type=int, required=True)
    c.add_argument("--char", type=int, required=True, help="character index")
    c.add_argument("--s", required=True)
    c.add_argument("--derivative", action="store_true")
    c.add_argument("--primitive", action="store_true")
    c.set_defaults(func=cmd_lfun)

    c = sub.add_parser("height", parents=[common], help="both height routes and their calibration")
    c.add_argument("--modulus", type=int, required=True)
    c.add_argument("--type", required=True, help="comma-separated type members")
    c.add_argument("--subgroup", help="comma-separated generators of H")
    c.set_defaults(func=cmd_height)

    c = sub.add_parser("torsion", parents=[common], help="equivariant torsion, closed form and oracle")
    c.add_argument("--nu", required=True)
    c.add_argument("--angle", required=True, help="angles as fractions of a full turn, e.g. 1/2,1/4")
    c.add_argument("--ltr", default="1")
    c.add_argument("--theorem-sign", action="store_true")
    c.set_defaults(func=cmd_torsion)

    c = sub.add_parser("relation", parents=[common], help="integer relation / log-span membership")
    c.add_argument("--target", required=True)
    c.add_argument("--basis")
    c.add_argument("--modulus", type=int)
    c.set_defaults(func=cmd_relation)

    c = sub.add_parser("verify", parents=[common], help="run verification suites")
    c.add_argument("suite", choices=SUITES + ("all",))
    c.add_argument("--modulus", type=int, action="append")
    c.add_argument("--trials", type=int)
    c.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = "json" if args.json else args.format
    prec = args.prec if args.prec is not None else _default_prec()
    if args.cache_dir:
        os.environ["CMHL_CACHE_DIR"] = args.cache_dir
    header = {"schema_version": SCHEMA_VERSION, "command": args.command, "precision_bits": prec, "seed": args.seed}
    try:
        ctx = PrecisionContext(bits=prec)
        em = Emitter(ctx)
        with ctx.workprec():
            payload, code = args.func(args, ctx, em)
    except (CMHLError, ValueError, ZeroDivisionError, SyntaxError) as exc:
        kind = getattr(exc, "kind", "domain")
        payload = dict(header, error={"kind": kind, "message": str(exc)})
        print(render(payload, "json" if fmt == "json" else "text"), file=sys.stdout if fmt == "json" else sys.stderr)
        return EXIT_DOMAIN
    print(render(dict(header, **payload), fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
