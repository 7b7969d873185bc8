"""Command-line front end.

Exit codes: 0 pass or found, 1 fail or none, 2 inconclusive or unknown,
3 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, is_dataclass
from fractions import Fraction

from . import cone as C
from . import geometry as Geo
from . import stationarity as S
from .errors import SharpMpecError
from .io import certificate_to_dict, parse_certificate, parse_problem, parse_scalar

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _vector_arg(text: str) -> tuple:
    parts = [p for p in text.replace(" ", "").split(",") if p != ""]
    return tuple(parse_scalar(p, "argument") for p in parts)


def jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, (S.SharpCertificate, S.MStatCertificate)):
        return certificate_to_dict(x)
    if isinstance(x, frozenset):
        return sorted(i + 1 for i in x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if is_dataclass(x):
        return {f.name: jsonable(getattr(x, f.name)) for f in fields(x)}
    return str(x)


def _report_dict(rep: S.AuditReport) -> dict:
    return {
        "verdict": rep.verdict,
        "conditions": [{"id": c.id, "verdict": c.verdict, "detail": c.detail} for c in rep.conditions],
        "face_view": jsonable(rep.face_view),
        "notes": rep.notes,
    }


def _fmt(v) -> str:
    return "(" + ", ".join(str(a) for a in v) + ")"


def _labels(S_) -> str:
    return "{" + ", ".join(str(i + 1) for i in sorted(S_)) + "}"


def _cone_text(K: C.HCone) -> list:
    out = [f"  eq   {_fmt(r)}·v = 0" for r in K.eq]
    out += [f"  ineq {_fmt(r)}·v <= 0" for r in K.ineq]
    return out or ["  (whole space)"]


def _print_report(rep: S.AuditReport, lines: list):
    for c in rep.conditions:
        lines.append(f"  [{c.verdict:>11}] {c.id}: {c.detail}")
    for n in rep.notes:
        lines.append(f"  note: {n}")
    lines.append(f"verdict: {rep.verdict}")


def _verdict_code(verdict: str) -> int:
    return {"pass": EXIT_OK, "fail": EXIT_FAIL}.get(verdict, EXIT_UNKNOWN)


# -- commands -----------------------------------------------------------------------

def cmd_analyze(data, geom, args):
    canon = C.canonical(geom.K)
    V = C.h_to_v(geom.K)
    lines = [
        f"active set Ī = {_labels(geom.active)}",
        "critical cone (canonical H-form):",
        *_cone_text(canon),
        f"critical cone generators: lineality {[_fmt(l) for l in V.lineality]} rays {[_fmt(r) for r in V.rays]}",
        f"multiplier set: {len(geom.Lam.eq)} equalities, {len(geom.Lam.ineq)} sign rows",
        f"extreme multipliers ℰ = {[_fmt(e) for e in geom.extreme]}",
        f"J̄⁺(Λ̄) = {_labels(geom.jplus_all)}",
    ]
    report = {
        "active": [i + 1 for i in geom.active],
        "critical_cone": {"eq": canon.eq, "ineq": canon.ineq},
        "critical_cone_v": {"lineality": V.lineality, "rays": V.rays},
        "multiplier_set": {
            "eq": [{"a": a, "b": b} for a, b in geom.Lam.eq],
            "ineq": [{"a": a, "b": b} for a, b in geom.Lam.ineq],
            "canonical": {
                "eq": [{"a": a, "b": b} for a, b in geom.Lam.canonical().eq],
                "ineq": [{"a": a, "b": b} for a, b in geom.Lam.canonical().ineq],
            },
        },
        "extreme": geom.extreme,
        "jplus": geom.jplus_all,
        "lineality": geom.lineality,
        "verdict": "pass",
    }
    return EXIT_OK, lines, report


def cmd_directional(data, geom, args):
    v = _need(args.v, "--v")
    dd = Geo.directional(data, geom, v)
    nd = Geo.check_2_nondegenerate(data, geom, v)
    lines = [
        f"Ī(v) = {_labels(dd.active)}",
        f"vertices of Λ̄(v) = {[_fmt(x) for x in dd.vertices]}",
        f"J̄⁺(Λ̄(v)) = {_labels(dd.jplus)}",
        "2-nondegenerate: " + ("yes" if nd.holds else f"no, witness μ = {_fmt(nd.witness)}"),
    ]
    report = {
        "active": dd.active,
        "vertices": dd.vertices,
        "jplus": dd.jplus,
        "nondegenerate": nd.holds,
        "witness": nd.witness,
        "verdict": "pass",
    }
    return EXIT_OK, lines, report


def cmd_tangent(data, geom, args):
    v, vstar = _need(args.v, "--v"), _need(args.vstar, "--vstar")
    mem = Geo.tangent_gph_member(data, geom, v, vstar)
    lines = [f"tangent to the normal-cone graph: {'yes' if mem.member else 'no'}"]
    report = {"member": mem.member, "verdict": "pass" if mem.member else "fail"}
    if mem.member:
        try:
            lam, z = Geo.decompose_tangent_pair(data, geom, v, vstar)
            lines.append(f"decomposition: λ̄ = {_fmt(lam)}, z̄* = {_fmt(z)}")
            report["decomposition"] = {"lambda": lam, "zstar": z}
        except SharpMpecError as exc:
            lines.append(f"decomposition unavailable: {exc}")
            report["decomposition_error"] = exc.code
    return (EXIT_OK if mem.member else EXIT_FAIL), lines, report


def cmd_verify_sharp(data, geom, args):
    cert = _load_cert(args, S.SharpCertificate)
    rep = S.verify_sharp(data, geom, cert)
    lines = ["sharp certificate audit:"]
    _print_report(rep, lines)
    return _verdict_code(rep.verdict), lines, _report_dict(rep)


def cmd_search_sharp(data, geom, args):
    res = S.search_sharp(data, geom, tuple(args.direction or ()))
    if isinstance(res, S.Found):
        lines = [f"found certificate ({res.report.verdict}):", json.dumps(certificate_to_dict(res.cert))]
        report = {"result": "Found", "certificate": res.cert, **_report_dict(res.report)}
        return _verdict_code(res.report.verdict), lines, report
    lines = [f"not found within catalog: {res.catalog}"]
    return EXIT_FAIL, lines, {"result": "NotFoundWithinCatalog", "catalog": res.catalog, "verdict": "fail"}


def cmd_verify_mstat(data, geom, args):
    cert = _load_cert(args, S.MStatCertificate)
    rep = S.verify_mstat(data, cert)
    lines = ["M-stationarity audit:"]
    _print_report(rep, lines)
    return _verdict_code(rep.verdict), lines, _report_dict(rep)


def cmd_search_mstat(data, geom, args):
    certs = S.search_mstat(data)
    lines = [f"{len(certs)} certificate class(es)"]
    for c in certs:
        tags = ", ".join(f"{i + 1}:{t}" for i, t in c.branches)
        lines.append(f"  λ = {_fmt(c.lam)}  w = {_fmt(c.w)}  ξ = {_fmt(c.xi)}  σ = {_fmt(c.sigma)}  [{tags}]")
    report = {"certificates": certs, "verdict": "pass" if certs else "fail"}
    return (EXIT_OK if certs else EXIT_FAIL), lines, report


def cmd_corollary(data, geom, args):
    res = S.corollary_unique_check(data, geom, tuple(args.direction or ()))
    if isinstance(res, S.NotApplicable):
        return EXIT_UNKNOWN, [f"not applicable: {res}"], {"result": "NotApplicable", "verdict": "unknown"}
    if res is None:
        return EXIT_FAIL, ["no certificate in the catalog"], {"result": "None", "verdict": "fail"}
    lines = ["found certificate:", json.dumps(certificate_to_dict(res.cert))]
    return EXIT_OK, lines, {"result": "Found", "certificate": res.cert, **_report_dict(res.report)}


def cmd_mscq(data, geom, args):
    res = S.mscq_sufficient_check(data, geom, tuple(args.direction or ()))
    if isinstance(res, S.Satisfied):
        return EXIT_OK, ["sufficient condition satisfied"], {"result": "Satisfied", "verdict": "pass"}
    if isinstance(res, S.Violated):
        lines = ["sufficient condition violated:"] + [f"  {k} = {_fmt(v)}" for k, v in res.witness.items()]
        return EXIT_FAIL, lines, {"result": "Violated", "witness": res.witness, "verdict": "fail"}
    return EXIT_UNKNOWN, [f"inconclusive: {res.reason}"], {"result": "Inconclusive", "reason": res.reason,
                                                            "verdict": "unknown"}


def cmd_probe(data, geom, args):
    v, vstar = _need(args.v, "--v"), _need(args.vstar, "--vstar")
    res = Geo.polyhedrality_probe(data, geom, v, vstar)
    code = {"NotLocallyPolyhedral": EXIT_OK, "LocallyPolyhedral": EXIT_FAIL}.get(res.kind, EXIT_UNKNOWN)
    lines = [res.kind + (f" (witness {_fmt(res.witness)})" if res.witness else "")]
    return code, lines, {"result": res.kind, "witness": res.witness}


COMMANDS = {
    "analyze": cmd_analyze,
    "directional": cmd_directional,
    "tangent": cmd_tangent,
    "verify-sharp": cmd_verify_sharp,
    "search-sharp": cmd_search_sharp,
    "verify-mstat": cmd_verify_mstat,
    "search-mstat": cmd_search_mstat,
    "corollary-unique": cmd_corollary,
    "mscq-check": cmd_mscq,
    "probe-polyhedral": cmd_probe,
}


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this command")
    return value


def _load_cert(args, kind):
    if args.cert is not None:
        cert = parse_certificate(args.cert)
    else:
        cert = args.embedded_cert
    if cert is None:
        raise UsageError("--cert is required (or embed a certificate in the problem file)")
    if not isinstance(cert, kind):
        raise UsageError("certificate type does not match the command")
    return cert


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sharpmpec", description="Exact stationarity checks for MPECs at a candidate point.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("problem", help="problem file (JSON)")
    p.add_argument("--json", action="store_true", help="emit a machine-readable report")
    p.add_argument("--v", type=_vector_arg, help="direction, comma-separated rationals")
    p.add_argument("--vstar", type=_vector_arg, help="paired dual direction")
    p.add_argument("--cert", help="certificate file (JSON)")
    p.add_argument("--direction", type=_vector_arg, action="append",
                   help="extra catalog direction (repeatable)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        data, embedded = parse_problem(args.problem)
        args.embedded_cert = embedded
        geom = Geo.analyze_point(data)
        code, lines, report = COMMANDS[args.command](data, geom, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SharpMpecError as exc:
        print(f"input error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        report = {"command": args.command, "exit_code": code, **jsonable(report)}
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
