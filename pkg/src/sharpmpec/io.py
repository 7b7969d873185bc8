"""JSON problem and certificate files with exact rational scalars."""
from __future__ import annotations

import json
import re
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import NonRationalLiteral, ParseError, ShapeError
from .problem import ProblemData
from .stationarity import MStatCertificate, SharpCertificate

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_scalar(x, where: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise NonRationalLiteral(f"{where}: {x!r} is not an exact rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str) and _RATIONAL.match(x.strip()):
        val = Fraction(x.strip())
        return val
    if isinstance(x, str):
        raise NonRationalLiteral(f"{where}: {x!r} is not an integer or p/q literal")
    raise ParseError(f"{where}: expected a scalar, got {type(x).__name__}")


def _vector(x, where: str) -> tuple:
    if not isinstance(x, list):
        raise ParseError(f"{where}: expected a list")
    return tuple(parse_scalar(a, f"{where}[{i}]") for i, a in enumerate(x))


def _matrix(x, where: str) -> tuple:
    if not isinstance(x, list):
        raise ParseError(f"{where}: expected a list of rows")
    return tuple(_vector(r, f"{where}[{i}]") for i, r in enumerate(x))


def _indices(x, where: str) -> frozenset:
    if not isinstance(x, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in x):
        raise ParseError(f"{where}: expected a list of 1-based integers")
    if any(i < 1 for i in x):
        raise ParseError(f"{where}: indices are 1-based")
    return frozenset(i - 1 for i in x)


def _load(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    return doc


def problem_from_dict(doc: dict) -> ProblemData:
    try:
        dims = doc["dims"]
        n, m, p, q = (int(dims[k]) for k in ("n", "m", "p", "q"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError("dims: need integer fields n, m, p, q") from exc
    for key in ("grad_F", "phi", "jac_phi", "g", "jac_g", "hess_g"):
        if key not in doc:
            raise ParseError(f"missing field {key}")
    flags = doc.get("flags", {})
    if not isinstance(flags, dict) or not all(isinstance(v, bool) for v in flags.values()):
        raise ParseError("flags: expected an object of booleans")
    hess = doc["hess_g"]
    if not isinstance(hess, list):
        raise ParseError("hess_g: expected a list of matrices")
    sigma_choice = doc.get("sigma_choice")
    return ProblemData(
        n, m, p, q,
        grad_F=_vector(doc["grad_F"], "grad_F"),
        phi=_vector(doc["phi"], "phi"),
        jac_phi=_matrix(doc["jac_phi"], "jac_phi"),
        g=_vector(doc["g"], "g"),
        jac_g=_matrix(doc["jac_g"], "jac_g"),
        hess_g=tuple(_matrix(h, f"hess_g[{i}]") for i, h in enumerate(hess)),
        G_val=_vector(doc.get("G_val", []), "G_val"),
        jac_G=_matrix(doc.get("jac_G", []), "jac_G"),
        assumption1=flags.get("assumption1", False),
        lower_mscq=flags.get("lower_mscq", False),
        upper_mscq=flags.get("upper_mscq", False),
        directions=tuple(_vector(d, f"directions[{i}]") for i, d in enumerate(doc.get("directions", []))),
        sigma_choice=None if sigma_choice is None else tuple(
            _vector(s, f"sigma_choice[{i}]") for i, s in enumerate(sigma_choice)
        ),
        name=str(doc.get("name", "")),
    )


_SHARP_VECTORS = ("vbar", "lambdabar", "w", "eta", "xi", "sigma", "deltav", "s_deltav", "mubar", "s_w")
_SHARP_SETS = ("I", "Iplus", "J", "Jplus")
_SHARP_OPTIONAL = ("zbar", "deltax", "alphas")


def certificate_from_dict(doc: dict, where: str = "certificate"):
    kind = doc.get("type")
    if kind == "sharp":
        kw = {}
        for k in _SHARP_VECTORS:
            if k not in doc:
                raise ParseError(f"{where}: missing field {k}")
            kw[k] = _vector(doc[k], f"{where}.{k}")
        for k in _SHARP_SETS:
            if k not in doc:
                raise ParseError(f"{where}: missing field {k}")
            kw[k] = _indices(doc[k], f"{where}.{k}")
        for k in _SHARP_OPTIONAL:
            if doc.get(k) is not None:
                kw[k] = _vector(doc[k], f"{where}.{k}")
        return SharpCertificate(**kw)
    if kind == "mstat":
        for k in ("lambda", "w", "xi", "sigma"):
            if k not in doc:
                raise ParseError(f"{where}: missing field {k}")
        branches = doc.get("branches", {})
        if not isinstance(branches, dict):
            raise ParseError(f"{where}.branches: expected an object keyed by 1-based index")
        try:
            tags = tuple(sorted((int(i) - 1, t) for i, t in branches.items()))
        except ValueError as exc:
            raise ParseError(f"{where}.branches: keys must be integers") from exc
        return MStatCertificate(
            _vector(doc["lambda"], f"{where}.lambda"),
            _vector(doc["w"], f"{where}.w"),
            _vector(doc["xi"], f"{where}.xi"),
            _vector(doc["sigma"], f"{where}.sigma"),
            tags,
        )
    raise ParseError(f"{where}.type: expected 'sharp' or 'mstat'")


def parse_problem(path):
    """ProblemData plus any embedded certificate (or None)."""
    doc = _load(path)
    data = problem_from_dict(doc)
    cert = doc.get("certificate")
    return data, (certificate_from_dict(cert) if cert is not None else None)


def parse_certificate(path):
    doc = _load(path)
    if "certificate" in doc and "type" not in doc:
        doc = doc["certificate"]
    return certificate_from_dict(doc)


def scalar_to_json(x: Fraction):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vector_to_json(v) -> list:
    return [scalar_to_json(a) for a in v]


def certificate_to_dict(cert) -> dict:
    if isinstance(cert, SharpCertificate):
        out = {"type": "sharp"}
        for k in _SHARP_VECTORS:
            out[k] = vector_to_json(getattr(cert, k))
        for k in _SHARP_SETS:
            out[k] = sorted(i + 1 for i in getattr(cert, k))
        for k in _SHARP_OPTIONAL:
            val = getattr(cert, k)
            if val is not None:
                out[k] = vector_to_json(val)
        return out
    if isinstance(cert, MStatCertificate):
        return {
            "type": "mstat",
            "lambda": vector_to_json(cert.lam),
            "w": vector_to_json(cert.w),
            "xi": vector_to_json(cert.xi),
            "sigma": vector_to_json(cert.sigma),
            "branches": {str(i + 1): t for i, t in cert.branches},
        }
    raise TypeError(f"not a certificate: {type(cert).__name__}")


def problem_to_dict(data: ProblemData) -> dict:
    out = {
        "name": data.name,
        "dims": {"n": data.n, "m": data.m, "p": data.p, "q": data.q},
        "grad_F": vector_to_json(data.grad_F),
        "phi": vector_to_json(data.phi),
        "jac_phi": [vector_to_json(r) for r in data.jac_phi],
        "g": vector_to_json(data.g),
        "jac_g": [vector_to_json(r) for r in data.jac_g],
        "hess_g": [[vector_to_json(r) for r in h] for h in data.hess_g],
        "G_val": vector_to_json(data.G_val),
        "jac_G": [vector_to_json(r) for r in data.jac_G],
        "flags": {
            "assumption1": data.assumption1,
            "lower_mscq": data.lower_mscq,
            "upper_mscq": data.upper_mscq,
        },
    }
    if data.directions:
        out["directions"] = [vector_to_json(d) for d in data.directions]
    if data.sigma_choice is not None:
        out["sigma_choice"] = [vector_to_json(s) for s in data.sigma_choice]
    return out


def bundled_path(name: str) -> Path:
    """Path of a bundled example file such as ``example1.json``."""
    return Path(str(resources.files("sharpmpec") / "data" / name))


__all__ = [
    "ParseError",
    "ShapeError",
    "NonRationalLiteral",
    "parse_problem",
    "parse_certificate",
    "certificate_to_dict",
    "certificate_from_dict",
    "problem_to_dict",
    "problem_from_dict",
    "bundled_path",
]
