"""JSON documents exchanged by the command-line front end.

Complex numbers are ``[re, im]`` pairs and matrices are row-major. Floats
are written with 17 significant digits so that a parse/serialize cycle
reproduces the original bytes.
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from .channel import KrausChannel, make_buc
from .codesearch import pauli_demo_channel
from .errors import CompQECError
from .matcore import DEFAULT_TOLERANCES, ToleranceConfig, as_square
from .numrange import RangeResult


class DocumentError(CompQECError):
    """A document is malformed: bad JSON, wrong fields or wrong shapes."""


# --- canonical serialization -----------------------------------------------------


def _number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise DocumentError(f"non-finite number {x!r} cannot be serialized")
    if x == 0.0:
        return "0"
    return "%.17g" % x


def _encode(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, int, float, np.integer, np.floating)):
        out.append(_number(obj))
    elif isinstance(obj, (complex, np.complexfloating)):
        _encode([obj.real, obj.imag], out)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _encode(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(",")
            _encode(value, out)
        out.append("]")
    else:
        raise DocumentError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical compact JSON followed by a newline."""
    out: list[str] = []
    _encode(obj, out)
    out.append("\n")
    return "".join(out)


def loads(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc


def _reject_constant(name):
    raise DocumentError(f"non-finite constant {name} is not allowed")


def digest(blobs) -> str:
    """sha256 over the raw bytes of the input files, in order."""
    h = hashlib.sha256()
    for blob in blobs:
        h.update(blob)
    return h.hexdigest()


# --- matrices --------------------------------------------------------------------


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DocumentError(f"expected a 2-D matrix, got shape {a.shape}")
    return {
        "rows": a.shape[0],
        "cols": a.shape[1],
        "data": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _decode_complex(pair, where: str) -> complex:
    if not (isinstance(pair, list) and len(pair) == 2 and all(_is_number(x) for x in pair)):
        raise DocumentError(f"{where}: complex entries must be [re, im] pairs of finite numbers")
    return complex(pair[0], pair[1])


def decode_matrix(doc, square: bool = False, where: str = "matrix") -> np.ndarray:
    if not isinstance(doc, dict) or set(doc) != {"rows", "cols", "data"}:
        raise DocumentError(f"{where}: a matrix document has exactly rows, cols and data")
    rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    for name, v in (("rows", rows), ("cols", cols)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise DocumentError(f"{where}: {name} must be a positive integer")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise DocumentError(f"{where}: data must hold rows*cols = {rows * cols} entries")
    if square and rows != cols:
        raise DocumentError(f"{where}: expected a square matrix, got {rows}x{cols}")
    values = [_decode_complex(pair, where) for pair in data]
    return np.array(values, dtype=np.complex128).reshape(rows, cols)


# --- channels --------------------------------------------------------------------

_CHANNEL_FIELDS = {
    "kraus": {"dimension", "kind", "kraus"},
    "buc": {"dimension", "kind", "V", "W", "p"},
    "pauli-demo": {"dimension", "kind", "model", "p"},
}


def encode_kraus_channel(ch: KrausChannel) -> dict:
    return {
        "dimension": ch.dimension,
        "kind": "kraus",
        "kraus": [encode_matrix(e) for e in ch.kraus_ops],
    }


def encode_buc(V, W, p: float) -> dict:
    return {
        "dimension": int(np.asarray(V).shape[0]),
        "kind": "buc",
        "V": encode_matrix(V),
        "W": encode_matrix(W),
        "p": float(p),
    }


def encode_pauli_demo(model: str, p: float) -> dict:
    return {"dimension": 4, "kind": "pauli-demo", "model": model, "p": float(p)}


def decode_channel(doc, tol: ToleranceConfig = DEFAULT_TOLERANCES):
    """Parse a channel document.

    Returns a :class:`KrausChannel` for the ``kraus`` kind and a
    :class:`~compqec.channel.BiUnitaryChannel` for ``buc`` and ``pauli-demo``.
    Structural problems raise :class:`DocumentError`; a channel that parses
    but violates trace preservation or unitarity raises the matching
    precondition error.
    """
    if not isinstance(doc, dict) or doc.get("kind") not in _CHANNEL_FIELDS:
        raise DocumentError("channel kind must be one of kraus, buc, pauli-demo")
    kind = doc["kind"]
    if set(doc) != _CHANNEL_FIELDS[kind]:
        raise DocumentError(f"{kind} channel needs exactly the fields {sorted(_CHANNEL_FIELDS[kind])}")
    dim = doc["dimension"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DocumentError("dimension must be a positive integer")
    if "p" in doc and not _is_number(doc["p"]):
        raise DocumentError("p must be a finite number")

    if kind == "kraus":
        if not isinstance(doc["kraus"], list) or not doc["kraus"]:
            raise DocumentError("kraus must be a non-empty list of matrices")
        ops = [decode_matrix(m, square=True, where=f"kraus[{i}]") for i, m in enumerate(doc["kraus"])]
        _check_dimension(dim, ops)
        return KrausChannel.checked(ops, tol)
    if kind == "buc":
        v = decode_matrix(doc["V"], square=True, where="V")
        w = decode_matrix(doc["W"], square=True, where="W")
        _check_dimension(dim, [v, w])
        return make_buc(v, w, doc["p"], tol)
    if doc["model"] not in ("ZZ", "Z1"):
        raise DocumentError("pauli-demo model must be ZZ or Z1")
    if dim != 4:
        raise DocumentError("pauli-demo channels act on two qubits (dimension 4)")
    return pauli_demo_channel(doc["model"], doc["p"])


def _check_dimension(dim: int, ops) -> None:
    for op in ops:
        if op.shape != (dim, dim):
            raise DocumentError(f"declared dimension {dim} does not match operator shape {op.shape}")


# --- results ---------------------------------------------------------------------


def encode_range(r: RangeResult) -> dict:
    if r.kind == "interval":
        return {"kind": "interval", "lo": r.lo, "hi": r.hi}
    out: dict = {"kind": r.kind}
    if r.kind == "point":
        out["value"] = encode_complex(r.point)
    elif r.kind == "segment":
        out["endpoints"] = [encode_complex(z) for z in r.endpoints]
    if r.case_label is not None:
        out["case"] = r.case_label
    return out


def decode_range(doc) -> RangeResult:
    kind = doc.get("kind") if isinstance(doc, dict) else None
    case = doc.get("case") if isinstance(doc, dict) else None
    if kind == "empty":
        return RangeResult.empty(case)
    if kind == "interval":
        return RangeResult("interval", lo=float(doc["lo"]), hi=float(doc["hi"]))
    if kind == "point":
        return RangeResult.at(_decode_complex(doc["value"], "range"), case)
    if kind == "segment":
        a, b = (_decode_complex(z, "range") for z in doc["endpoints"])
        return RangeResult.segment(a, b, case)
    raise DocumentError(f"unknown range kind {kind!r}")


def report(command: str, blobs, result, tol: ToleranceConfig) -> dict:
    return {
        "command": command,
        "inputs_digest": digest(blobs),
        "result": result,
        "tolerances": tol.as_dict(),
    }
