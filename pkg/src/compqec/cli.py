"""Command-line front end.

Subcommands read JSON documents, run one library operation and write a
single report document to standard output. Diagnostics go to standard
error. Exit codes:

    0  success, or the code is correctable
    1  verified negative (not correctable, recovery too inaccurate, hull test failed)
    2  the input could not be parsed
    3  an input violates a precondition
    4  an internal numerical contract was breached
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

import numpy as np

from .channel import BiUnitaryChannel, KrausChannel
from .codesearch import (
    DEFAULT_FAMILY_SWEEP,
    DEFAULT_SEGMENT_GRID,
    CodeFamily,
    find_codes_buc4,
    multi_unitary_common_code,
)
from .documents import (
    DocumentError,
    decode_channel,
    decode_matrix,
    dumps,
    encode_complex,
    encode_matrix,
    encode_range,
    loads,
    report,
)
from .errors import BadParameter, NotCorrectable, NumericalFailure, PreconditionError
from .matcore import (
    DEFAULT_TOLERANCES,
    Projection,
    ToleranceConfig,
    hermitian_eigendecomposition,
    is_hermitian,
    is_unitary,
    normal_eigendecomposition,
)
from .numrange import hermitian_range, normal_hull_membership, unitary4_rank2_range, unitary_plot_data
from .qec import block_e_positivity, build_recovery, kl_verify, lambda_density_check, verify_recovery

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4

RECOVERY_TOLERANCE = 1e-8


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_PARSE)


def _read(path: str) -> tuple[bytes, object]:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        text = blob.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DocumentError(f"{path} is not UTF-8") from exc
    return blob, loads(text)


def _kraus_of(ch) -> KrausChannel:
    return ch.kraus() if isinstance(ch, BiUnitaryChannel) else ch


def _projection(doc) -> Projection:
    return Projection.from_matrix(decode_matrix(doc, square=True, where="projection"))


def _pair_list(values: dict) -> list:
    return [{"a": a, "b": b, "value": encode_complex(v)} for (a, b), v in sorted(values.items())]


# --- range -------------------------------------------------------------------------


def _guess_kind(a: np.ndarray, tol: ToleranceConfig) -> str:
    if is_hermitian(a, tol.eps_proj * max(1.0, np.linalg.norm(a))):
        return "hermitian"
    if is_unitary(a, tol.eps_proj * math.sqrt(a.shape[0])):
        return "unitary"
    return "normal"


def cmd_range(args, tol: ToleranceConfig) -> tuple[dict, int]:
    blob, doc = _read(args.input)
    a = decode_matrix(doc, square=True, where="input")
    kind = args.kind or _guess_kind(a, tol)
    status = EXIT_OK
    if kind == "hermitian":
        rng = hermitian_range(a, args.k, tol)
        result = encode_range(rng)
        if args.plot:
            from .plotting import plot_hermitian

            plot_hermitian(hermitian_eigendecomposition(a, tol).eigenvalues.real, rng, args.k, args.plot)
    elif kind == "unitary":
        if args.k != 2:
            raise BadParameter("the unitary range is computed for k = 2")
        rng = unitary4_rank2_range(a, tol)
        result = encode_range(rng)
        if args.plot:
            from .plotting import plot_unitary

            plot_unitary(unitary_plot_data(a, tol), args.plot)
    else:
        if args.point is None:
            raise DocumentError("--kind normal needs --point RE IM")
        lam = complex(*args.point)
        passes = normal_hull_membership(a, args.k, lam, tol)
        result = {"kind": "hull-test", "k": args.k, "point": encode_complex(lam), "passes": passes}
        status = EXIT_OK if passes else EXIT_NEGATIVE
        if args.plot:
            from .plotting import plot_normal

            plot_normal(normal_eigendecomposition(a, tol).eigenvalues, lam, passes, args.plot)
    return report("range", [blob], result, tol), status


# --- find-codes ----------------------------------------------------------------------


def _unitary_parts(ch: KrausChannel, tol: ToleranceConfig) -> tuple[list[np.ndarray], list[float]]:
    n = ch.dimension
    us, weights = [], []
    for e in ch.kraus_ops:
        w = float(np.linalg.norm(e) ** 2 / n)
        if w <= tol.eps_scalar:
            continue
        u = e / math.sqrt(w)
        if not is_unitary(u, tol.eps_proj * math.sqrt(n) * 10):
            raise PreconditionError("code search needs Kraus operators proportional to unitaries")
        us.append(u)
        weights.append(w)
    return us, weights


def _encode_family(family: CodeFamily, kraus: KrausChannel, tol: ToleranceConfig) -> dict:
    codes = []
    for code, _lam in family.codes:
        residual = kl_verify(kraus, code.projection, tol).max_residual
        codes.append({
            "projection": encode_matrix(code.projection.matrix),
            "rank": code.projection.rank,
            "compression_values": _pair_list(code.compression_values),
            "residual": residual,
        })
    rng = family.compression_range
    return {
        "channel_fingerprint": family.channel_fingerprint,
        "exhaustive": family.exhaustive,
        "notes": family.notes,
        "compression_range": None if rng is None else encode_range(rng),
        "codes": codes,
    }


def cmd_find_codes(args, tol: ToleranceConfig) -> tuple[dict, int]:
    blob, doc = _read(args.channel)
    ch = decode_channel(doc, tol)
    if isinstance(ch, BiUnitaryChannel):
        family = find_codes_buc4(ch.V, ch.W, ch.p, args.grid, args.sweep, args.seed, tol)
        kraus = ch.kraus()
    else:
        kraus = ch
        us, weights = _unitary_parts(ch, tol)
        if len(us) == 2:
            family = find_codes_buc4(us[0], us[1], weights[0], args.grid, args.sweep, args.seed, tol)
        elif len(us) >= 3:
            found = multi_unitary_common_code(us, seed=args.seed, tol=tol)
            family = CodeFamily(kraus.fingerprint(), exhaustive=False)
            if found.found:
                family.codes.append((found.code, None))
                family.notes = "common code found for all unitary errors"
            else:
                family.notes = (
                    "no common rank-2 code found; generic sets of three or more unitary "
                    "errors share none, so an empty family is the expected outcome"
                )
                if found.proven_empty:
                    family.notes += " (proven: " + found.notes + ")"
        else:
            raise PreconditionError("code search needs at least two unitary Kraus operators")
    result = _encode_family(family, kraus, tol)
    if isinstance(ch, BiUnitaryChannel) or len(ch) == 2:
        if not family.codes:
            raise NumericalFailure("no code found for a bi-unitary channel, where one always exists")
    return report("find-codes", [blob], result, tol), EXIT_OK


# --- verify / recover ------------------------------------------------------------------


def cmd_verify(args, tol: ToleranceConfig) -> tuple[dict, int]:
    cblob, cdoc = _read(args.channel)
    pblob, pdoc = _read(args.projection)
    kraus = _kraus_of(decode_channel(cdoc, tol))
    p = _projection(pdoc)
    rep = kl_verify(kraus, p, tol)
    ok, info = lambda_density_check(rep.estimates, tol)
    _, block_residual = block_e_positivity(kraus, p, tol)
    result = {
        "correctable": rep.correctable,
        "max_residual": rep.max_residual,
        "per_pair_residuals": rep.per_pair_residuals.tolist(),
        "lambda": encode_matrix(rep.estimates) if rep.correctable else None,
        "lambda_density": {
            "ok": ok,
            "hermitian_defect": info["hermitian_defect"],
            "min_eigenvalue": info["min_eigenvalue"],
            "trace": encode_complex(info["trace"]),
        },
        "block_positivity_residual": block_residual,
    }
    return report("verify", [cblob, pblob], result, tol), EXIT_OK if rep.correctable else EXIT_NEGATIVE


def cmd_recover(args, tol: ToleranceConfig) -> tuple[dict, int]:
    cblob, cdoc = _read(args.channel)
    pblob, pdoc = _read(args.projection)
    kraus = _kraus_of(decode_channel(cdoc, tol))
    p = _projection(pdoc)
    blobs = [cblob, pblob]
    if args.samples < 1:
        raise BadParameter("--samples must be positive")
    try:
        rec = build_recovery(kraus, p, tol)
    except NotCorrectable:
        rep = kl_verify(kraus, p, tol)
        result = {"correctable": False, "max_residual": rep.max_residual}
        return report("recover", blobs, result, tol), EXIT_NEGATIVE
    deviation = verify_recovery(kraus, rec, p, args.samples, args.seed)
    result = {
        "correctable": True,
        "recovery_kraus": [encode_matrix(r) for r in rec.channel.kraus_ops],
        "samples": args.samples,
        "seed": args.seed,
        "max_deviation": deviation,
    }
    status = EXIT_OK if deviation <= RECOVERY_TOLERANCE else EXIT_NEGATIVE
    return report("recover", blobs, result, tol), status


# --- entry point -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="compqec", description="Higher-rank numerical ranges and quantum error correction.")
    parser.add_argument("--tolerance-scalar", type=float, default=DEFAULT_TOLERANCES.eps_scalar,
                        help="scalar-compression residual threshold")
    parser.add_argument("--tolerance-degenerate", type=float, default=DEFAULT_TOLERANCES.eps_degenerate,
                        help="eigenvalue clustering threshold")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("range", help="rank-k numerical range of a matrix")
    p.add_argument("--input", required=True, help="matrix document")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kind", choices=["hermitian", "unitary", "normal"])
    p.add_argument("--point", type=float, nargs=2, metavar=("RE", "IM"),
                   help="value tested against the hull bound (normal kind)")
    p.add_argument("--plot", metavar="OUT.svg", help="write an SVG diagram")
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("find-codes", help="search correctable codes of a channel")
    p.add_argument("--channel", required=True)
    p.add_argument("--grid", type=int, default=DEFAULT_SEGMENT_GRID,
                   help="points sampled along a segment of compression-values")
    p.add_argument("--sweep", type=int, default=DEFAULT_FAMILY_SWEEP,
                   help="random points of the generic solution family")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_find_codes)

    p = sub.add_parser("verify", help="check the Knill-Laflamme conditions")
    p.add_argument("--channel", required=True)
    p.add_argument("--projection", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("recover", help="build and test a recovery channel")
    p.add_argument("--channel", required=True)
    p.add_argument("--projection", required=True)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_recover)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = ToleranceConfig(eps_scalar=args.tolerance_scalar, eps_degenerate=args.tolerance_degenerate)
        doc, status = args.func(args, tol)
        text = dumps(doc)
    except DocumentError as exc:
        sys.stderr.write(f"compqec: parse error: {exc}\n")
        return EXIT_PARSE
    except PreconditionError as exc:
        sys.stderr.write(f"compqec: precondition violated: {type(exc).__name__}: {exc}\n")
        return EXIT_PRECONDITION
    except NumericalFailure as exc:
        sys.stderr.write(f"compqec: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    sys.stdout.write(text)
    sys.stdout.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
