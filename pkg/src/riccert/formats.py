"""On-disk formats: problem/certificate/witness JSON and trajectory CSV.

Numbers are rendered with 17 significant digits so parse(render(x)) == x for
every finite double, and objects are serialized with sorted keys so equal
payloads are byte-identical.  Certificate and witness files embed a SHA-256
checksum of the canonical (A, B) serialization, which ties a certificate file
to the problem file it was computed from.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .certificates import DiagonalPair, RiccatiCertificate
from .lv import DelayLVModel, InteractionFunction
from .witnesses import InfeasibilityWitness

__all__ = [
    "FormatError",
    "format_float",
    "canon_dumps",
    "problem_checksum",
    "Problem",
    "load_problem",
    "certificate_to_json",
    "certificate_from_json",
    "witness_to_json",
    "witness_from_json",
    "decision_to_json",
    "write_trajectory_csv",
]


class FormatError(ValueError):
    """Malformed or missing data in an input file; the message names the key."""


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    if x == 0.0:
        return "0"  # normalize -0.0 so the canonical form is unique
    return format(x, ".17g")


def _canon(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, np.ndarray):
        return _canon(value.tolist())
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_canon(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {_canon(v)}" for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canon_dumps(value) -> str:
    """Canonical JSON text: sorted keys, 17-digit floats, trailing newline."""
    return _canon(value) + "\n"


def problem_checksum(A, B) -> str:
    payload = canon_dumps({"A": np.asarray(A, dtype=float), "B": np.asarray(B, dtype=float)})
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


def _require(data: dict, key: str, context: str):
    if key not in data:
        raise FormatError(f"missing key {key!r} in {context}")
    return data[key]


def _parse_matrix(data: dict, key: str, context: str) -> np.ndarray:
    raw = _require(data, key, context)
    try:
        M = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"key {key!r} in {context} is not a numeric matrix") from exc
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.size == 0:
        raise FormatError(f"key {key!r} in {context} must be a nonempty square matrix")
    if not np.isfinite(M).all():
        raise FormatError(f"key {key!r} in {context} contains non-finite entries")
    return M


def _parse_vector(data: dict, key: str, n: int, context: str) -> np.ndarray:
    raw = _require(data, key, context)
    try:
        v = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"key {key!r} in {context} is not a numeric vector") from exc
    if v.ndim != 1 or v.size != n:
        raise FormatError(f"key {key!r} in {context} must be a vector of length {n}")
    if not np.isfinite(v).all():
        raise FormatError(f"key {key!r} in {context} contains non-finite entries")
    return v


def _parse_function(raw, context: str) -> InteractionFunction:
    if not isinstance(raw, dict):
        raise FormatError(f"function entries in {context} must be objects with a 'kind'")
    kind = raw.get("kind")
    if kind is None:
        raise FormatError(f"missing key 'kind' in function entry of {context}")
    try:
        if kind == "power":
            return InteractionFunction("power", alpha=float(raw.get("alpha", 1.0)))
        if kind == "tabulated":
            xs = raw.get("xs")
            ys = raw.get("ys")
            if xs is None or ys is None:
                raise FormatError(f"missing key 'xs'/'ys' in tabulated function of {context}")
            return InteractionFunction(
                "tabulated", xs=tuple(xs), ys=tuple(ys), attested=bool(raw.get("attested", False))
            )
        return InteractionFunction(str(kind))
    except FormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise FormatError(f"invalid function entry in {context}: {exc}") from exc


def _parse_functions(data: dict, key: str, n: int, context: str):
    raw = data.get(key)
    if raw is None:
        return (InteractionFunction("identity"),) * n
    if isinstance(raw, dict):
        return (_parse_function(raw, context),) * n
    if not isinstance(raw, list) or len(raw) != n:
        raise FormatError(f"key {key!r} in {context} must be one function object or a list of {n}")
    return tuple(_parse_function(entry, context) for entry in raw)


@dataclass
class Problem:
    """Parsed problem file: the matrix pair plus optional dynamics data."""

    A: np.ndarray
    B: np.ndarray
    c: np.ndarray | None = None
    tau: float | None = None
    f: tuple = ()
    g: tuple = ()

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def checksum(self) -> str:
        return problem_checksum(self.A, self.B)

    def to_model(self, tau: float | None = None) -> DelayLVModel:
        if self.c is None:
            raise FormatError("missing key 'c' in problem (required for dynamics)")
        delay = tau if tau is not None else self.tau
        if delay is None:
            raise FormatError("missing key 'tau' in problem (pass a delay explicitly)")
        return DelayLVModel(self.A, self.B, self.c, delay, self.f, self.g)


def load_problem(path: str) -> Problem:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path} must contain a JSON object")
    context = path
    A = _parse_matrix(data, "A", context)
    B = _parse_matrix(data, "B", context)
    if A.shape != B.shape:
        raise FormatError(f"keys 'A' and 'B' in {context} must have matching shapes")
    n = A.shape[0]
    c = _parse_vector(data, "c", n, context) if "c" in data else None
    tau = None
    if "tau" in data:
        try:
            tau = float(data["tau"])
        except (TypeError, ValueError) as exc:
            raise FormatError(f"key 'tau' in {context} must be a number") from exc
        if not (math.isfinite(tau) and tau >= 0.0):
            raise FormatError(f"key 'tau' in {context} must be finite and nonnegative")
    f = _parse_functions(data, "f", n, context)
    g = _parse_functions(data, "g", n, context)
    return Problem(A=A, B=B, c=c, tau=tau, f=f, g=g)


def certificate_to_json(cert: RiccatiCertificate, checksum: str) -> str:
    return canon_dumps(
        {
            "p": cert.pair.p,
            "q": cert.pair.q,
            "lambda_max": cert.lambda_max,
            "beta": cert.beta,
            "checksum": checksum,
        }
    )


def certificate_from_json(path: str) -> tuple[DiagonalPair, float, float, str]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path} must contain a JSON object")
    p = _require(data, "p", path)
    q = _require(data, "q", path)
    lam = _require(data, "lambda_max", path)
    beta = _require(data, "beta", path)
    checksum = _require(data, "checksum", path)
    try:
        pair = DiagonalPair(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"keys 'p'/'q' in {path} are invalid: {exc}") from exc
    try:
        lam = float(lam)
        beta = float(beta)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"keys 'lambda_max'/'beta' in {path} must be numbers") from exc
    if not isinstance(checksum, str):
        raise FormatError(f"key 'checksum' in {path} must be a string")
    return pair, lam, beta, checksum


def witness_to_json(witness: InfeasibilityWitness, min_diag: float, checksum: str) -> str:
    return canon_dumps(
        {
            "H11": witness.h11,
            "H12": witness.h12,
            "H22": witness.h22,
            "min_diag": min_diag,
            "checksum": checksum,
        }
    )


def witness_from_json(path: str) -> tuple[InfeasibilityWitness, float, str]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path} must contain a JSON object")
    h11 = _parse_matrix(data, "H11", path)
    h12 = _parse_matrix(data, "H12", path)
    h22 = _parse_matrix(data, "H22", path)
    min_diag = _require(data, "min_diag", path)
    checksum = _require(data, "checksum", path)
    try:
        min_diag = float(min_diag)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"key 'min_diag' in {path} must be a number") from exc
    if not isinstance(checksum, str):
        raise FormatError(f"key 'checksum' in {path} must be a string")
    try:
        witness = InfeasibilityWitness(h11, h12, h22)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"witness blocks in {path} are invalid: {exc}") from exc
    return witness, min_diag, checksum


def decision_to_json(result, checksum: str) -> str:
    payload = {"verdict": str(result.verdict.value), "checksum": checksum}
    if result.certificate is not None:
        payload["certificate"] = {
            "p": result.certificate.pair.p,
            "q": result.certificate.pair.q,
            "lambda_max": result.certificate.lambda_max,
            "beta": result.certificate.beta,
        }
    else:
        payload["certificate"] = None
    if result.witness is not None:
        payload["witness"] = {
            "H11": result.witness.h11,
            "H12": result.witness.h12,
            "H22": result.witness.h22,
        }
    else:
        payload["witness"] = None
    return canon_dumps(payload)


def write_trajectory_csv(path: str, trajectory) -> None:
    n = trajectory.states.shape[1]
    header = "t," + ",".join(f"x{i + 1}" for i in range(n))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for t, row in zip(trajectory.times, trajectory.states):
            fh.write(format_float(t) + "," + ",".join(format_float(v) for v in row) + "\n")
