"""JSON encodings for every value the CLI reads or writes.

Complex matrices are stored as ``{"rows": n, "cols": m, "data": [[re, im],
...]}`` with row-major data; parsers reject length mismatches.  Container
formats wrap that encoding with dimension metadata.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import ChannelChoi, KrausSet
from .extend import FeasibilityReport, SpanAction
from .opsys import span_dim
from .supermaps import PrePostForm, Superchannel


class SerializationError(ValueError):
    pass


def encode_matrix(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise SerializationError(f"expected a matrix, got array of rank {m.ndim}")
    data = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": data}


def decode_matrix(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise SerializationError(f"{where}: expected an object with rows/cols/data")
    try:
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    except KeyError as exc:
        raise SerializationError(f"{where}: missing key {exc}") from exc
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise SerializationError(f"{where}: rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise SerializationError(f"{where}: data length {got} does not match {rows}x{cols}")
    out = np.empty(rows * cols, dtype=complex)
    for k, entry in enumerate(data):
        if (not isinstance(entry, (list, tuple))) or len(entry) != 2:
            raise SerializationError(f"{where}: data[{k}] is not an [re, im] pair")
        out[k] = complex(float(entry[0]), float(entry[1]))
    return out.reshape(rows, cols)


def encode_channel(phi: ChannelChoi) -> dict:
    return {"d": phi.d, "r": phi.r, "choi": encode_matrix(phi.choi)}


def decode_channel(obj, where: str = "channel") -> ChannelChoi:
    try:
        d, r = int(obj["d"]), int(obj["r"])
        choi = decode_matrix(obj["choi"], where=f"{where}.choi")
    except (KeyError, TypeError) as exc:
        raise SerializationError(f"{where}: {exc}") from exc
    try:
        return ChannelChoi(d, r, choi)
    except ValueError as exc:
        raise SerializationError(f"{where}: {exc}") from exc


def encode_kraus(k: KrausSet) -> dict:
    return {"d": k.d, "r": k.r, "ops": [encode_matrix(a) for a in k.ops]}


def decode_kraus(obj, where: str = "kraus") -> KrausSet:
    try:
        d, r = int(obj["d"]), int(obj["r"])
        ops = [decode_matrix(a, where=f"{where}.ops[{i}]") for i, a in enumerate(obj["ops"])]
    except (KeyError, TypeError) as exc:
        raise SerializationError(f"{where}: {exc}") from exc
    try:
        return KrausSet(d, r, tuple(ops))
    except ValueError as exc:
        raise SerializationError(f"{where}: {exc}") from exc


def encode_superchannel(sc: Superchannel) -> dict:
    return {"d1": sc.d1, "r1": sc.r1, "d2": sc.d2, "r2": sc.r2,
            "choi": encode_matrix(sc.choi)}


def decode_superchannel(obj, where: str = "superchannel") -> Superchannel:
    try:
        dims = [int(obj[k]) for k in ("d1", "r1", "d2", "r2")]
        choi = decode_matrix(obj["choi"], where=f"{where}.choi")
    except (KeyError, TypeError) as exc:
        raise SerializationError(f"{where}: {exc}") from exc
    try:
        return Superchannel(*dims, choi)
    except ValueError as exc:
        raise SerializationError(f"{where}: {exc}") from exc


def encode_action(action: SpanAction) -> dict:
    return {"d1": action.d1, "r1": action.r1, "d2": action.d2, "r2": action.r2,
            "images": [encode_matrix(m) for m in action.images]}


def decode_action(obj, where: str = "action") -> SpanAction:
    try:
        dims = [int(obj[k]) for k in ("d1", "r1", "d2", "r2")]
        images = obj["images"]
    except (KeyError, TypeError) as exc:
        raise SerializationError(f"{where}: {exc}") from exc
    if not isinstance(images, list) or len(images) != span_dim(dims[0], dims[1]):
        raise SerializationError(
            f"{where}: expected {span_dim(dims[0], dims[1])} images for the canonical basis")
    mats = [decode_matrix(m, where=f"{where}.images[{i}]") for i, m in enumerate(images)]
    try:
        return SpanAction(*dims, tuple(mats))
    except ValueError as exc:
        raise SerializationError(f"{where}: {exc}") from exc


def encode_pre_post(form: PrePostForm) -> dict:
    return {"e": form.e, "v_pre": encode_matrix(form.v_pre),
            "post": encode_channel(form.post)}


def decode_pre_post(obj, where: str = "characterisation") -> PrePostForm:
    try:
        e = int(obj["e"])
        v = decode_matrix(obj["v_pre"], where=f"{where}.v_pre")
        post = decode_channel(obj["post"], where=f"{where}.post")
    except (KeyError, TypeError) as exc:
        raise SerializationError(f"{where}: {exc}") from exc
    return PrePostForm(e, v, post)


def encode_feasibility(report: FeasibilityReport) -> dict:
    out = {"status": report.status,
           "iterations": report.iterations,
           "gap": report.gap,
           "affine_residual": report.affine_residual,
           "psd_residual": report.psd_residual,
           "witness": None}
    if report.witness is not None:
        out["witness"] = encode_superchannel(report.witness)
    return out


def encode_basis(d: int, r: int, mats) -> dict:
    return {"d": d, "r": r, "dim": len(mats),
            "basis": [encode_matrix(m) for m in mats]}


def load_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SerializationError(f"{path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def save_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")
