"""FaarFile binary interchange format and JSONL decision files.

Layout: magic "FAAR" | version u16 LE | header_len u32 LE | UTF-8 JSON
header | row-major little-endian float32 payload.
"""

from __future__ import annotations

import json
import struct
from typing import Union

import numpy as np

from .errors import BadMagic, BadVersion, HeaderMismatch, TruncatedPayload
from .model import EpochTensor, Recording, RejectionDecision

MAGIC = b"FAAR"
VERSION = 1


def _header_for(obj) -> dict:
    if isinstance(obj, Recording):
        return {
            "kind": "recording",
            "shape": list(obj.data.shape),
            "fs": obj.fs,
            "channel_names": list(obj.channel_names),
            "dtype": "f32",
            "subject_id": obj.subject_id,
            "session_id": obj.session_id,
        }
    if isinstance(obj, EpochTensor):
        h = {
            "kind": "epochs",
            "shape": list(obj.data.shape),
            "fs": obj.fs,
            "channel_names": list(obj.channel_names),
            "dtype": "f32",
            "epoch_ids": list(obj.epoch_ids),
        }
        if obj.labels is not None:
            h["labels"] = [
                int(x) if isinstance(x, (int, np.integer)) else str(x)
                for x in obj.labels.tolist()
            ]
        if obj.subject_ids is not None:
            h["subject_ids"] = list(obj.subject_ids)
        if obj.session_ids is not None:
            h["session_ids"] = list(obj.session_ids)
        return h
    raise TypeError(f"cannot serialize {type(obj)!r}")


def write_faar(path, obj: Union[Recording, EpochTensor]) -> None:
    header = json.dumps(_header_for(obj)).encode("utf-8")
    payload = np.asarray(obj.data, dtype="<f4").tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", VERSION))
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(payload)


def read_faar(path) -> Union[Recording, EpochTensor]:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise BadMagic(f"{path}: not a FAAR file")
    if len(blob) < 10:
        raise TruncatedPayload(f"{path}: truncated preamble")
    (version,) = struct.unpack("<H", blob[4:6])
    if version != VERSION:
        raise BadVersion(f"{path}: version {version}, expected {VERSION}")
    (hlen,) = struct.unpack("<I", blob[6:10])
    if len(blob) < 10 + hlen:
        raise TruncatedPayload(f"{path}: truncated header")
    try:
        header = json.loads(blob[10 : 10 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise HeaderMismatch(f"{path}: unreadable header: {exc}") from exc
    shape = tuple(header.get("shape", ()))
    if header.get("dtype") != "f32":
        raise HeaderMismatch(f"{path}: unsupported dtype {header.get('dtype')!r}")
    expected = int(np.prod(shape)) * 4
    payload = blob[10 + hlen :]
    if len(payload) != expected:
        raise TruncatedPayload(
            f"{path}: payload {len(payload)} bytes, header promises {expected}"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(shape)
    kind = header.get("kind")
    if kind == "recording":
        if len(shape) != 2:
            raise HeaderMismatch(f"{path}: recording payload must be 2-D")
        return Recording(
            data=data,
            fs=float(header["fs"]),
            channel_names=tuple(header.get("channel_names", ())),
            subject_id=header.get("subject_id", ""),
            session_id=header.get("session_id", ""),
        )
    if kind == "epochs":
        if len(shape) != 3:
            raise HeaderMismatch(f"{path}: epochs payload must be 3-D")
        labels = header.get("labels")
        return EpochTensor(
            data=data,
            fs=float(header["fs"]),
            channel_names=tuple(header.get("channel_names", ())),
            labels=None if labels is None else np.asarray(labels),
            epoch_ids=tuple(header.get("epoch_ids", ())),
            subject_ids=tuple(header["subject_ids"]) if "subject_ids" in header else None,
            session_ids=tuple(header["session_ids"]) if "session_ids" in header else None,
        )
    raise HeaderMismatch(f"{path}: unknown kind {kind!r}")


def write_decisions_jsonl(path, decisions: list[RejectionDecision]) -> None:
    with open(path, "w") as fh:
        for d in decisions:
            fh.write(json.dumps(d.to_json_dict()) + "\n")


def read_decisions_jsonl(path) -> list[RejectionDecision]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            thr = d.get("threshold", "inf")
            out.append(
                RejectionDecision(
                    epoch_id=str(d["epoch_id"]),
                    sqi=float(d.get("sqi", 0.0)),
                    rejected=bool(d["rejected"]),
                    threshold=float("inf") if thr == "inf" else float(thr),
                    method=str(d.get("method", "external")),
                )
            )
    return out
