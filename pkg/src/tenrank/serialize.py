"""JSON codecs for tensors, decompositions and local maps, plus content digests."""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .decompositions import Decomposition, Term
from .errors import BadSpec
from .scalars import format_scalar, parse_scalar
from .tensor import LocalMap, Tensor, build_tensor

FORMAT = 1


def tensor_to_obj(t: Tensor) -> dict[str, Any]:
    return {
        "shape": list(t.shape),
        "scalar": t.kind,
        "entries": [{"idx": list(idx), "val": format_scalar(v)} for idx, v in sorted(t.entries.items())],
    }


def tensor_from_obj(obj: dict[str, Any]) -> Tensor:
    try:
        kind = obj.get("scalar", "cyc")
        if kind not in ("cyc", "eps"):
            raise BadSpec(f"unknown scalar kind {kind!r}")
        entries = [(e["idx"], parse_scalar(str(e["val"]), kind)) for e in obj["entries"]]
        return build_tensor(obj["shape"], entries, kind)
    except (KeyError, TypeError) as exc:
        raise BadSpec(f"malformed tensor JSON: {exc}") from exc


def decomposition_to_obj(dec: Decomposition) -> dict[str, Any]:
    return {
        "shape": list(dec.shape),
        "terms": [
            {"scale": format_scalar(t.scale), "vectors": [[format_scalar(x) for x in v] for v in t.vectors]}
            for t in dec.terms
        ],
    }


def decomposition_from_obj(obj: dict[str, Any]) -> Decomposition:
    try:
        terms = [
            Term(parse_scalar(str(t.get("scale", "1"))), tuple(tuple(parse_scalar(str(x)) for x in v) for v in t["vectors"]))
            for t in obj["terms"]
        ]
        return Decomposition(obj["shape"], terms)
    except (KeyError, TypeError) as exc:
        raise BadSpec(f"malformed decomposition JSON: {exc}") from exc


def map_to_obj(m: LocalMap) -> dict[str, Any]:
    return {"matrices": [[[format_scalar(x) for x in row] for row in mat] for mat in m.matrices]}


def map_from_obj(obj: dict[str, Any]) -> LocalMap:
    try:
        return LocalMap([[[parse_scalar(str(x)) for x in row] for row in mat] for mat in obj["matrices"]])
    except (KeyError, TypeError) as exc:
        raise BadSpec(f"malformed map JSON: {exc}") from exc


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def tensor_digest(t: Tensor) -> str:
    canon = json.dumps(tensor_to_obj(t), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canon.encode()).hexdigest()


def load_tensor(path: str) -> Tensor:
    with open(path) as fh:
        return tensor_from_obj(json.load(fh))


def load_decomposition(path: str) -> Decomposition:
    with open(path) as fh:
        return decomposition_from_obj(json.load(fh))
