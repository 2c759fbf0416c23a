"""JSON formats for groups, modules, complexes and reports.

Built-in groups are stored by constructor name so that loading always goes
through the audited constructors; custom groups carry their full table.
Modules store only generator matrices and are re-audited on load.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .. import exactla as la
from .. import grp, rep
from ..grp import FiniteGroup
from ..homalg.complexes import ChainComplex
from ..rep import ModuleHom, RepModule

FORMAT_VERSION = 1


class FormatError(ValueError):
    pass


class AuditFailure(ValueError):
    """A loaded action is not a representation; ``pair`` holds the offending labels."""

    def __init__(self, msg: str, pair=None):
        super().__init__(msg)
        self.pair = pair


# -- scalars and matrices ------------------------------------------------------


def _enc_scalar(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return int(x)


def _dec_scalar(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return x
    raise FormatError(f"matrix entries must be integers or 'a/b' strings, got {x!r}")


def encode_matrix(a) -> list[list]:
    a = np.asarray(a)
    if a.ndim != 2:
        raise FormatError("expected a 2-d matrix")
    return [[_enc_scalar(x) for x in row] for row in a.tolist()]


def decode_matrix(rows, shape: tuple[int, int] | None = None) -> np.ndarray:
    vals = [[_dec_scalar(x) for x in row] for row in rows]
    if shape is not None and shape[0] == 0:
        return np.zeros(shape, dtype=np.int64)
    if any(len(r) != len(vals[0]) for r in vals):
        raise FormatError("ragged matrix")
    dtype = object if any(isinstance(x, Fraction) for r in vals for x in r) else np.int64
    a = np.array(vals, dtype=dtype).reshape(len(vals), len(vals[0]) if vals else 0)
    if shape is not None and a.shape != shape:
        if a.size == 0 and int(np.prod(shape)) == 0:
            return np.zeros(shape, dtype=np.int64)
        raise FormatError(f"matrix has shape {a.shape}, expected {shape}")
    return a


# -- groups --------------------------------------------------------------------


def _jsonable_label(lab):
    return list(_jsonable_label(x) for x in lab) if isinstance(lab, tuple) else lab


def _label_from_json(lab):
    return tuple(_label_from_json(x) for x in lab) if isinstance(lab, list) else lab


def group_to_dict(G: FiniteGroup) -> dict:
    try:
        if grp.by_name(G.name, G.params) is G:
            d = {"constructor": G.name}
            if G.params:
                d["params"] = dict(G.params)
            return d
    except (grp.GroupError, KeyError, ValueError):
        pass
    return {
        "name": G.name,
        "labels": [_jsonable_label(x) for x in G.labels],
        "table": G.mult.tolist(),
        "gens": dict(G.gens),
    }


def group_from_dict(d: dict) -> FiniteGroup:
    if "constructor" in d:
        return grp.by_name(d["constructor"], d.get("params"))
    try:
        labels = [_label_from_json(x) for x in d["labels"]]
        return FiniteGroup(d["name"], labels, np.array(d["table"]), {k: int(v) for k, v in d["gens"].items()})
    except KeyError as e:
        raise FormatError(f"custom group is missing field {e}") from None


# -- modules -------------------------------------------------------------------


def module_to_dict(M: RepModule) -> dict:
    return {
        "kind": "module",
        "format": FORMAT_VERSION,
        "name": M.name,
        "group": group_to_dict(M.group),
        "ring": M.ring.to_dict(),
        "rank": M.rank,
        "generators": {k: encode_matrix(v) for k, v in sorted(M.gen_mats().items())},
    }


def _module_from_parts(G: FiniteGroup, ring: la.RingSpec, d: dict) -> RepModule:
    n = int(d["rank"])
    gens = {k: decode_matrix(v, (n, n)) for k, v in d["generators"].items()}
    if n == 0:
        return rep.zero_module(G, ring)
    try:
        return RepModule.from_generators(G, ring, gens, name=d.get("name", ""))
    except rep.ActionError as e:
        pair = getattr(e, "pair", None)
        labels = None if pair is None else (G.labels[pair[0]], G.labels[pair[1]])
        raise AuditFailure(f"invalid action on load: {e} (failing pair {labels})", labels) from None


def module_from_dict(d: dict) -> RepModule:
    if d.get("kind") != "module":
        raise FormatError("not a module file")
    return _module_from_parts(group_from_dict(d["group"]), la.RingSpec.from_dict(d["ring"]), d)


# -- complexes -----------------------------------------------------------------


def complex_to_dict(C: ChainComplex) -> dict:
    mods = [module_to_dict(M) for M in C.modules]
    for m in mods:
        del m["group"], m["ring"], m["format"], m["kind"]
    return {
        "kind": "complex",
        "format": FORMAT_VERSION,
        "name": C.name,
        "group": group_to_dict(C.group),
        "ring": C.ring.to_dict(),
        "modules": mods,
        "differentials": [encode_matrix(d.matrix) for d in C.diffs],
    }


def complex_from_dict(d: dict) -> ChainComplex:
    if d.get("kind") != "complex":
        raise FormatError("not a complex file")
    G = group_from_dict(d["group"])
    ring = la.RingSpec.from_dict(d["ring"])
    mods = [_module_from_parts(G, ring, m) for m in d["modules"]]
    if len(d["differentials"]) != max(len(mods) - 1, 0):
        raise FormatError("need one differential between consecutive modules")
    diffs = []
    for j, rows in enumerate(d["differentials"]):
        shape = (mods[j + 1].rank, mods[j].rank)
        diffs.append(ModuleHom(mods[j], mods[j + 1], ring.array(decode_matrix(rows, shape)), name=f"d{j}"))
    return ChainComplex(mods, diffs, d.get("name", ""))


# -- files ---------------------------------------------------------------------


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write(path: str | Path, obj: dict) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON ({e})") from None


def load(path: str | Path):
    d = read(path)
    kind = d.get("kind")
    if kind == "module":
        return module_from_dict(d)
    if kind == "complex":
        return complex_from_dict(d)
    raise FormatError(f"{path}: unknown kind {kind!r}")
