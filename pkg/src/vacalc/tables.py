"""JSON ingestion and export of spaces, algebras, modules and Lie data.

Files either spell out finite structure tables or name a preset builder.
Everything is validated at load: first the JSON schema, then structural
invariants (vacuum placement, known ids, the weight formula, L(j) degrees),
each reported as an InvariantViolation with a witness.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from . import examples
from .algebra import Operator, TableModes, VertexAlgebra
from .errors import InvariantViolation, SchemaError
from .grading import BasisVector, Space, Vector, vector_from_json, vector_to_json
from .lie import lie_from_json, lie_to_json
from .modules import Module, contragredient
from .scalar import from_json, re_part, to_json

SCALAR = {"oneOf": [
    {"type": "integer"},
    {"type": "string"},
    {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 4},
]}
VECTOR = {"oneOf": [
    {"type": "string"},
    {"type": "object", "additionalProperties": SCALAR},
    {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}},
]}
SPACE_SCHEMA = {
    "type": "object",
    "required": ["cells"],
    "properties": {
        "group_rank": {"type": "integer", "minimum": 0},
        "flags": {"type": "object", "properties": {
            "generalized": {"type": "boolean"}, "lower_bounded": {"type": "boolean"}}},
        "cells": {"type": "array", "items": {
            "type": "object",
            "required": ["weight"],
            "properties": {
                "degree": {"type": "array", "items": {"type": "integer"}},
                "weight": SCALAR,
                "dim": {"type": "integer", "minimum": 1},
                "ids": {"type": "array", "items": {"type": "string"}},
                "jordan": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            }}},
    },
}
GENERATORS = {"type": "object", "required": ["preset"],
              "properties": {"preset": {"type": "string"}, "params": {"type": "object"}}}
Y_TABLE = {"type": "array", "items": {"type": "array", "minItems": 4, "maxItems": 4,
                                      "prefixItems": [{"type": "string"}, {"type": "string"},
                                                      {"type": "integer"}, VECTOR]}}
L_OPS = {"type": "object", "additionalProperties": {"type": "array", "items": {
    "type": "array", "minItems": 2, "maxItems": 2}}}
ALGEBRA_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"const": "algebra"},
        "name": {"type": "string"},
        "generators": GENERATORS,
        "space": SPACE_SCHEMA,
        "vacuum": VECTOR,
        "mode": {"type": "object", "required": ["kind"], "properties": {
            "kind": {"enum": ["plain", "mobius", "conformal"]},
            "L": L_OPS, "omega": VECTOR, "central_charge": SCALAR}},
        "y_table": Y_TABLE,
    },
    "anyOf": [{"required": ["generators"]}, {"required": ["space", "vacuum", "mode", "y_table"]}],
}
MODULE_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"const": "module"},
        "name": {"type": "string"},
        "over": {"oneOf": [{"type": "string"}, {"type": "object"}]},
        "of": {"type": "object"},
        "generators": GENERATORS,
        "space": SPACE_SCHEMA,
        "L": L_OPS,
        "y_table": Y_TABLE,
        "debug": {"type": "object", "properties": {"drop_opposite_sign": {"type": "boolean"}}},
    },
    "anyOf": [{"required": ["generators"]}, {"required": ["over", "space", "y_table"]}],
}
LIE_SCHEMA = {
    "type": "object",
    "required": ["bracket_constants"],
    "properties": {
        "type": {"const": "lie"},
        "basis": {"type": "array", "items": {"type": "string"}},
        "bracket_constants": {"type": "array"},
        "modules": {"type": "array", "items": {"type": "object", "required": ["dim", "action_matrices"]}},
        "maps": {"type": "array"},
    },
}
RATFN_SCHEMA = {
    "type": "object",
    "required": ["g"],
    "properties": {"g": {"type": "array", "items": {"type": "array", "minItems": 3, "maxItems": 3}},
                   "r": {"type": "integer"}, "s": {"type": "integer"}, "t": {"type": "integer"}},
}


def _validate(data, schema, what):
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{what}: {exc.message} at {path}") from None


# ---------------------------------------------------------------- spaces


def space_from_json(data: dict) -> Space:
    _validate(data, SPACE_SCHEMA, "space")
    rank = data.get("group_rank", 0)
    flags = data.get("flags", {})
    basis = []
    for idx, cell in enumerate(data["cells"]):
        degree = tuple(cell.get("degree", [0] * rank))
        weight = from_json(cell["weight"])
        ids = cell.get("ids") or [f"c{idx}_{i}" for i in range(cell.get("dim", 1))]
        if "dim" in cell and cell["dim"] != len(ids):
            raise SchemaError(f"cell {idx}: dim {cell['dim']} but {len(ids)} ids")
        jordan = cell.get("jordan") or [0] * len(ids)
        if len(jordan) != len(ids):
            raise SchemaError(f"cell {idx}: {len(jordan)} jordan entries for {len(ids)} ids")
        basis.extend(BasisVector(b, degree, weight, j) for b, j in zip(ids, jordan))
    try:
        return Space(rank, basis, generalized=flags.get("generalized", False),
                     lower_bounded=flags.get("lower_bounded"))
    except ValueError as exc:
        raise SchemaError(f"space: {exc}") from None


def space_to_json(space: Space) -> dict:
    if not space.finite:
        raise ValueError("only finite spaces export as tables")
    cells = []
    for degree, weight in space.cells():
        bs = space.cell(degree, weight)
        cells.append({"degree": list(degree), "weight": to_json(weight), "dim": len(bs),
                      "ids": [b.id for b in bs], "jordan": [b.jordan_index for b in bs]})
    return {"group_rank": space.rank,
            "flags": {"generalized": space.generalized, "lower_bounded": space.lower_bounded},
            "cells": cells}


def _ops_from_json(data: dict, space: Space) -> dict:
    ops = {}
    for j in (-1, 0, 1):
        rows = data.get(str(j), [])
        table = {}
        for b, v in rows:
            table[b] = vector_from_json(v)
        ops[j] = Operator(table)
    return ops


def _ops_to_json(ops: dict, space: Space) -> dict:
    out = {}
    for j in (-1, 0, 1):
        rows = []
        for b in space.all_basis():
            v = ops[j].on_basis(b.id)
            if v.c:
                rows.append([b.id, vector_to_json(v)])
        out[str(j)] = rows
    return out


def _table(rows) -> dict:
    entries = {}
    for u, v, n, vec in rows:
        key = (u, v, int(n))
        if key in entries:
            raise InvariantViolation("duplicate_entry", {"entry": [u, v, n]})
        entries[key] = vector_from_json(vec)
    return entries


def _dump_modes(modes, vspace: Space, wspace: Space) -> list:
    """Every nonzero u_n w for finite graded spaces."""
    weights = [re_part(w) for _, w in wspace.cells()]
    top = max(weights, default=0)
    rows = []
    for u in vspace.all_basis():
        for w in wspace.all_basis():
            t = modes.trunc(u.id, w.id)
            if t is None:
                continue
            # wt(u_n w) = wt u + wt w - n - 1 <= top
            lowest = int(re_part(u.weight + w.weight) - 1 - top) - 1
            for n in range(t, lowest - 1, -1):
                out = modes.mode(u.id, n, w.id)
                if out.c:
                    rows.append([u.id, w.id, n, vector_to_json(out)])
    return rows


# ---------------------------------------------------------------- invariants


def _known(space: Space, vec: Vector, where: str):
    for b in vec.c:
        if not space.has(b):
            raise InvariantViolation("unknown_id", {"where": where, "id": b})


def validate_algebra(alg: VertexAlgebra):
    sp = alg.space
    zero = sp.zero_degree
    for b in alg.vacuum.c:
        if not sp.has(b) or sp.degree(b) != zero or sp.weight(b) != 0:
            raise InvariantViolation("vacuum_placement", {"vacuum": str(alg.vacuum), "id": b})
    if alg.kind == "conformal" and alg.omega is not None:
        for b in alg.omega.c:
            if not sp.has(b) or sp.degree(b) != zero or sp.weight(b) != 2:
                raise InvariantViolation("omega_placement", {"omega": str(alg.omega), "id": b})
    if isinstance(alg.modes, TableModes):
        _validate_entries(alg.modes, sp, sp, sp, alg.kind != "plain")
    if alg.kind == "mobius" and sp.finite:
        _validate_ops(alg.sl2, sp)
    return alg


def validate_module(mod: Module):
    if isinstance(mod.modes, TableModes):
        _validate_entries(mod.modes, mod.algebra.space, mod.space, mod.space, mod.algebra.kind != "plain")
    if mod.algebra.kind == "mobius" and mod.space.finite and mod.sl2:
        _validate_ops(mod.sl2, mod.space)
    return mod


def _validate_entries(modes: TableModes, vspace, wspace, target, graded: bool):
    for (u, w, n), vec in sorted(modes.entries.items()):
        for b, sp in ((u, vspace), (w, wspace)):
            if not sp.has(b):
                raise InvariantViolation("unknown_id", {"entry": [u, w, n], "id": b})
        _known(target, vec, f"{u}_{n} {w}")
        expect_deg = tuple(a + b for a, b in zip(vspace.degree(u), wspace.degree(w)))
        for b in vec.c:
            if target.degree(b) != expect_deg:
                raise InvariantViolation("mode_degree", {"entry": [u, w, n], "id": b,
                                                         "expected": list(expect_deg)})
            if graded:
                expect = vspace.weight(u) + wspace.weight(w) - n - 1
                if target.weight(b) != expect:
                    raise InvariantViolation("weight_formula", {"entry": [u, w, n], "id": b,
                                                                "lhs": str(target.weight(b)), "rhs": str(expect)})


def _validate_ops(ops: dict, space: Space):
    for j in (-1, 0, 1):
        for b in space.all_basis():
            v = ops[j].on_basis(b.id)
            _known(space, v, f"L({j}) {b.id}")
            for c in v.c:
                if space.weight(c) != b.weight - j or space.degree(c) != b.degree:
                    raise InvariantViolation("L_degree", {"operator": f"L({j})", "id": b.id, "image": c})


# ---------------------------------------------------------------- algebras


ALGEBRA_PRESETS = {
    "poly_mobius_lb": lambda p: examples.build_poly_mobius_lb(),
    "poly_minus_d": lambda p: examples.build_poly_minus_d(),
    "polynomial": lambda p: examples.build_comm_alg_va(examples.CommAlgSpec.polynomial(p["derivation"])),
    "two_dim": lambda p: examples.build_two_dim(),
    "trivial": lambda p: examples.build_trivial(p.get("kind", "mobius")),
    "dual_numbers_conformal": lambda p: examples.build_conformal_fixture(),
    "comm_alg": lambda p: examples.build_comm_alg_va(examples.CommAlgSpec.from_json(p), p.get("name", "")),
}


def algebra_from_json(data: dict, base: Path | None = None) -> VertexAlgebra:
    _validate(data, ALGEBRA_SCHEMA, "algebra")
    if "generators" in data:
        gen = data["generators"]
        try:
            builder = ALGEBRA_PRESETS[gen["preset"]]
        except KeyError:
            raise SchemaError(f"unknown algebra preset {gen['preset']!r}; known: {sorted(ALGEBRA_PRESETS)}") from None
        try:
            alg = builder(gen.get("params", {}))
        except examples.SpecInvalid as exc:
            raise InvariantViolation("spec", {"detail": str(exc)}) from None
        if data.get("name"):
            alg.name = data["name"]
        return validate_algebra(alg)
    space = space_from_json(data["space"])
    mode = data["mode"]
    entries = _table(data["y_table"])
    modes = TableModes(entries, space.has, space.has)
    kind = mode["kind"]
    sl2 = _ops_from_json(mode.get("L", {}), space) if kind == "mobius" else None
    omega = vector_from_json(mode["omega"]) if kind == "conformal" else None
    alg = VertexAlgebra(space, modes, vector_from_json(data["vacuum"]), kind, sl2, omega,
                        from_json(mode.get("central_charge", 0)), name=data.get("name", ""))
    return validate_algebra(alg)


def algebra_to_json(alg: VertexAlgebra) -> dict:
    if alg.preset is not None:
        return {"type": "algebra", "name": alg.name, "generators": alg.preset}
    if not alg.space.finite:
        raise ValueError("an infinite algebra without a preset cannot be exported")
    if not isinstance(alg.modes, TableModes) and alg.kind == "plain":
        raise ValueError("a plain algebra exports only from an explicit table or a preset")
    mode = {"kind": alg.kind}
    if alg.kind == "mobius":
        mode["L"] = _ops_to_json(alg.sl2, alg.space)
    if alg.kind == "conformal":
        mode["omega"] = vector_to_json(alg.omega)
        mode["central_charge"] = to_json(alg.central_charge)
    rows = ([[u, v, n, vector_to_json(vec)] for (u, v, n), vec in sorted(alg.modes.entries.items())]
            if isinstance(alg.modes, TableModes) else _dump_modes(alg.modes, alg.space, alg.space))
    return {"type": "algebra", "name": alg.name, "space": space_to_json(alg.space),
            "vacuum": vector_to_json(alg.vacuum), "mode": mode, "y_table": rows}


# ---------------------------------------------------------------- modules


def _resolve_algebra(ref, base: Path | None) -> VertexAlgebra:
    if isinstance(ref, dict):
        if ref.get("type") == "module":
            raise SchemaError("'over' must name an algebra")
        return algebra_from_json(ref, base)
    if ref in ALGEBRA_PRESETS:
        return algebra_from_json({"type": "algebra", "generators": {"preset": ref}})
    path = Path(ref) if base is None else base / ref
    return algebra_from_json(_read(path), path.parent)


def _module_preset(data: dict, base: Path | None) -> Module:
    gen = data["generators"]
    params = gen.get("params", {})
    name = gen["preset"]
    if name == "adjoint":
        alg = _resolve_algebra(data.get("over", params.get("algebra")), base)
        return alg.as_module()
    if name == "jordan_toy":
        return examples.build_jordan_toy(from_json(params.get("n", 0)), bool(params.get("corrupt", False)))
    if name == "trivial":
        return examples.build_trivial_module(params.get("kind", "mobius"))
    if name == "contragredient":
        if "of" not in data:
            raise SchemaError("a contragredient preset needs 'of'")
        inner = module_from_json(data["of"], base)
        return contragredient(inner, params.get("max_wt", 8))
    raise SchemaError(f"unknown module preset {name!r}; known: adjoint, contragredient, jordan_toy, trivial")


def module_from_json(data: dict, base: Path | None = None) -> Module:
    _validate(data, MODULE_SCHEMA, "module")
    if "generators" in data:
        mod = _module_preset(data, base)
    else:
        alg = _resolve_algebra(data["over"], base)
        space = space_from_json(data["space"])
        modes = TableModes(_table(data["y_table"]), alg.space.has, space.has)
        sl2 = _ops_from_json(data.get("L", {}), space) if alg.kind == "mobius" else None
        mod = Module(alg, space, modes, sl2, name=data.get("name", ""))
    if data.get("debug", {}).get("drop_opposite_sign"):
        mod.opposite_sign = False
    if data.get("name"):
        mod.name = data["name"]
    return validate_module(mod)


def module_to_json(mod: Module) -> dict:
    out = {"type": "module", "name": mod.name}
    alg = mod.algebra
    if mod.construction and "contragredient_of" in mod.construction:
        out["generators"] = {"preset": "contragredient", "params": {"max_wt": mod.construction.get("max_wt", 8)}}
        out["of"] = module_to_json(mod.construction["contragredient_of"])
    elif mod.space is alg.space and mod.modes is alg.modes:
        out["generators"] = {"preset": "adjoint"}
        out["over"] = algebra_to_json(alg)
    elif mod.preset is not None:
        out["generators"] = mod.preset
    else:
        if not mod.space.finite:
            raise ValueError("an infinite module without a preset cannot be exported")
        out["over"] = algebra_to_json(alg)
        out["space"] = space_to_json(mod.space)
        if alg.kind == "mobius":
            out["L"] = _ops_to_json(mod.sl2, mod.space)
        out["y_table"] = ([[u, v, n, vector_to_json(vec)] for (u, v, n), vec in sorted(mod.modes.entries.items())]
                          if isinstance(mod.modes, TableModes) else _dump_modes(mod.modes, alg.space, mod.space))
    if not mod.opposite_sign:
        out["debug"] = {"drop_opposite_sign": True}
    return out


# ---------------------------------------------------------------- files


def _read(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None


def kind_of(data: dict) -> str:
    if "type" in data:
        return data["type"]
    if "bracket_constants" in data:
        return "lie"
    if "g" in data:
        return "ratfn"
    if "over" in data:
        return "module"
    return "algebra"


def load(data: dict, base: Path | None = None):
    """The structure described by an already parsed JSON document."""
    kind = kind_of(data)
    if kind == "algebra":
        return algebra_from_json(data, base)
    if kind == "module":
        return module_from_json(data, base)
    if kind == "lie":
        _validate(data, LIE_SCHEMA, "lie")
        return lie_from_json(data)
    if kind == "ratfn":
        from .duality import RationalFn

        _validate(data, RATFN_SCHEMA, "rational function")
        return RationalFn.from_json(data)
    raise SchemaError(f"unknown document type {kind!r}")


def ingest_table(path):
    """Load and validate a JSON file (algebra, module, Lie data or rational function)."""
    path = Path(path)
    return load(_read(path), path.parent)


def export(obj) -> dict:
    if isinstance(obj, VertexAlgebra):
        return algebra_to_json(obj)
    if isinstance(obj, Module):
        return module_to_json(obj)
    if isinstance(obj, tuple) and len(obj) == 3:
        return {"type": "lie", **lie_to_json(*obj)}
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot export {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(export(obj), indent=1, sort_keys=True)

