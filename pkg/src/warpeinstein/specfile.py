"""YAML spec files describing a :class:`~warpeinstein.warp.WarpSpec`.

Example::

    n1: 3
    n2: 3
    d: 2
    lambda: 0.0
    eps1: [-1, 1, 1]
    eps2: [1, 1, 1]
    alpha1: [1.0, 0.0, 0.0]
    alpha2: [0.0, 1.0, 0.0]
    phi1: {kind: constant, value: 1.0}
    f1: {kind: linear, slope: 0.0, offset: 1.0}
    phi2: {kind: constant, value: 1.0}
    f2: {kind: constant, value: 0.0}
    domain: [[-1, 1], [-1, 1], ...]   # optional, one interval per coordinate

Unknown keys are rejected. All problems found in a file are reported
together, each with its line number.
"""

from __future__ import annotations

import math
import os
from pathlib import Path
from typing import Any

import yaml

from .errors import DimensionError, NotNormalizableError, SpecError
from .profiles import ProfileFunction, catalog_kinds, kind_fields, make_profile
from .signature import DirectionVector, Signature
from .warp import DomainBox, WarpSpec

REQUIRED = ("n1", "n2", "d", "lambda", "eps1", "eps2", "alpha1", "alpha2", "phi1", "f1", "phi2", "f2")
OPTIONAL = ("domain",)
PROFILE_FIELDS = ("phi1", "f1", "phi2", "f2")


def _line(node) -> int:
    return node.start_mark.line + 1


def _plain(node):
    return yaml.safe_load(yaml.serialize(node))


class _Collector:
    def __init__(self, source: str):
        self.source = source
        self.issues: list[str] = []

    def add(self, node, msg: str):
        where = f"{self.source}:{_line(node)}" if node is not None else self.source
        self.issues.append(f"{where}: {msg}")


def _int(c: _Collector, node, key: str) -> int | None:
    val = _plain(node)
    if isinstance(val, bool) or not isinstance(val, int):
        c.add(node, f"{key} must be an integer (got {val!r})")
        return None
    return val


def _real(c: _Collector, node, key: str) -> float | None:
    val = _plain(node)
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        c.add(node, f"{key} must be a finite number (got {val!r})")
        return None
    return float(val)


def _real_list(c: _Collector, node, key: str) -> list[float] | None:
    if not isinstance(node, yaml.SequenceNode):
        c.add(node, f"{key} must be a list")
        return None
    out = [_real(c, item, f"{key}[{k}]") for k, item in enumerate(node.value)]
    return None if any(v is None for v in out) else out


def _profile(c: _Collector, node, key: str, base_dir: Path) -> ProfileFunction | None:
    if not isinstance(node, yaml.MappingNode):
        c.add(node, f"{key} must be a mapping with a 'kind' field")
        return None
    fields = {k.value: v for k, v in node.value}
    if "kind" not in fields:
        c.add(node, f"{key} is missing 'kind' (one of {', '.join(catalog_kinds())})")
        return None
    kind = _plain(fields.pop("kind"))
    if kind not in catalog_kinds():
        c.add(node, f"{key}: unknown profile kind {kind!r}; available: {', '.join(catalog_kinds())}")
        return None
    required, optional = kind_fields(kind)
    ok = True
    for name in required:
        if name not in fields:
            c.add(node, f"{key}: profile kind {kind!r} requires parameter {name!r}")
            ok = False
    params: dict[str, Any] = {}
    for name, vnode in fields.items():
        if name not in required and name not in optional:
            c.add(vnode, f"{key}: unknown parameter {name!r} for profile kind {kind!r}")
            ok = False
            continue
        if name == "file":
            path = Path(str(_plain(vnode)))
            params[name] = str(path if path.is_absolute() else (base_dir / path).resolve())
        elif name == "column":
            params[name] = str(_plain(vnode))
        elif name in ("q", "n2"):
            params[name] = _int(c, vnode, f"{key}.{name}")
            ok = ok and params[name] is not None
        else:
            params[name] = _real(c, vnode, f"{key}.{name}")
            ok = ok and params[name] is not None
    if not ok:
        return None
    try:
        return make_profile(kind, **params)
    except (ValueError, OSError) as exc:
        c.add(node, f"{key}: {exc}")
        return None


def loads_spec(text: str, base_dir: str | os.PathLike = ".", source: str = "<string>") -> WarpSpec:
    """Parse spec text; relative trajectory files resolve against ``base_dir``."""
    c = _Collector(source)
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f":{mark.line + 1}" if mark is not None else ""
        raise SpecError([f"{source}{line}: malformed YAML: {getattr(exc, 'problem', exc)}"]) from None
    if not isinstance(root, yaml.MappingNode):
        raise SpecError([f"{source}: top level must be a mapping"])
    nodes = {}
    for knode, vnode in root.value:
        key = knode.value
        if key in nodes:
            c.add(knode, f"duplicate key {key!r}")
        elif key not in REQUIRED and key not in OPTIONAL:
            c.add(knode, f"unknown field {key!r}")
        nodes[key] = vnode
    for key in REQUIRED:
        if key not in nodes:
            c.add(root, f"missing required field {key!r}")

    base = Path(base_dir)
    vals: dict[str, Any] = {}
    for key in ("n1", "n2", "d"):
        if key in nodes:
            vals[key] = _int(c, nodes[key], key)
    n1, n2 = vals.get("n1"), vals.get("n2")
    if n1 is not None and n1 < 3:
        c.add(nodes["n1"], f"n1 = {n1}: each conformal base factor needs dimension n1, n2 >= 3 for the Einstein conditions to apply")
    if n2 is not None and n2 < 3:
        c.add(nodes["n2"], f"n2 = {n2}: each conformal base factor needs dimension n1, n2 >= 3 for the Einstein conditions to apply")
    if vals.get("d") is not None and vals["d"] < 2:
        c.add(nodes["d"], f"d = {vals['d']}: fiber dimension must be >= 2")
    if "lambda" in nodes:
        vals["lambda"] = _real(c, nodes["lambda"], "lambda")

    for key, n in (("eps1", n1), ("eps2", n2)):
        if key not in nodes:
            continue
        raw = _real_list(c, nodes[key], key)
        if raw is None:
            continue
        bad = [k for k, e in enumerate(raw) if e not in (1.0, -1.0)]
        if bad:
            c.add(nodes[key], f"{key} entries must be +1 or -1 (bad positions {bad})")
        elif n is not None and len(raw) != n:
            c.add(nodes[key], f"{key} has length {len(raw)}, expected {n}")
        elif raw:
            vals[key] = Signature(tuple(int(e) for e in raw))
        else:
            c.add(nodes[key], f"{key} must not be empty")
    for key, n in (("alpha1", n1), ("alpha2", n2)):
        if key not in nodes:
            continue
        raw = _real_list(c, nodes[key], key)
        if raw is None:
            continue
        if n is not None and len(raw) != n:
            c.add(nodes[key], f"{key} has length {len(raw)}, expected {n}")
            continue
        try:
            vals[key] = DirectionVector(tuple(raw))
        except (ValueError, NotNormalizableError) as exc:
            c.add(nodes[key], f"{key}: {exc}")
    for key in PROFILE_FIELDS:
        if key in nodes:
            vals[key] = _profile(c, nodes[key], key, base)

    domain = None
    if "domain" in nodes:
        dnode = nodes["domain"]
        if not isinstance(dnode, yaml.SequenceNode):
            c.add(dnode, "domain must be a list of [lo, hi] intervals")
        else:
            ivs = []
            for k, item in enumerate(dnode.value):
                pair = _real_list(c, item, f"domain[{k}]")
                if pair is None:
                    continue
                if len(pair) != 2 or not pair[0] < pair[1]:
                    c.add(item, f"domain[{k}] must be [lo, hi] with lo < hi")
                    continue
                ivs.append(tuple(pair))
            if len(ivs) == len(dnode.value):
                domain = DomainBox(tuple(ivs))

    if c.issues:
        raise SpecError(c.issues)
    try:
        return WarpSpec(
            n1=vals["n1"], n2=vals["n2"], d=vals["d"],
            eps1=vals["eps1"], eps2=vals["eps2"], alpha1=vals["alpha1"], alpha2=vals["alpha2"],
            phi1=vals["phi1"], f1=vals["f1"], phi2=vals["phi2"], f2=vals["f2"],
            lam=vals["lambda"], domain=domain,
        )
    except DimensionError as exc:
        raise SpecError([f"{source}: {exc}"]) from None


def parse_spec(path: str | os.PathLike) -> WarpSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError([f"{path}: cannot read spec file ({exc.strerror})"]) from None
    return loads_spec(text, base_dir=path.parent, source=str(path))


def _profile_dict(prof: ProfileFunction, base_dir: Path | None) -> dict[str, Any]:
    out: dict[str, Any] = {"kind": prof.kind}
    for k, v in prof.params.items():
        if k == "file" and v is not None and base_dir is not None:
            v = os.path.relpath(v, base_dir)
        out[k] = v
    return out


def spec_to_dict(spec: WarpSpec, base_dir: str | os.PathLike | None = None) -> dict[str, Any]:
    base = None if base_dir is None else Path(base_dir).resolve()
    out: dict[str, Any] = {
        "n1": spec.n1, "n2": spec.n2, "d": spec.d, "lambda": spec.lam,
        "eps1": list(spec.eps1.eps), "eps2": list(spec.eps2.eps),
        "alpha1": [float(a) for a in spec.alpha1.alpha], "alpha2": [float(a) for a in spec.alpha2.alpha],
    }
    for key in PROFILE_FIELDS:
        prof = getattr(spec, key)
        if prof.kind == "trajectory" and prof.params.get("file") is None:
            raise ValueError(f"{key} is backed by an in-memory trajectory; give it a file before saving")
        out[key] = _profile_dict(prof, base)
    if spec.domain is not None:
        out["domain"] = [[lo, hi] for lo, hi in spec.domain.intervals]
    return out


def dump_spec(spec: WarpSpec, base_dir: str | os.PathLike | None = None) -> str:
    """Serialize to YAML text. Floats are written with full round-trip precision."""
    return yaml.safe_dump(spec_to_dict(spec, base_dir), sort_keys=False, default_flow_style=None)


def write_spec(spec: WarpSpec, path: str | os.PathLike) -> Path:
    path = Path(path)
    path.write_text(dump_spec(spec, base_dir=path.parent))
    return path
