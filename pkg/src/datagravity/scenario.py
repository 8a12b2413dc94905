"""
Scenario files: one technology profile plus optional data objects, kernels,
a placement region and discrete slots, written as YAML.

Example::

    version: 1
    profile:
      label: 7nm FP32 + DDR5
      e_compute_pj: 1.31
      alpha: 2.03125e-07        # J / (bit * m**beta)
      beta: 2.0
      d_ref_m: 0.01             # optional, default 1.0
      bits_per_access: 64       # optional, default 64
    objects:
      - {id: weights, position: [0.0, 0.0, 0.0], entropy_per_access: 64, access_frequency: 1.0e9}
    kernels:
      - id: gemm
        traffic: {weights: 6.4e10}
        position: [0.005, 0.0, 0.0]   # optional start point
    region: {min: [-0.01, -0.01, 0.0], max: [0.01, 0.01, 0.0]}
    slots: [[0.0, 0.0, 0.0], [0.005, 0.0, 0.0]]

Only ``profile`` is required.  Unknown keys are rejected; errors name the
offending key and its line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import yaml
from yaml.constructor import SafeConstructor
from yaml.nodes import MappingNode, ScalarNode, SequenceNode

from .energy import TechProfile
from .errors import DomainError
from .gravity import DataObject
from .placement import ComputeKernel, PlacementProblem

SCHEMA_VERSION = 1

_PROFILE_REQUIRED = ("label", "e_compute_pj", "alpha", "beta")
_PROFILE_OPTIONAL = ("d_ref_m", "bits_per_access")
_OBJECT_REQUIRED = ("id", "position", "entropy_per_access", "access_frequency")
_KERNEL_REQUIRED = ("id", "traffic")


class ScenarioError(DomainError):
    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = "" if line is None else f"line {line}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class Scenario:
    profile: TechProfile
    objects: tuple = ()
    kernels: tuple = ()
    region: tuple | None = None
    slots: tuple | None = None
    version: int = SCHEMA_VERSION

    def __post_init__(self):
        known = {o.id for o in self.objects}
        for kern in self.kernels:
            for oid in kern.traffic:
                if oid not in known:
                    raise ScenarioError(f"kernel {kern.id!r} references unknown object {oid!r}",
                                        key=oid)

    def placement_problem(self, seed=None) -> PlacementProblem:
        if self.region is None:
            raise ScenarioError("placement needs a 'region'", key="region")
        return PlacementProblem(self.objects, self.kernels, self.profile, self.region,
                                self.slots, seed=seed)


def _line(node):
    return node.start_mark.line + 1


_constructor = SafeConstructor()


def _scalar(node, where):
    if not isinstance(node, ScalarNode):
        raise ScenarioError(f"{where} must be a scalar", _line(node), where)
    return _constructor.construct_object(node)


def _number(node, where):
    value = _scalar(node, where)
    if isinstance(value, str):
        # YAML 1.1 reads exponent forms without a dot ("1e9") as strings
        try:
            value = float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where} must be a number, got {value!r}", _line(node), where)
    return float(value)


def _text(node, where):
    value = _scalar(node, where)
    if value is None or isinstance(value, (list, dict)):
        raise ScenarioError(f"{where} must be text", _line(node), where)
    return str(value)


def _vector(node, where):
    if not isinstance(node, SequenceNode) or len(node.value) != 3:
        raise ScenarioError(f"{where} must be a list of three numbers", _line(node), where)
    return tuple(_number(n, f"{where}[{i}]") for i, n in enumerate(node.value))


def _sequence(node, where):
    if not isinstance(node, SequenceNode):
        raise ScenarioError(f"{where} must be a list", _line(node), where)
    return node.value


def _mapping(node, where, required=(), optional=()):
    """Key -> value node for a mapping, rejecting unknown and reporting all missing keys."""
    if not isinstance(node, MappingNode):
        raise ScenarioError(f"{where} must be a mapping", _line(node), where)
    allowed = set(required) | set(optional)
    out = {}
    for key_node, value_node in node.value:
        key = _text(key_node, f"{where} key")
        if allowed and key not in allowed:
            raise ScenarioError(f"unknown key {key!r} in {where}", _line(key_node), key)
        if key in out:
            raise ScenarioError(f"duplicate key {key!r} in {where}", _line(key_node), key)
        out[key] = value_node
    missing = [k for k in required if k not in out]
    if missing:
        raise ScenarioError(f"{where} is missing required key(s): {', '.join(missing)}",
                            _line(node), missing[0])
    return out


def _guard(node, build):
    try:
        return build()
    except ScenarioError:
        raise
    except DomainError as exc:
        raise ScenarioError(str(exc), _line(node)) from None


def _profile(node):
    m = _mapping(node, "profile", _PROFILE_REQUIRED, _PROFILE_OPTIONAL)
    kwargs = {}
    if "d_ref_m" in m:
        kwargs["d_ref"] = _number(m["d_ref_m"], "profile.d_ref_m")
    if "bits_per_access" in m:
        bits = _number(m["bits_per_access"], "profile.bits_per_access")
        if bits != int(bits):
            raise ScenarioError("profile.bits_per_access must be an integer",
                                _line(m["bits_per_access"]), "bits_per_access")
        kwargs["bits_per_access"] = int(bits)
    return _guard(node, lambda: TechProfile(
        _text(m["label"], "profile.label"),
        _number(m["e_compute_pj"], "profile.e_compute_pj") / 1e12,
        _number(m["alpha"], "profile.alpha"),
        _number(m["beta"], "profile.beta"),
        **kwargs))


def _object(node, i):
    where = f"objects[{i}]"
    m = _mapping(node, where, _OBJECT_REQUIRED)
    return _guard(node, lambda: DataObject(
        _text(m["id"], f"{where}.id"),
        _vector(m["position"], f"{where}.position"),
        _number(m["entropy_per_access"], f"{where}.entropy_per_access"),
        _number(m["access_frequency"], f"{where}.access_frequency")))


def _kernel(node, i, known):
    where = f"kernels[{i}]"
    m = _mapping(node, where, _KERNEL_REQUIRED, ("position",))
    kid = _text(m["id"], f"{where}.id")
    traffic = {}
    for oid, bits_node in _mapping(m["traffic"], f"{where}.traffic").items():
        if oid not in known:
            raise ScenarioError(f"kernel {kid!r} references unknown object {oid!r}",
                                _line(bits_node), oid)
        traffic[oid] = _number(bits_node, f"{where}.traffic.{oid}")
    pos = _vector(m["position"], f"{where}.position") if "position" in m else None
    return _guard(node, lambda: ComputeKernel(kid, traffic, pos))


def _region(node):
    m = _mapping(node, "region", ("min", "max"))
    return (_vector(m["min"], "region.min"), _vector(m["max"], "region.max"))


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario YAML text."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"invalid YAML: {getattr(exc, 'problem', exc)}",
                            None if mark is None else mark.line + 1) from None
    if root is None:
        raise ScenarioError("empty scenario file; 'profile' is required", 1, "profile")
    top = _mapping(root, "scenario", ("profile",),
                   ("version", "objects", "kernels", "region", "slots"))
    version = SCHEMA_VERSION
    if "version" in top:
        version = _number(top["version"], "version")
        if version != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported scenario version {version:g}", _line(top["version"]),
                                "version")
    profile = _profile(top["profile"])
    objects = tuple(_object(n, i) for i, n in enumerate(_sequence(top["objects"], "objects"))) \
        if "objects" in top else ()
    ids = [o.id for o in objects]
    if len(set(ids)) != len(ids):
        raise ScenarioError("duplicate object id", _line(top["objects"]), "objects")
    known = set(ids)
    kernels = tuple(_kernel(n, i, known) for i, n in enumerate(_sequence(top["kernels"], "kernels"))) \
        if "kernels" in top else ()
    region = _region(top["region"]) if "region" in top else None
    slots = None
    if "slots" in top:
        slots = tuple(_vector(n, f"slots[{i}]") for i, n in enumerate(_sequence(top["slots"], "slots")))
    scenario = Scenario(profile, objects, kernels, region, slots, int(version))
    if region is not None and (kernels or slots):
        _guard(top["region"], lambda: scenario.placement_problem())
    return scenario


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _pj_for(joules):
    """A picojoule value that parses back to exactly ``joules``."""
    pj = joules * 1e12
    cand = pj
    for _ in range(8):
        if cand / 1e12 == joules:
            return cand
        cand = math.nextafter(cand, math.inf if cand / 1e12 < joules else -math.inf)
    return pj


def scenario_to_dict(scn: Scenario) -> dict:
    p = scn.profile
    out = {
        "version": scn.version,
        "profile": {
            "label": p.label,
            "e_compute_pj": _pj_for(p.e_compute),
            "alpha": p.alpha,
            "beta": p.beta,
            "d_ref_m": p.d_ref,
            "bits_per_access": p.bits_per_access,
        },
    }
    if scn.objects:
        out["objects"] = [{"id": o.id, "position": list(o.position),
                           "entropy_per_access": o.entropy_per_access,
                           "access_frequency": o.access_frequency} for o in scn.objects]
    if scn.kernels:
        kernels = []
        for k in scn.kernels:
            entry = {"id": k.id, "traffic": dict(k.traffic)}
            if k.position is not None:
                entry["position"] = list(k.position)
            kernels.append(entry)
        out["kernels"] = kernels
    if scn.region is not None:
        out["region"] = {"min": [float(v) for v in scn.region[0]],
                         "max": [float(v) for v in scn.region[1]]}
    if scn.slots is not None:
        out["slots"] = [[float(v) for v in s] for s in scn.slots]
    return out


def dump_scenario(scn: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(scn), sort_keys=False, default_flow_style=None)
