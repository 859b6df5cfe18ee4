"""Partitioned environment, robot motion model and observation model.

A model document is JSON::

    {
      "vertices": [{"id": "v1", "edges": ["v2"], "enabled": ["a"],
                    "obs": {"p": 0.5}}, ...],
      "actions": ["a", ...],
      "propositions": ["p", ...],
      "initial": "v1",
      "motion": [{"from": "v1", "action": "a", "to": "v2", "prob": 1.0}, ...],
      "formula": "G F p"            # optional
    }

Declaration order of vertices, actions and propositions fixes every
downstream numbering.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import CapacityError, ParseError, ValidationError

PROB_TOL = 1e-9
ENUMERATION_CAP = 20

_TOP_KEYS = {"vertices", "actions", "propositions", "initial", "motion", "formula"}
_REQUIRED_TOP = _TOP_KEYS - {"formula"}
_VERTEX_KEYS = {"id", "edges", "enabled", "obs"}
_MOTION_KEYS = {"from", "action", "to", "prob"}


@dataclass(frozen=True)
class Environment:
    vertices: tuple
    edges: frozenset
    propositions: tuple
    initial_vertex: str

    def successors(self, v):
        return tuple(w for w in self.vertices if (v, w) in self.edges)


@dataclass(frozen=True)
class MotionModel:
    primitives: tuple
    enabled: dict
    transition_prob: dict

    def prob(self, v, u, w):
        return self.transition_prob.get((v, u, w), 0.0)

    def distribution(self, v, u, vertices):
        """Successors of ``v`` under ``u`` with positive probability, in vertex order."""
        return [(w, self.transition_prob[(v, u, w)]) for w in vertices
                if self.transition_prob.get((v, u, w), 0.0) > 0.0]


@dataclass(frozen=True)
class ObservationModel:
    obs_prob: dict = field(default_factory=dict)

    def prob(self, v, prop):
        return self.obs_prob.get((v, prop), 0.0)


@dataclass(frozen=True)
class ObservationSet:
    vertex: str
    observed: frozenset
    probability: float


class Model(NamedTuple):
    """The model triple; unpacks as ``env, motion, obs``."""
    env: Environment
    motion: MotionModel
    obs: ObservationModel


def validate(env, mm, om, tol=PROB_TOL):
    """Check all model invariants, raising ValidationError on the first violation."""
    vset = set(env.vertices)
    if len(vset) != len(env.vertices):
        raise ValidationError("duplicate vertex identifiers")
    if len(set(env.propositions)) != len(env.propositions):
        raise ValidationError("duplicate proposition names")
    if len(set(mm.primitives)) != len(mm.primitives):
        raise ValidationError("duplicate action names")
    if env.initial_vertex not in vset:
        raise ValidationError(f"initial vertex {env.initial_vertex!r} is not declared")
    for (a, b) in env.edges:
        if a not in vset or b not in vset:
            raise ValidationError(f"edge ({a!r}, {b!r}) references an undeclared vertex")
    for v in env.vertices:
        if not env.successors(v):
            raise ValidationError(f"vertex {v!r} has no outgoing edge")
        acts = mm.enabled.get(v, ())
        if not acts:
            raise ValidationError(f"vertex {v!r} has no enabled action")
        for u in acts:
            if u not in mm.primitives:
                raise ValidationError(f"vertex {v!r} enables undeclared action {u!r}")
    prims = set(mm.primitives)
    for (v, u, w), p in mm.transition_prob.items():
        if v not in vset or w not in vset:
            raise ValidationError(f"transition ({v!r}, {u!r}, {w!r}) references an undeclared vertex")
        if u not in prims:
            raise ValidationError(f"transition ({v!r}, {u!r}, {w!r}) uses undeclared action")
        if not (0.0 <= p <= 1.0) or math.isnan(p):
            raise ValidationError(f"P_m({v!r}, {u!r}, {w!r}) = {p} is outside [0, 1]")
        if p > 0.0 and (v, w) not in env.edges:
            raise ValidationError(f"P_m({v!r}, {u!r}, {w!r}) > 0 but ({v!r}, {w!r}) is not an edge")
        if p > 0.0 and u not in mm.enabled.get(v, ()):
            raise ValidationError(f"P_m({v!r}, {u!r}, {w!r}) > 0 but {u!r} is not enabled at {v!r}")
    for v in env.vertices:
        for u in mm.enabled[v]:
            total = math.fsum(mm.prob(v, u, w) for w in env.vertices)
            if abs(total - 1.0) > tol:
                raise ValidationError(
                    f"transition probabilities of ({v!r}, {u!r}) sum to {total!r}, not 1")
    props = set(env.propositions)
    for (v, prop), p in om.obs_prob.items():
        if v not in vset:
            raise ValidationError(f"observation probability for undeclared vertex {v!r}")
        if prop not in props:
            raise ValidationError(f"observation probability at {v!r} for undeclared proposition {prop!r}")
        if not (0.0 <= p <= 1.0) or math.isnan(p):
            raise ValidationError(f"P_o({v!r}, {prop!r}) = {p} is outside [0, 1]")


def enumerate_observations(env, om, v, cap=ENUMERATION_CAP):
    """All observation sets at ``v`` with positive probability.

    Propositions with probability exactly 1 are in every set and those with
    probability 0 in none; only the remaining ones are enumerated. Sets are
    ordered lexicographically on their membership vector over the uncertain
    propositions (declaration order, absent before present).
    """
    if v not in env.vertices:
        raise ValidationError(f"unknown vertex {v!r}")
    certain = []
    uncertain = []
    for prop in env.propositions:
        p = om.prob(v, prop)
        if p >= 1.0:
            certain.append(prop)
        elif p > 0.0:
            uncertain.append((prop, p))
    if len(uncertain) > cap:
        raise CapacityError(
            f"vertex {v!r} has {len(uncertain)} uncertain propositions (cap {cap})")
    out = []
    for bits in itertools.product((False, True), repeat=len(uncertain)):
        observed = set(certain)
        prob = 1.0
        for (prop, p), present in zip(uncertain, bits):
            if present:
                observed.add(prop)
                prob *= p
            else:
                prob *= 1.0 - p
        if prob > 0.0:
            out.append(ObservationSet(v, frozenset(observed), prob))
    return out


def realizable_symbols(env, om, cap=ENUMERATION_CAP):
    """Union of the observation sets over all vertices, in first-seen order."""
    seen = {}
    for v in env.vertices:
        for z in enumerate_observations(env, om, v, cap):
            seen.setdefault(z.observed, None)
    return list(seen)


# -- model documents ----------------------------------------------------------

def _expect(cond, message, field_path):
    if not cond:
        raise ParseError(message, field=field_path)


def _is_prob(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_document(source):
    """Parse model text into a dict, checking the schema. Returns (data, formula)."""
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    _expect(isinstance(data, dict), "model document must be a JSON object", "<root>")
    unknown = set(data) - _TOP_KEYS
    _expect(not unknown, f"unknown keys {sorted(unknown)}", "<root>")
    missing = _REQUIRED_TOP - set(data)
    _expect(not missing, f"missing keys {sorted(missing)}", "<root>")
    for key in ("actions", "propositions"):
        _expect(isinstance(data[key], list) and all(isinstance(x, str) for x in data[key]),
                "expected a list of strings", key)
    _expect(isinstance(data["initial"], str), "expected a vertex id", "initial")
    _expect(isinstance(data["vertices"], list), "expected a list", "vertices")
    for i, vx in enumerate(data["vertices"]):
        path = f"vertices[{i}]"
        _expect(isinstance(vx, dict), "expected an object", path)
        unknown = set(vx) - _VERTEX_KEYS
        _expect(not unknown, f"unknown keys {sorted(unknown)}", path)
        _expect(isinstance(vx.get("id"), str), "missing or non-string id", path + ".id")
        for key in ("edges", "enabled"):
            _expect(isinstance(vx.get(key, []), list)
                    and all(isinstance(x, str) for x in vx.get(key, [])),
                    "expected a list of strings", f"{path}.{key}")
        obs = vx.get("obs", {})
        _expect(isinstance(obs, dict) and all(_is_prob(p) for p in obs.values()),
                "expected a map from proposition to probability", path + ".obs")
    _expect(isinstance(data["motion"], list), "expected a list", "motion")
    for i, row in enumerate(data["motion"]):
        path = f"motion[{i}]"
        _expect(isinstance(row, dict), "expected an object", path)
        _expect(set(row) == _MOTION_KEYS,
                f"motion rows need exactly the keys {sorted(_MOTION_KEYS)}", path)
        for key in ("from", "action", "to"):
            _expect(isinstance(row[key], str), "expected a string", f"{path}.{key}")
        _expect(_is_prob(row["prob"]), "expected a number", path + ".prob")
    formula = data.get("formula")
    _expect(formula is None or isinstance(formula, str), "expected a string", "formula")
    return data, formula


def model_from_dict(data):
    vertices = tuple(vx["id"] for vx in data["vertices"])
    edges = frozenset((vx["id"], w) for vx in data["vertices"] for w in vx.get("edges", []))
    env = Environment(vertices, edges, tuple(data["propositions"]), data["initial"])
    enabled = {vx["id"]: tuple(vx.get("enabled", [])) for vx in data["vertices"]}
    tp = {}
    for i, row in enumerate(data["motion"]):
        key = (row["from"], row["action"], row["to"])
        if key in tp:
            raise ParseError(f"duplicate motion entry {key}", field=f"motion[{i}]")
        tp[key] = float(row["prob"])
    mm = MotionModel(tuple(data["actions"]), enabled, tp)
    op = {(vx["id"], prop): float(p)
          for vx in data["vertices"] for prop, p in vx.get("obs", {}).items()}
    return Model(env, mm, ObservationModel(op))


def load_environment(source, tol=PROB_TOL):
    """Parse and validate a model document (text). Returns a Model triple."""
    data, _ = parse_document(source)
    model = model_from_dict(data)
    validate(*model, tol=tol)
    return model


def load_environment_file(path, tol=PROB_TOL):
    """Load a model file; returns (Model, formula or None)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    data, formula = parse_document(text)
    model = model_from_dict(data)
    validate(*model, tol=tol)
    return model, formula


def dump_environment(env, mm, om, formula=None):
    """Serialize a model triple back to a JSON document."""
    verts = []
    for v in env.vertices:
        obs = {p: om.obs_prob[(v, p)] for p in env.propositions if (v, p) in om.obs_prob}
        verts.append({
            "id": v,
            "edges": [w for w in env.vertices if (v, w) in env.edges],
            "enabled": list(mm.enabled[v]),
            "obs": obs,
        })
    motion = [
        {"from": v, "action": u, "to": w, "prob": mm.transition_prob[(v, u, w)]}
        for v in env.vertices for u in mm.primitives for w in env.vertices
        if (v, u, w) in mm.transition_prob
    ]
    doc = {
        "vertices": verts,
        "actions": list(mm.primitives),
        "propositions": list(env.propositions),
        "initial": env.initial_vertex,
        "motion": motion,
    }
    if formula is not None:
        doc["formula"] = formula
    return json.dumps(doc, indent=2)
