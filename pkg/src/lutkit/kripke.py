"""Finite reflexive Kripke models.

States are named by strings but stored by index; sets of states are int
bitmasks over the state ordering (bit ``k`` is ``states[k]``).  Atoms not
listed in the valuation are false everywhere.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Model", "FrameFlags", "ModelError", "ModelFormatError", "UnknownStateError",
    "UnknownAgentError", "NonReflexiveError", "DuplicateStateError",
    "EnumerationLimitError", "FRAME_CLASSES",
    "load_model", "read_model", "dump_model", "restrict", "enumerate_models",
    "frame_properties", "bits", "count_models", "random_model", "squeeze", "expand",
]

FRAME_CLASSES = ("reflexive", "transitive", "euclidean", "both")


class ModelError(ValueError):
    pass


class ModelFormatError(ModelError):
    pass


class UnknownStateError(ModelError):
    def __init__(self, state):
        super().__init__(f"UnknownState({state})")
        self.state = state


class UnknownAgentError(ModelError):
    def __init__(self, agent):
        super().__init__(f"UnknownAgent({agent})")
        self.agent = agent


class NonReflexiveError(ModelError):
    def __init__(self, agent, state):
        super().__init__(f"NonReflexive({state}) for agent {agent}")
        self.agent = agent
        self.state = state


class DuplicateStateError(ModelError):
    def __init__(self, state):
        super().__init__(f"DuplicateState({state})")
        self.state = state


class EnumerationLimitError(RuntimeError):
    pass


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Model:
    states: tuple[str, ...]
    agents: tuple[str, ...]
    # succ[a][k]: bitmask of the agents[a]-successors of states[k]
    succ: tuple[tuple[int, ...], ...]
    # sorted (atom, bitmask) pairs
    valuation: tuple[tuple[str, int], ...]

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.states, self.agents, self.succ, self.valuation))

    @cached_property
    def key(self):
        """Structure without state names; equal keys evaluate identically."""
        return (len(self.states), self.agents, self.succ,
                tuple(av for av in self.valuation if av[1]))

    @cached_property
    def _state_index(self) -> dict[str, int]:
        return {name: k for k, name in enumerate(self.states)}

    @cached_property
    def _agent_index(self) -> dict[str, int]:
        return {name: k for k, name in enumerate(self.agents)}

    @cached_property
    def _val(self) -> dict[str, int]:
        return dict(self.valuation)

    @classmethod
    def build(cls, states: Iterable[str], agents: Iterable[str],
              relations: Mapping[str, Iterable[tuple[str, str]]],
              valuation: Mapping[str, Iterable[str]] | None = None,
              reflexive_closure: bool = False) -> "Model":
        states = tuple(states)
        if not states:
            raise ModelFormatError("a model needs at least one state")
        index: dict[str, int] = {}
        for k, name in enumerate(states):
            if name in index:
                raise DuplicateStateError(name)
            index[name] = k
        agents = tuple(agents)
        if len(set(agents)) != len(agents):
            raise ModelFormatError("duplicate agent names")
        for agent in relations:
            if agent not in agents:
                raise UnknownAgentError(agent)

        def idx(name):
            if name not in index:
                raise UnknownStateError(name)
            return index[name]

        succ = []
        for agent in agents:
            row = [0] * len(states)
            for src, dst in relations.get(agent, ()):
                row[idx(src)] |= 1 << idx(dst)
            for k, name in enumerate(states):
                if not row[k] >> k & 1:
                    if not reflexive_closure:
                        raise NonReflexiveError(agent, name)
                    row[k] |= 1 << k
            succ.append(tuple(row))

        val = []
        for atom, where in (valuation or {}).items():
            mask = 0
            for name in where:
                mask |= 1 << idx(name)
            val.append((atom, mask))
        return cls(states, agents, tuple(succ), tuple(sorted(val)))

    # -- queries ---------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def full(self) -> int:
        return (1 << len(self.states)) - 1

    def index(self, state: str) -> int:
        try:
            return self._state_index[state]
        except KeyError:
            raise UnknownStateError(state) from None

    def agent_index(self, agent: str) -> int:
        try:
            return self._agent_index[agent]
        except KeyError:
            raise UnknownAgentError(agent) from None

    def mask(self, states) -> int:
        """Bitmask of ``states`` (an int mask is passed through)."""
        if isinstance(states, int):
            if states & ~self.full:
                raise ModelError("state mask out of range")
            return states
        m = 0
        for name in states:
            m |= 1 << self.index(name)
        return m

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(self.states[k] for k in bits(mask))

    def successors(self, agent: str, state: str) -> frozenset[str]:
        return self.names(self.succ[self.agent_index(agent)][self.index(state)])

    def relation(self, agent: str) -> set[tuple[str, str]]:
        row = self.succ[self.agent_index(agent)]
        return {(self.states[k], self.states[j]) for k in range(self.size) for j in bits(row[k])}

    def val(self, atom: str) -> int:
        return self._val.get(atom, 0)

    def true_at(self, atom: str) -> frozenset[str]:
        return self.names(self.val(atom))

    @property
    def atoms(self) -> tuple[str, ...]:
        return tuple(atom for atom, _ in self.valuation)


# -- file format ---------------------------------------------------------------

def load_model(document) -> Model:
    """Build a model from the JSON model document (text or decoded mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise ModelFormatError("model document must be an object")
    unknown = set(document) - {"states", "agents", "relations", "reflexive_closure", "valuation"}
    if unknown:
        raise ModelFormatError(f"unknown keys: {sorted(unknown)}")
    states = document.get("states")
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise ModelFormatError("'states' must be a list of strings")
    agents = document.get("agents", [])
    if not isinstance(agents, list) or not all(isinstance(a, str) for a in agents):
        raise ModelFormatError("'agents' must be a list of strings")
    relations = document.get("relations", {})
    if not isinstance(relations, Mapping):
        raise ModelFormatError("'relations' must be an object")
    pairs = {}
    for agent, edges in relations.items():
        if not isinstance(edges, list) or not all(
                isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)
                for e in edges):
            raise ModelFormatError(f"relation of {agent!r} must be a list of [from, to] pairs")
        pairs[agent] = [tuple(e) for e in edges]
    closure = document.get("reflexive_closure", False)
    if not isinstance(closure, bool):
        raise ModelFormatError("'reflexive_closure' must be a boolean")
    valuation = document.get("valuation", {})
    if not isinstance(valuation, Mapping) or not all(
            isinstance(v, list) and all(isinstance(x, str) for x in v) for v in valuation.values()):
        raise ModelFormatError("'valuation' must map atoms to lists of states")
    return Model.build(states, agents, pairs, valuation, reflexive_closure=closure)


def read_model(path) -> Model:
    return load_model(Path(path).read_text(encoding="utf-8"))


def dump_model(model: Model) -> dict:
    """Inverse of load_model; relations are written out in full."""
    return {
        "states": list(model.states),
        "agents": list(model.agents),
        "relations": {
            agent: [[model.states[k], model.states[j]]
                    for k in range(model.size) for j in bits(model.succ[a][k])]
            for a, agent in enumerate(model.agents)
        },
        "reflexive_closure": False,
        "valuation": {atom: [model.states[k] for k in bits(mask)] for atom, mask in model.valuation},
    }


# -- operations ----------------------------------------------------------------

_TABLE_LIMIT = 8


@lru_cache(maxsize=4096)
def squeeze_table(n: int, keep: int) -> tuple[int, ...]:
    """``table[mask]`` renumbers ``mask & keep`` onto the kept positions (n <= 8)."""
    positions = list(bits(keep))
    table = []
    for mask in range(1 << n):
        out = 0
        for new, k in enumerate(positions):
            if mask >> k & 1:
                out |= 1 << new
        table.append(out)
    return tuple(table)


@lru_cache(maxsize=4096)
def expand_table(n: int, keep: int) -> tuple[int, ...]:
    """Inverse of ``squeeze_table``: lifts a submodel mask back to ``n`` positions."""
    positions = list(bits(keep))
    table = []
    for sub in range(1 << len(positions)):
        out = 0
        for new, k in enumerate(positions):
            if sub >> new & 1:
                out |= 1 << k
        table.append(out)
    return tuple(table)


def squeeze(n: int, keep: int, mask: int) -> int:
    if n <= _TABLE_LIMIT:
        return squeeze_table(n, keep)[mask]
    out = 0
    for new, k in enumerate(bits(keep)):
        if mask >> k & 1:
            out |= 1 << new
    return out


def expand(n: int, keep: int, sub: int) -> int:
    if n <= _TABLE_LIMIT:
        return expand_table(n, keep)[sub]
    out = 0
    for new, k in enumerate(bits(keep)):
        if sub >> new & 1:
            out |= 1 << k
    return out


def restrict(model: Model, states) -> Model:
    """Submodel on ``states`` (names or bitmask), keeping the state order."""
    keep = model.mask(states)
    if keep == 0:
        raise ModelError("cannot restrict a model to the empty set")
    if keep == model.full:
        return model
    n = model.size
    old = list(bits(keep))
    if n <= _TABLE_LIMIT:
        table = squeeze_table(n, keep)
        succ = tuple(tuple(table[row[k]] for k in old) for row in model.succ)
        valuation = tuple((atom, table[mask]) for atom, mask in model.valuation)
    else:
        succ = tuple(tuple(squeeze(n, keep, row[k]) for k in old) for row in model.succ)
        valuation = tuple((atom, squeeze(n, keep, mask)) for atom, mask in model.valuation)
    return Model(tuple(model.states[k] for k in old), model.agents, succ, valuation)


@dataclass(frozen=True)
class FrameFlags:
    reflexive: bool
    transitive: bool
    euclidean: bool


def _flags(row: tuple[int, ...]) -> FrameFlags:
    n = len(row)
    reflexive = all(row[x] >> x & 1 for x in range(n))
    # xRy and yRz imply xRz
    transitive = all(row[x] >> z & 1
                     for x in range(n) for y in range(n) if row[x] >> y & 1
                     for z in range(n) if row[y] >> z & 1)
    # xRy and xRz imply yRz
    euclidean = all(row[y] >> z & 1
                    for x in range(n) for y in range(n) if row[x] >> y & 1
                    for z in range(n) if row[x] >> z & 1)
    return FrameFlags(reflexive, transitive, euclidean)


def frame_properties(model: Model) -> dict[str, FrameFlags]:
    return {agent: _flags(model.succ[a]) for a, agent in enumerate(model.agents)}


def _in_class(flags: FrameFlags, frame_class: str) -> bool:
    if not flags.reflexive:
        return False
    if frame_class == "transitive":
        return flags.transitive
    if frame_class == "euclidean":
        return flags.euclidean
    if frame_class == "both":
        return flags.transitive and flags.euclidean
    return True


def _relations(n: int, frame_class: str) -> list[tuple[int, ...]]:
    off = [(x, y) for x in range(n) for y in range(n) if x != y]
    found = []
    for choice in range(1 << len(off)):
        row = [1 << x for x in range(n)]
        for b, (x, y) in enumerate(off):
            if choice >> b & 1:
                row[x] |= 1 << y
        row = tuple(row)
        if _in_class(_flags(row), frame_class):
            found.append(row)
    return found


def enumerate_models(max_states: int, agents: Iterable[str] = ("i",), atoms: Iterable[str] = ("p",),
                     frame_class: str = "reflexive", cap: int | None = None) -> Iterator[Model]:
    """Every labelled model with 1..max_states states in the frame class.

    States are named ``s0, s1, ...``.  No isomorphism reduction is done.
    Raises EnumerationLimitError before yielding model number ``cap + 1``.
    """
    if max_states < 1:
        raise ValueError("max_states must be at least 1")
    if frame_class not in FRAME_CLASSES:
        raise ValueError(f"unknown frame class {frame_class!r}")
    agents = tuple(agents)
    atoms = tuple(sorted(set(atoms)))
    produced = 0
    for n in range(1, max_states + 1):
        names = tuple(f"s{k}" for k in range(n))
        rels = _relations(n, frame_class)
        for succ in itertools.product(rels, repeat=len(agents)):
            for masks in itertools.product(range(1 << n), repeat=len(atoms)):
                if cap is not None and produced >= cap:
                    raise EnumerationLimitError(f"more than {cap} models")
                produced += 1
                yield Model(names, agents, succ, tuple(zip(atoms, masks)))


def count_models(max_states: int, n_agents: int = 1, n_atoms: int = 1,
                 frame_class: str = "reflexive") -> int:
    return sum(len(_relations(n, frame_class)) ** n_agents * (1 << n) ** n_atoms
               for n in range(1, max_states + 1))


def random_model(rng, max_states: int = 4, agents=("i",), atoms=("p", "q")) -> Model:
    """Random reflexive model with 1..max_states states (``rng`` is a random.Random)."""
    n = rng.randint(1, max_states)
    succ = tuple(tuple((1 << k) | rng.getrandbits(n) for k in range(n)) for _ in agents)
    valuation = tuple((atom, rng.getrandbits(n)) for atom in sorted(atoms))
    return Model(tuple(f"s{k}" for k in range(n)), tuple(agents), succ, valuation)
