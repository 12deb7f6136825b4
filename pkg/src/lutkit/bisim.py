"""Autobisimulation on finite models.

On a finite model the sets of states definable by an epistemic formula are
exactly the unions of blocks of the coarsest autobisimulation.  The
quantifier of ``U_i`` ranges over such sets, which ``closed_masks``
enumerates; ``characteristic`` turns any of them back into a formula.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .formula import Atom, Formula, Know, Neg, conj_all, disj_all
from .kripke import Model, bits

__all__ = [
    "Partition", "UnstablePartitionError", "partition", "quotient",
    "characteristic", "characteristic_of_set", "closed_masks", "closed_subsets",
]


class UnstablePartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    # blocks as state bitmasks, ordered by their lowest member
    blocks: tuple[int, ...]
    block_of: tuple[int, ...]
    model: Model = field(compare=False, repr=False)

    def __len__(self):
        return len(self.blocks)

    def named_blocks(self) -> list[list[str]]:
        """Blocks as sorted name lists, themselves sorted."""
        return sorted(sorted(self.model.names(b)) for b in self.blocks)

    def block_mask(self, state: str) -> int:
        return self.blocks[self.block_of[self.model.index(state)]]


def _renumber(signatures) -> tuple[int, ...]:
    ids: dict = {}
    return tuple(ids.setdefault(sig, len(ids)) for sig in signatures)


def partition(model: Model) -> Partition:
    """Coarsest stable partition by signature refinement."""
    n = model.size
    full = model.full
    # uniform atoms never split a block
    relevant = [mask for _, mask in model.valuation if mask not in (0, full)]
    block_of = _renumber(tuple(mask >> k & 1 for mask in relevant) for k in range(n))
    count = max(block_of) + 1
    while True:
        signatures = []
        for k in range(n):
            succ_blocks = []
            for row in model.succ:
                seen = 0
                for j in bits(row[k]):
                    seen |= 1 << block_of[j]
                succ_blocks.append(seen)
            signatures.append((block_of[k], tuple(succ_blocks)))
        refined = _renumber(signatures)
        new_count = max(refined) + 1
        block_of = refined
        if new_count == count:
            break
        count = new_count
    blocks = [0] * count
    for k, b in enumerate(block_of):
        blocks[b] |= 1 << k
    return Partition(tuple(blocks), block_of, model)


def quotient(model: Model, part: Partition) -> Model:
    """Collapse each block to one state named ``{a,b,...}``."""
    union = 0
    for block in part.blocks:
        union |= block
    if union != model.full or sum(b.bit_count() for b in part.blocks) != model.size:
        raise UnstablePartitionError("blocks do not partition the model's states")
    for b, block in enumerate(part.blocks):
        members = list(bits(block))
        for atom, mask in model.valuation:
            if len({mask >> k & 1 for k in members}) > 1:
                raise UnstablePartitionError(f"block {b} disagrees on atom {atom}")
        for row in model.succ:
            targets = set()
            for k in members:
                seen = 0
                for j in bits(row[k]):
                    seen |= 1 << part.block_of[j]
                targets.add(seen)
            if len(targets) > 1:
                raise UnstablePartitionError(f"block {b} is split by a successor step")

    names = tuple("{" + ",".join(model.states[k] for k in bits(block)) + "}" for block in part.blocks)
    reps = [next(bits(block)) for block in part.blocks]
    succ = []
    for row in model.succ:
        new_row = []
        for rep in reps:
            seen = 0
            for j in bits(row[rep]):
                seen |= 1 << part.block_of[j]
            new_row.append(seen)
        succ.append(tuple(new_row))
    valuation = tuple(
        (atom, sum(1 << b for b, rep in enumerate(reps) if mask >> rep & 1))
        for atom, mask in model.valuation)
    return Model(names, model.agents, tuple(succ), valuation)


def characteristic(model: Model, state, rank: int, _memo=None) -> Formula:
    """Epistemic formula describing ``state`` up to modal depth ``rank``.

    From rank ``model.size`` on, its extension is the bisimulation block
    of ``state``.  Subformulas are shared, not simplified.
    """
    memo = {} if _memo is None else _memo
    k = state if isinstance(state, int) else model.index(state)

    def go(k: int, r: int) -> Formula:
        hit = memo.get((k, r))
        if hit is not None:
            return hit
        parts: list[Formula] = [Atom(atom) if mask >> k & 1 else Neg(Atom(atom))
                                for atom, mask in model.valuation]
        if r > 0:
            for a, agent in enumerate(model.agents):
                succ = list(bits(model.succ[a][k]))
                parts.extend(Neg(Know(agent, Neg(go(j, r - 1)))) for j in succ)
                parts.append(Know(agent, disj_all(go(j, r - 1) for j in succ)))
        result = conj_all(parts)
        memo[(k, r)] = result
        return result

    return go(k, rank)


def characteristic_of_set(model: Model, part: Partition, mask: int, rank: int | None = None) -> Formula:
    """Disjunction of characteristic formulas of one member per block in ``mask``."""
    rank = model.size if rank is None else rank
    memo: dict = {}
    reps = [next(bits(block)) for block in part.blocks if block & mask]
    return disj_all(characteristic(model, k, rank, memo) for k in reps)


def closed_masks(part: Partition, k: int) -> Iterator[int]:
    """Unions of blocks containing the block of state index ``k``.

    The pivot block alone comes first and the full state set last.
    """
    pivot = part.block_of[k]
    base = part.blocks[pivot]
    others = [b for i, b in enumerate(part.blocks) if i != pivot]
    for choice in range(1 << len(others)):
        mask = base
        for i in bits(choice):
            mask |= others[i]
        yield mask


def closed_subsets(part: Partition, state: str) -> Iterator[frozenset[str]]:
    model = part.model
    for mask in closed_masks(part, model.index(state)):
        yield model.names(mask)
