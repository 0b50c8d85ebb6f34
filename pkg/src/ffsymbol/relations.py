"""The linear-relation catalog, instance generation, and relation scoring.

Relations are homogeneous integer constraints on symbol coefficients.
Sliding relations place a short letter pattern at any pair/triple of
adjacent slots; suffix relations anchor the pattern at the end of the
key.  Relations stated with half-integer weights are stored multiplied
through by their denominator (``scale``) so every residual check is
exact-integer.  The cycle and flip symmetries are carried as two-term
equivalence relations pairing a key with its image.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from ffsymbol.keys import LETTERS, canonical_key, cycle_key, flip_key
from ffsymbol.symbol import Symbol

SLIDING = "sliding"
SUFFIX = "suffix"
DIHEDRAL = "dihedral"


@dataclass(frozen=True)
class Relation:
    name: str
    terms: tuple[tuple[str, int], ...]
    anchor: str
    scale: int = 1

    @property
    def pattern_len(self) -> int:
        return len(self.terms[0][0]) if self.terms else 0

    def slots(self, loop: int) -> range:
        """Valid 1-based slot indices at the given loop order."""
        last = 2 * loop - self.pattern_len + 1
        if self.anchor == SUFFIX:
            return range(last, last + 1)
        return range(1, last + 1)


@dataclass(frozen=True)
class RelationInstance:
    relation: str
    loop: int
    slot: int
    context: str
    members: tuple[tuple[str, int], ...]


def _rel(name: str, anchor: str, spec: Sequence[tuple[str, int]], scale: int = 1) -> Relation:
    terms = tuple((pattern, weight) for pattern, weight in spec)
    lengths = {len(p) for p, _ in terms}
    assert len(lengths) == 1, name
    return Relation(name, terms, anchor, scale)


@functools.cache
def catalog() -> tuple[Relation, ...]:
    """All 32 relations: triple 0, integ 0-2, final 0-25, cycle, flip."""
    rels: list[Relation] = [
        _rel("triple 0", SLIDING, [("aab", 1), ("abb", 1), ("acb", 1)]),
        _rel("integ 0", SLIDING, [("ab", 1), ("ac", 1), ("ba", -1), ("ca", -1)]),
        _rel("integ 1", SLIDING, [("ca", 1), ("cb", 1), ("ac", -1), ("bc", -1)]),
        _rel(
            "integ 2",
            SLIDING,
            [
                ("db", 1), ("dc", -1), ("bd", -1), ("cd", 1),
                ("ec", 1), ("ea", -1), ("ce", -1), ("ae", 1),
                ("fa", 1), ("fb", -1), ("af", -1), ("bf", 1),
                ("cb", 2), ("bc", -2),
            ],
        ),
    ]
    vanishing = [
        "ad", "ed",
        "add", "abd",
        "ace", "ebd", "edd",
        "addd", "abbd", "adbd",
        "cbbd", "ebbd", "ebdd",
        "edbd", "eddd", "fdbd",
    ]
    for i, pattern in enumerate(vanishing):
        rels.append(_rel(f"final {i}", SUFFIX, [(pattern, 1)]))
    rels += [
        _rel("final 16", SUFFIX, [("bf", 1), ("bd", -1)]),
        _rel("final 17", SUFFIX, [("cdd", 1), ("cee", 1)]),
        _rel("final 18", SUFFIX, [("ddbd", 1), ("dbdd", -1)]),
        _rel("final 19", SUFFIX, [("cbdd", 1), ("cdbd", -1)]),
        _rel("final 20", SUFFIX, [("fbd", 1), ("dbd", -1), ("bdd", 1)]),
        _rel(
            "final 21",
            SUFFIX,
            [
                ("bddd", 1), ("faff", 1), ("dbdd", -1),
                ("eaff", -1), ("fbdd", 1), ("aeee", -1),
            ],
        ),
        _rel(
            "final 22",
            SUFFIX,
            [
                ("abdd", 2), ("cddd", -1), ("dcee", -1), ("aeee", 1),
                ("eaff", 1), ("faff", -1), ("ecee", 1),
            ],
            scale=2,
        ),
        _rel(
            "final 23",
            SUFFIX,
            [
                ("cbdd", 2), ("bfff", -1), ("dcee", 1), ("ecee", -1),
                ("cddd", 1), ("dbdd", 1), ("fbdd", -1),
            ],
            scale=2,
        ),
        _rel(
            "final 24",
            SUFFIX,
            [
                ("cdbd", 2), ("bfff", -1), ("dcee", 1), ("ecee", -1),
                ("cddd", 1), ("dbdd", 1), ("fbdd", -1),
            ],
            scale=2,
        ),
        _rel(
            "final 25",
            SUFFIX,
            [
                ("fbbd", 2), ("dbbd", -2), ("bbdd", 2),
                ("faff", -1), ("dbdd", 1), ("fbdd", -1),
                ("eaff", 1), ("aeee", 1), ("bfff", -1),
            ],
            scale=2,
        ),
        Relation("cycle", (), DIHEDRAL),
        Relation("flip", (), DIHEDRAL),
    ]
    assert len(rels) == 32
    return tuple(rels)


def get_relation(name: str) -> Relation:
    for rel in catalog():
        if rel.name == name:
            return rel
    raise KeyError(f"unknown relation {name!r}")


def instantiate(rel: Relation, loop: int, slot: int, context: str) -> RelationInstance:
    """Splice each term pattern into the context at the 1-based slot."""
    if rel.anchor == DIHEDRAL:
        raise ValueError(f"{rel.name} instances are built from a key, not a context")
    if slot not in rel.slots(loop):
        raise ValueError(
            f"slot {slot} out of range {rel.slots(loop)} for {rel.name} at loop {loop}"
        )
    if len(context) != 2 * loop - rel.pattern_len:
        raise ValueError(
            f"context length {len(context)} != {2 * loop - rel.pattern_len}"
        )
    for ch in context:
        if ch not in LETTERS:
            raise ValueError(f"illegal context letter {ch!r}")
    head, tail = context[: slot - 1], context[slot - 1 :]
    members = tuple(
        (head + pattern + tail, weight) for pattern, weight in rel.terms
    )
    return RelationInstance(rel.name, loop, slot, context, members)


def instantiate_dihedral(rel: Relation, loop: int, key: str) -> RelationInstance:
    if rel.name == "cycle":
        image = cycle_key(key)
    elif rel.name == "flip":
        image = flip_key(key)
    else:
        raise ValueError(f"{rel.name} is not a dihedral relation")
    return RelationInstance(
        rel.name, loop, 1, key, ((key, 1), (image, -1))
    )


class InstanceGenerationError(RuntimeError):
    """Nonzero filter unsatisfiable within the retry budget."""


RETRY_BUDGET = 1000


def generate_instances(
    rel: Relation,
    loop: int,
    n: int,
    truth: Symbol,
    rng_seed: int,
) -> list[RelationInstance]:
    """Draw n instances with uniform random contexts and slots.

    Multi-term instances must contain at least one member with nonzero
    truth coefficient; one-term relations are exempt.  Cycle/flip
    instances are drawn from the nonzero support, at most one per
    dihedral orbit.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(rng_seed)
    out: list[RelationInstance] = []
    if rel.anchor == DIHEDRAL:
        support = [k for k, _ in truth.items()]
        if not support:
            raise InstanceGenerationError(f"{rel.name}: empty symbol")
        used_orbits: set[str] = set()
        tries = 0
        while len(out) < n:
            key = support[rng.randrange(len(support))]
            rep = canonical_key(key)
            if rep in used_orbits:
                tries += 1
                if tries > RETRY_BUDGET * n:
                    raise InstanceGenerationError(
                        f"{rel.name}: fewer than {n} distinct orbits available"
                    )
                continue
            used_orbits.add(rep)
            out.append(instantiate_dihedral(rel, loop, key))
        return out

    needs_filter = len(rel.terms) > 1
    slots = rel.slots(loop)
    ctx_len = 2 * loop - rel.pattern_len
    for _ in range(n):
        for _attempt in range(RETRY_BUDGET):
            slot = slots[rng.randrange(len(slots))]
            context = "".join(rng.choice(LETTERS) for _ in range(ctx_len))
            inst = instantiate(rel, loop, slot, context)
            if not needs_filter or any(truth[k] != 0 for k, _ in inst.members):
                out.append(inst)
                break
        else:
            raise InstanceGenerationError(
                f"{rel.name}: no instance with a nonzero member at loop {loop} "
                f"after {RETRY_BUDGET} redraws"
            )
    return out


def enumerate_instances(rel: Relation, loop: int) -> Iterable[RelationInstance]:
    """Exhaustive enumeration over all slots and contexts (small loops)."""
    if rel.anchor == DIHEDRAL:
        for letters in itertools.product(LETTERS, repeat=2 * loop):
            yield instantiate_dihedral(rel, loop, "".join(letters))
        return
    ctx_len = 2 * loop - rel.pattern_len
    if ctx_len < 0:
        return
    for slot in rel.slots(loop):
        for letters in itertools.product(LETTERS, repeat=ctx_len):
            yield instantiate(rel, loop, slot, "".join(letters))


def residual(
    instance: RelationInstance, coeffs: Callable[[str], int] | Symbol
) -> int:
    get = coeffs.__getitem__ if isinstance(coeffs, Symbol) else coeffs
    return sum(weight * get(key) for key, weight in instance.members)


def _sign(value: int) -> int:
    # zero carries the '+' sign by convention
    return -1 if value < 0 else 1


def score_instances(
    instances: Sequence[RelationInstance],
    truth: Callable[[str], int] | Symbol,
    predictions: Callable[[str], int | None] | dict,
) -> tuple[float, float, float, float]:
    """Four per-instance rates over predicted coefficients.

    rate 1: predicted coefficients satisfy the relation (residual 0);
    rate 2: satisfied and every magnitude matches truth;
    rate 3: satisfied and every sign matches truth;
    rate 4: every member coefficient exactly correct.
    A missing prediction counts as 0; an invalid one (None) fails all.
    """
    if not instances:
        raise ValueError("empty instance list")
    t_get = truth.__getitem__ if isinstance(truth, Symbol) else truth
    if isinstance(predictions, dict):
        p_get = lambda k: predictions.get(k, 0)  # noqa: E731
    else:
        p_get = predictions
    counts = [0, 0, 0, 0]
    for inst in instances:
        preds = [p_get(k) for k, _ in inst.members]
        truths = [t_get(k) for k, _ in inst.members]
        if any(p is None for p in preds):
            continue
        satisfied = (
            sum(w * p for (_, w), p in zip(inst.members, preds)) == 0
        )
        mags_ok = all(abs(p) == abs(t) for p, t in zip(preds, truths))
        signs_ok = all(_sign(p) == _sign(t) for p, t in zip(preds, truths))
        exact = preds == truths
        counts[0] += satisfied
        counts[1] += satisfied and mags_ok
        counts[2] += satisfied and signs_ok
        counts[3] += exact
    n = len(instances)
    return tuple(c / n for c in counts)  # type: ignore[return-value]
