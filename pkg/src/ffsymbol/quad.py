"""Quad-compressed symbols: first 2L-4 letters plus one of 8 suffix tokens.

Every nonzero key can be related, via dihedral symmetry and the
final-entry relations, to keys ending in one of eight four-letter
suffixes.  The compressed store keeps one quad-suffixed representative
per dihedral orbit; coefficients of other keys are reconstructed by
running the final-entry relations as directed rewrite rules.  Keys whose
reconstruction is not reachable within the rewrite bound are reported as
undetermined, never guessed.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from ffsymbol.keys import dihedral_images, is_trivial_zero
from ffsymbol.relations import SUFFIX, catalog
from ffsymbol.symbol import Symbol

QUAD_SUFFIXES = ("dddd", "bbbd", "bdbd", "bbdd", "dbdd", "fbdd", "dbbd", "cddd")
QUAD_TOKENS = {s: f"Q:{s}" for s in QUAD_SUFFIXES}

REWRITE_DEPTH_BOUND = 64

DETERMINED = "determined"
UNDETERMINED = "undetermined"


class QuadError(ValueError):
    pass


class QuadReductionError(QuadError):
    """Rewrite bound exceeded; carries the irreducible suffix classes."""

    def __init__(self, suffixes: set[str]):
        super().__init__(f"irreducible suffix classes: {sorted(suffixes)}")
        self.suffixes = suffixes


@dataclass(frozen=True)
class ExpandResult:
    key: str
    status: str
    value: int | None


class QuadSymbol:
    """Association (prefix, quad suffix) -> nonzero coefficient."""

    __slots__ = ("loop", "_elems")

    def __init__(self, loop: int, elements: Iterable[tuple[str, str, int]]):
        if loop < 3:
            raise QuadError(f"quad representation needs loop >= 3, got {loop}")
        self.loop = loop
        elems: dict[tuple[str, str], int] = {}
        for prefix, suffix, coeff in elements:
            if suffix not in QUAD_TOKENS:
                raise QuadError(f"not a quad suffix: {suffix!r}")
            if len(prefix) != 2 * loop - 4:
                raise QuadError(f"prefix {prefix!r} has wrong length")
            if prefix and prefix[0] not in "abc":
                raise QuadError(f"prefix {prefix!r} is trivially zero")
            if coeff != 0:
                elems[(prefix, suffix)] = coeff
        self._elems = elems

    def __len__(self) -> int:
        return len(self._elems)

    def get(self, prefix: str, suffix: str) -> int:
        return self._elems.get((prefix, suffix), 0)

    def get_key(self, key: str) -> int:
        return self._elems.get((key[:-4], key[-4:]), 0)

    def items(self) -> Iterator[tuple[str, str, int]]:
        for (prefix, suffix) in sorted(self._elems):
            yield prefix, suffix, self._elems[(prefix, suffix)]

    def __repr__(self) -> str:
        return f"QuadSymbol(loop={self.loop}, entries={len(self)})"


def _quad_member(key: str) -> str | None:
    """Lexicographically smallest quad-suffixed member of the orbit."""
    candidates = [m for m in dihedral_images(key) if m[-4:] in QUAD_TOKENS]
    return min(candidates) if candidates else None


def _suffix_relations():
    # the multi-term suffix relations are exactly final 16..25
    return [
        rel for rel in catalog() if rel.anchor == SUFFIX and len(rel.terms) > 1
    ]


@functools.cache
def _vanishing_suffixes() -> tuple[str, ...]:
    # one-term final-entry relations (final 0..15) kill whole suffix classes
    return tuple(
        rel.terms[0][0]
        for rel in catalog()
        if rel.anchor == SUFFIX and len(rel.terms) == 1
    )


# successful resolutions are stack-independent and safe to reuse
_resolve_cache: dict[str, dict[str, Fraction]] = {}


def _resolve(key: str, depth: int, stack: frozenset[str]) -> dict[str, Fraction] | None:
    """Express C(key) as a rational combination over quad-canonical keys.

    Returns None when no bounded rewrite path exists.  Trivial zeros
    resolve to the empty combination.
    """
    if is_trivial_zero(key):
        return {}
    for m in dihedral_images(key):
        if m.endswith(_vanishing_suffixes()):
            return {}
    member = _quad_member(key)
    if member is not None:
        return {member: Fraction(1)}
    cached = _resolve_cache.get(key)
    if cached is not None:
        return cached
    if depth <= 0 or key in stack:
        return None
    stack = stack | {key}
    # try every orbit member so a rewrite can fire on any suffix image
    for m in sorted(dihedral_images(key)):
        for rel in _suffix_relations():
            plen = rel.pattern_len
            if plen > len(m):
                continue
            prefix, suffix = m[:-plen], m[-plen:]
            for i, (pattern, weight) in enumerate(rel.terms):
                if pattern != suffix:
                    continue
                combo: dict[str, Fraction] = {}
                ok = True
                for j, (other, w) in enumerate(rel.terms):
                    if j == i:
                        continue
                    sub = _resolve(prefix + other, depth - 1, stack)
                    if sub is None:
                        ok = False
                        break
                    factor = Fraction(-w, weight)
                    for qk, qw in sub.items():
                        combo[qk] = combo.get(qk, Fraction(0)) + factor * qw
                if ok:
                    result = {qk: qw for qk, qw in combo.items() if qw != 0}
                    _resolve_cache[key] = result
                    return result
    return None


def resolve_key(key: str) -> dict[str, Fraction] | None:
    """Public wrapper: combination over quad-suffixed canonical keys."""
    return _resolve(key, REWRITE_DEPTH_BOUND, frozenset())


def to_quad(symbol: Symbol) -> QuadSymbol:
    """Compress a full symbol to quad form.

    Keeps the lexicographically smallest quad-suffixed member per
    dihedral orbit; orbits with no quad-suffixed member must be
    reducible via the final-entry rewrites (their coefficient is then
    carried by other orbits), otherwise the irreducible suffix classes
    are reported.
    """
    if symbol.loop < 3:
        raise QuadError(f"quad representation needs loop >= 3, got {symbol.loop}")
    entries: list[tuple[str, str, int]] = []
    seen_orbits: set[str] = set()
    irreducible: set[str] = set()
    for key, coeff in symbol.items():
        rep = min(dihedral_images(key))
        if rep in seen_orbits:
            continue
        seen_orbits.add(rep)
        member = _quad_member(key)
        if member is not None:
            entries.append((member[:-4], member[-4:], coeff))
        elif resolve_key(key) is None:
            irreducible.add(key[-4:])
    if irreducible:
        raise QuadReductionError(irreducible)
    return QuadSymbol(symbol.loop, entries)


def expand_quad(qsym: QuadSymbol, keys: Iterable[str]) -> list[ExpandResult]:
    """Reconstruct coefficients of target keys from the quad store."""
    out = []
    for key in keys:
        if len(key) != 2 * qsym.loop:
            raise QuadError(f"key {key!r} has wrong length for loop {qsym.loop}")
        combo = resolve_key(key)
        if combo is None:
            out.append(ExpandResult(key, UNDETERMINED, None))
            continue
        total = sum(
            (w * qsym.get_key(qk) for qk, w in combo.items()), Fraction(0)
        )
        if total.denominator != 1:
            # stored data inconsistent with the relation set
            out.append(ExpandResult(key, UNDETERMINED, None))
            continue
        out.append(ExpandResult(key, DETERMINED, int(total)))
    return out


def quad_stats(qsym: QuadSymbol) -> dict[str, int]:
    """Nonzero entry counts per quad suffix."""
    counts = {s: 0 for s in QUAD_SUFFIXES}
    for _, suffix, _ in qsym.items():
        counts[suffix] += 1
    return counts
