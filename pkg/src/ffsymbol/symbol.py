"""Sparse symbols: immutable Key -> Coefficient maps at fixed loop order.

Coefficients are plain Python integers (exact, unbounded); only nonzero
entries are stored and lookup of an absent key yields 0.  The store is
keyed by the packed key so iteration order is lexicographic.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from ffsymbol.keys import pack_key, parse_key, unpack_key


class LoopMismatchError(ValueError):
    """Key length does not match 2 * loop order of the symbol."""


class Symbol:
    __slots__ = ("loop", "_elems")

    def __init__(self, loop: int, elements: Iterable[tuple[str, int]]):
        self.loop = loop
        elems: dict[int, int] = {}
        n = 2 * loop
        for key, coeff in elements:
            parse_key(key)
            if len(key) != n:
                raise LoopMismatchError(
                    f"key {key!r} has length {len(key)}, expected {n}"
                )
            if coeff == 0:
                continue
            elems[pack_key(key)] = coeff
        self._elems = elems

    def __len__(self) -> int:
        return len(self._elems)

    def __contains__(self, key: str) -> bool:
        return self[key] != 0

    def __getitem__(self, key: str) -> int:
        if len(key) != 2 * self.loop:
            raise LoopMismatchError(
                f"key {key!r} has length {len(key)}, expected {2 * self.loop}"
            )
        return self._elems.get(pack_key(key), 0)

    def packed(self) -> dict[int, int]:
        """The underlying packed-key store (do not mutate)."""
        return self._elems

    def items(self) -> Iterator[tuple[str, int]]:
        """Nonzero elements in lexicographic key order."""
        n = 2 * self.loop
        for code in sorted(self._elems):
            yield unpack_key(code, n), self._elems[code]

    def keys(self) -> Iterator[str]:
        for key, _ in self.items():
            yield key

    def __iter__(self) -> Iterator[str]:
        return self.keys()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Symbol):
            return NotImplemented
        return self.loop == other.loop and self._elems == other._elems

    def __repr__(self) -> str:
        return f"Symbol(loop={self.loop}, nonzero={len(self)})"


def lookup(symbol: Symbol, key: str) -> int:
    return symbol[key]


# One- and two-loop ground truth.  At one loop every nonzero coefficient
# is -2; at two loops the suffix-repeated orbit carries +8 and the
# prefix-repeated orbit +16.
_L1_KEYS = ("bd", "ce", "af", "bf", "cd", "ae")
_L2_SUFFIX = ("bddd", "ceee", "afff", "bfff", "cddd", "aeee")
_L2_PREFIX = ("bbbd", "ccce", "aaaf", "bbbf", "cccd", "aaae")


def builtin_symbol(loop: int) -> Symbol:
    if loop == 1:
        return Symbol(1, [(k, -2) for k in _L1_KEYS])
    if loop == 2:
        elems = [(k, 8) for k in _L2_SUFFIX] + [(k, 16) for k in _L2_PREFIX]
        return Symbol(2, elems)
    raise ValueError(f"no built-in symbol at loop {loop}; only 1 and 2")
