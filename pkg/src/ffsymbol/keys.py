"""Keys: letter words, packing, the dihedral action, and exact counting.

A key is a word of even length 2L (1 <= L <= 8) over the six-letter
alphabet ``a..f`` with the total ordering a < b < c < d < e < f.  Keys are
handled as plain lowercase strings at the API surface and packed 3 bits
per letter into a single integer wherever they are stored or sorted, so
that packed order equals lexicographic order at fixed length.
"""

from __future__ import annotations

import functools
import random
from typing import Iterable, Iterator

LETTERS = "abcdef"
MAX_LOOP = 8
MAX_KEY_LEN = 2 * MAX_LOOP

_CODE = {ch: i for i, ch in enumerate(LETTERS)}

# Generators of the order-6 dihedral group acting letterwise.
_CYCLE = str.maketrans("abcdef", "bcaefd")
_FLIP = str.maketrans("abcdef", "bacedf")


class KeyError_(ValueError):
    """Rejection of a malformed key string."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


def parse_key(text: str) -> str:
    """Validate a key string, reporting the first offending character."""
    if not text:
        raise KeyError_("empty key")
    for pos, ch in enumerate(text):
        if ch not in _CODE:
            raise KeyError_(f"illegal character {ch!r} at position {pos}", pos)
    if len(text) % 2 != 0:
        raise KeyError_(f"odd key length {len(text)}", len(text) - 1)
    if len(text) > MAX_KEY_LEN:
        raise KeyError_(f"key length {len(text)} exceeds {MAX_KEY_LEN}", MAX_KEY_LEN)
    return text


def format_key(key: str) -> str:
    return key


def pack_key(key: str) -> int:
    """Pack big-endian, 3 bits per letter; packed order = lex order."""
    code = 0
    for ch in key:
        code = (code << 3) | _CODE[ch]
    return code


def unpack_key(code: int, length: int) -> str:
    out = []
    for shift in range(3 * (length - 1), -1, -3):
        out.append(LETTERS[(code >> shift) & 0b111])
    return "".join(out)


def cycle_key(key: str) -> str:
    return key.translate(_CYCLE)


def flip_key(key: str) -> str:
    return key.translate(_FLIP)


def dihedral_images(key: str) -> list[str]:
    """The six images of a key under the dihedral group, duplicates kept.

    Order: e, c, c^2, f, cf, c^2f applied letterwise.
    """
    c1 = cycle_key(key)
    c2 = cycle_key(c1)
    f0 = flip_key(key)
    f1 = cycle_key(f0)
    f2 = cycle_key(f1)
    return [key, c1, c2, f0, f1, f2]


def dihedral_orbit(key: str) -> frozenset[str]:
    return frozenset(dihedral_images(key))


def canonical_key(key: str) -> str:
    """Lexicographically smallest member of the dihedral orbit."""
    return min(dihedral_images(key))


@functools.cache
def forbidden_pairs() -> frozenset[str]:
    """Dihedral closure of the adjacency-rule seeds {ad, da, de}."""
    seeds = ("ad", "da", "de")
    closed: set[str] = set()
    for seed in seeds:
        closed.update(dihedral_images(seed))
    return frozenset(closed)


def is_trivial_zero(key: str) -> bool:
    """Prefix/suffix rule plus adjacency rule."""
    if key[0] not in "abc" or key[-1] not in "def":
        return True
    pairs = forbidden_pairs()
    for i in range(len(key) - 1):
        if key[i : i + 2] in pairs:
            return True
    return False


def _check_loop(loop: int) -> None:
    if not 1 <= loop <= MAX_LOOP:
        raise ValueError(f"loop order {loop} out of range 1..{MAX_LOOP}")


@functools.cache
def _transition_matrix() -> tuple[tuple[int, ...], ...]:
    pairs = forbidden_pairs()
    return tuple(
        tuple(0 if x + y in pairs else 1 for y in LETTERS) for x in LETTERS
    )


def count_valid_keys(loop: int) -> int:
    """Exact count of length-2L keys that are not trivial zeros.

    Transfer-matrix path counting: start states {a,b,c}, end states
    {d,e,f}, 2L-1 allowed transitions, exact integers throughout.
    """
    _check_loop(loop)
    mat = _transition_matrix()
    # vec[j] = number of admissible prefixes ending in letter j
    vec = [1, 1, 1, 0, 0, 0]
    for _ in range(2 * loop - 1):
        vec = [sum(vec[i] * mat[i][j] for i in range(6)) for j in range(6)]
    return vec[3] + vec[4] + vec[5]


@functools.cache
def _suffix_counts(length: int) -> tuple[tuple[int, ...], ...]:
    """counts[r][i]: admissible completions of length r after letter i.

    A completion is admissible when every transition is allowed and the
    final letter is in {d,e,f}; r = 0 requires the current letter to
    already be a valid final letter.
    """
    mat = _transition_matrix()
    counts = [[1 if i >= 3 else 0 for i in range(6)]]
    for _ in range(length):
        prev = counts[-1]
        counts.append(
            [sum(mat[i][j] * prev[j] for j in range(6)) for i in range(6)]
        )
    return tuple(tuple(row) for row in counts)


def iter_valid_keys(loop: int) -> Iterator[str]:
    """All non-trivially-zero keys of length 2L in lexicographic order."""
    _check_loop(loop)
    n = 2 * loop
    counts = _suffix_counts(n)
    mat = _transition_matrix()

    def rec(prefix: list[str], last: int, remaining: int) -> Iterator[str]:
        if remaining == 0:
            yield "".join(prefix)
            return
        for j in range(6):
            if mat[last][j] and counts[remaining - 1][j]:
                prefix.append(LETTERS[j])
                yield from rec(prefix, j, remaining - 1)
                prefix.pop()

    for i in range(3):
        if counts[n - 1][i]:
            yield from rec([LETTERS[i]], i, n - 1)


def random_key(loop: int, rng: random.Random) -> str:
    """Uniform over all 6^(2L) keys."""
    _check_loop(loop)
    return "".join(rng.choice(LETTERS) for _ in range(2 * loop))


def random_valid_key(loop: int, rng: random.Random) -> str:
    """Uniform over the non-trivially-zero keys, by completion counting."""
    _check_loop(loop)
    n = 2 * loop
    counts = _suffix_counts(n)
    mat = _transition_matrix()
    total = sum(counts[n - 1][i] for i in range(3))
    pick = rng.randrange(total)
    out = []
    last = -1
    for pos in range(n):
        remaining = n - pos - 1
        for j in range(6):
            if pos == 0:
                if j >= 3:
                    continue
                weight = counts[remaining][j]
            else:
                weight = mat[last][j] * counts[remaining][j]
            if pick < weight:
                out.append(LETTERS[j])
                last = j
                break
            pick -= weight
        else:  # pragma: no cover - counting is exact
            raise AssertionError("weighted draw fell through")
    return "".join(out)
