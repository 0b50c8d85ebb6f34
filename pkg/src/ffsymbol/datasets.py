"""Dataset emission: tokenization, balanced sets, mixed loops, strikeout.

Coefficients are tokenized in base 1000, big-endian, with an explicit
sign token ('+' or '-', zero is '+'); keys are sequences of letter
tokens; quad-compressed keys are prefix letters plus one Q:xxxx token.
Every generator is deterministic for a given seed and emits examples in
a canonical order so parallel regeneration is bit-reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

from ffsymbol.keys import (
    LETTERS,
    is_trivial_zero,
    pack_key,
    random_key,
    random_valid_key,
)
from ffsymbol.quad import QUAD_TOKENS, QuadSymbol
from ffsymbol.symbol import Symbol

SIGN_FIRST = "first"
SIGN_LAST = "last"

UNIFORM = "uniform"
NONTRIVIAL_BIASED = "nontrivial-biased"

STRIKEOUT_VARIANTS = (
    "plain",
    "shuffled",
    "sorted",
    "sorted-unique",
    "signs-only",
    "magnitudes-only",
    "zero-nonzero",
)


class TokenizationError(ValueError):
    pass


def encode_coefficient(value: int, sign_position: str = SIGN_FIRST) -> list[str]:
    """Base-1000 big-endian chunks with a sign token; zero is ['+','0']."""
    sign = "-" if value < 0 else "+"
    mag = abs(value)
    chunks = []
    while True:
        chunks.append(str(mag % 1000))
        mag //= 1000
        if mag == 0:
            break
    chunks.reverse()
    if sign_position == SIGN_FIRST:
        return [sign] + chunks
    if sign_position == SIGN_LAST:
        return chunks + [sign]
    raise ValueError(f"unknown sign position {sign_position!r}")


def decode_coefficient(tokens: Sequence[str]) -> int:
    if not tokens:
        raise TokenizationError("empty token sequence")
    if tokens[0] in "+-":
        sign, chunks = tokens[0], tokens[1:]
    elif tokens[-1] in "+-":
        sign, chunks = tokens[-1], tokens[:-1]
    else:
        raise TokenizationError("missing sign token")
    if not chunks:
        raise TokenizationError("no magnitude chunks")
    mag = 0
    for i, chunk in enumerate(chunks):
        if not chunk.isdigit():
            raise TokenizationError(f"malformed chunk {chunk!r}")
        n = int(chunk)
        if n >= 1000:
            raise TokenizationError(f"chunk {chunk!r} out of base-1000 range")
        if chunk != str(n):
            # vocabulary holds the tokens "0".."999" without zero padding
            raise TokenizationError(f"chunk {chunk!r} is not a vocabulary token")
        if i == 0 and len(chunks) > 1 and n == 0:
            raise TokenizationError("leading zero chunk")
        mag = mag * 1000 + n
    return -mag if sign == "-" else mag


@dataclass(frozen=True)
class DatasetExample:
    input: tuple[str, ...]
    target: tuple[str, ...]
    meta: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class SplitSpec:
    train_size: int
    test_size: int
    seed: int
    zero_policy: str = UNIFORM
    trivial_fraction: float = 0.05


@dataclass
class Dataset:
    task: str
    loop: int
    seed: int
    variant: str
    train: list[DatasetExample]
    test: list[DatasetExample]

    @property
    def examples(self) -> list[DatasetExample]:
        return self.train + self.test


def key_tokens(key: str) -> tuple[str, ...]:
    return tuple(key)


def quad_tokens(prefix: str, suffix: str) -> tuple[str, ...]:
    return tuple(prefix) + (QUAD_TOKENS[suffix],)


def _split(
    examples: list[DatasetExample], spec: SplitSpec, rng: random.Random
) -> tuple[list[DatasetExample], list[DatasetExample]]:
    if spec.train_size + spec.test_size > len(examples):
        raise ValueError(
            f"split {spec.train_size}+{spec.test_size} exceeds "
            f"{len(examples)} available examples"
        )
    order = list(range(len(examples)))
    rng.shuffle(order)
    picked = order[: spec.train_size + spec.test_size]
    train = [examples[i] for i in picked[: spec.train_size]]
    test = [examples[i] for i in picked[spec.train_size :]]
    return train, test


def sample_zero_keys(
    symbol: Symbol,
    count: int,
    policy: str,
    rng: random.Random,
    trivial_fraction: float = 0.05,
) -> list[str]:
    """Distinct zero-coefficient keys at the symbol's loop order.

    Uniform policy draws from all zeros (so the majority are trivial);
    the biased policy caps trivial zeros at the given fraction and fills
    the rest with nontrivial zeros.
    """
    loop = symbol.loop
    support = symbol.packed()
    chosen: set[str] = set()

    def draw(generator: Callable[[], str], want: int, pred: Callable[[str], bool]):
        budget = 1000 * want + 1000
        while want > 0 and budget > 0:
            budget -= 1
            key = generator()
            if pack_key(key) in support or key in chosen or not pred(key):
                continue
            chosen.add(key)
            want -= 1
        if want > 0:
            raise ValueError("zero pool exhausted for requested sample size")

    if policy == UNIFORM:
        draw(lambda: random_key(loop, rng), count, lambda k: True)
    elif policy == NONTRIVIAL_BIASED:
        n_trivial = int(count * trivial_fraction)
        n_nontrivial = count - n_trivial
        draw(lambda: random_valid_key(loop, rng), n_nontrivial, lambda k: True)
        draw(lambda: random_key(loop, rng), n_trivial, is_trivial_zero)
    else:
        raise ValueError(f"unknown zero policy {policy!r}")
    return sorted(chosen)


def make_zero_nonzero(symbol: Symbol, spec: SplitSpec) -> Dataset:
    """Balanced binary classification set: key -> is the coefficient nonzero."""
    rng = random.Random(spec.seed)
    nonzero = [
        DatasetExample(key_tokens(k), ("+", "1"), (("key", k), ("label", "1")))
        for k, _ in symbol.items()
    ]
    zeros = [
        DatasetExample(key_tokens(k), ("+", "0"), (("key", k), ("label", "0")))
        for k in sample_zero_keys(
            symbol, len(nonzero), spec.zero_policy, rng, spec.trivial_fraction
        )
    ]
    examples = nonzero + zeros
    train, test = _split(examples, spec, rng)
    return Dataset("zero-nonzero", symbol.loop, spec.seed, spec.zero_policy, train, test)


def make_coeff_from_key(
    symbol: Symbol | QuadSymbol,
    spec: SplitSpec,
    representation: str = "full",
    magnitude_only: bool = False,
    sign_position: str = SIGN_FIRST,
) -> Dataset:
    """Nonzero elements: key (or quad key) -> encoded coefficient."""
    rng = random.Random(spec.seed)
    examples = []
    if representation == "full":
        if not isinstance(symbol, Symbol):
            raise TypeError("full representation needs a Symbol")
        for key, coeff in symbol.items():
            value = abs(coeff) if magnitude_only else coeff
            examples.append(
                DatasetExample(
                    key_tokens(key),
                    tuple(encode_coefficient(value, sign_position)),
                    (("key", key),),
                )
            )
    elif representation == "quad":
        if not isinstance(symbol, QuadSymbol):
            raise TypeError("quad representation needs a QuadSymbol")
        for prefix, suffix, coeff in symbol.items():
            value = abs(coeff) if magnitude_only else coeff
            examples.append(
                DatasetExample(
                    quad_tokens(prefix, suffix),
                    tuple(encode_coefficient(value, sign_position)),
                    (("key", prefix + suffix),),
                )
            )
    else:
        raise ValueError(f"unknown representation {representation!r}")
    train, test = _split(examples, spec, rng)
    variant = "magnitude-only" if magnitude_only else representation
    return Dataset("coeff", symbol.loop, spec.seed, variant, train, test)


def make_mixed_loop(
    symbol_l5: Symbol, symbol_l6: Symbol, spec: SplitSpec
) -> dict[str, Dataset]:
    """Even-proportion two-loop training sets plus a size-matched control.

    The lower loop contributes its full nonzero set; an equal number of
    nonzero elements is drawn from the higher loop; each side is
    balanced with uniformly sampled zeros and split per-loop before
    merging.
    """
    rng = random.Random(spec.seed)
    n = len(symbol_l5)
    if len(symbol_l6) < 2 * n:
        raise ValueError("higher-loop symbol too small for mixed-loop draw")

    def balanced(symbol: Symbol, nonzero_keys: list[str]) -> list[DatasetExample]:
        examples = [
            DatasetExample(
                key_tokens(k),
                tuple(encode_coefficient(symbol[k])),
                (("key", k), ("loop", str(symbol.loop))),
            )
            for k in nonzero_keys
        ]
        examples += [
            DatasetExample(
                key_tokens(k),
                tuple(encode_coefficient(0)),
                (("key", k), ("loop", str(symbol.loop))),
            )
            for k in sample_zero_keys(symbol, len(nonzero_keys), UNIFORM, rng)
        ]
        return examples

    l5_examples = balanced(symbol_l5, [k for k, _ in symbol_l5.items()])
    l6_keys = [k for k, _ in symbol_l6.items()]
    l6_subset = sorted(rng.sample(l6_keys, n))
    l6_examples = balanced(symbol_l6, l6_subset)

    train5, test5 = _split(l5_examples, spec, rng)
    train6, test6 = _split(l6_examples, spec, rng)

    mixed = Dataset("mixed", 0, spec.seed, "mixed", train5 + train6, test5 + test6)
    d5 = Dataset("mixed", symbol_l5.loop, spec.seed, "per-loop", train5, test5)
    d6 = Dataset("mixed", symbol_l6.loop, spec.seed, "per-loop", train6, test6)

    # size-matched pure higher-loop control
    control_n = 2 * n
    control_keys = sorted(rng.sample(l6_keys, min(control_n, len(l6_keys))))
    control_examples = balanced(symbol_l6, control_keys)
    ctl_spec = SplitSpec(2 * spec.train_size, spec.test_size, spec.seed)
    ctrain, ctest = _split(control_examples, ctl_spec, rng)
    control = Dataset("mixed", symbol_l6.loop, spec.seed, "control", ctrain, ctest)

    return {"mixed": mixed, "l5": d5, "l6": d6, "control": control}


def strike_parents(key: str, k: int | str = "full") -> list[str]:
    """Ordered parents obtained by deleting letter pairs (i, j), i < j.

    Pairs are ordered lexicographically by position; distance-k keeps
    pairs with j - i <= k.
    """
    n = len(key)
    if n < 4:
        raise ValueError("strikeout needs key length >= 4")
    if k == "full":
        kmax = n - 1
    else:
        if not 1 <= int(k) <= n - 1:
            raise ValueError(f"strike distance {k} out of range 1..{n - 1}")
        kmax = int(k)
    parents = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            if j - i <= kmax:
                parents.append(key[:i] + key[i + 1 : j] + key[j + 1 :])
    return parents


def parent_count(loop: int, k: int | str = "full") -> int:
    if k == "full":
        return loop * (2 * loop - 1)
    k = int(k)
    return 2 * k * loop - k * (k + 1) // 2


def _transform_parents(
    coeffs: list[int], variant: str, rng: random.Random
) -> list[int]:
    if variant == "plain":
        return coeffs
    if variant == "shuffled":
        out = list(coeffs)
        rng.shuffle(out)
        return out
    if variant == "sorted":
        return sorted(coeffs)
    if variant == "sorted-unique":
        return sorted(set(coeffs))
    if variant == "signs-only":
        return [(c > 0) - (c < 0) for c in coeffs]
    if variant == "magnitudes-only":
        return [abs(c) for c in coeffs]
    if variant == "zero-nonzero":
        return [int(c != 0) for c in coeffs]
    raise ValueError(f"unknown variant {variant!r}")


def make_strikeout(
    symbol_l: Symbol,
    symbol_lm1: Symbol,
    k: int | str,
    variant: str,
    spec: SplitSpec,
) -> Dataset:
    """Parent-coefficient lists at loop L-1 -> child coefficient at loop L.

    Children are the nonzero elements of the higher-loop symbol.
    Duplicates are removed after the variant transform, except for the
    shuffled variant which keeps them.
    """
    if variant not in STRIKEOUT_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if symbol_lm1.loop != symbol_l.loop - 1:
        raise ValueError("parent symbol must be one loop below the child symbol")
    rng = random.Random(spec.seed)
    examples = []
    seen: set[tuple[tuple[str, ...], tuple[str, ...]]] = set()
    for key, coeff in symbol_l.items():
        coeffs = [symbol_lm1[p] for p in strike_parents(key, k)]
        coeffs = _transform_parents(coeffs, variant, rng)
        tokens = tuple(t for c in coeffs for t in encode_coefficient(c))
        target = tuple(encode_coefficient(coeff))
        if variant != "shuffled":
            ident = (tokens, target)
            if ident in seen:
                continue
            seen.add(ident)
        examples.append(DatasetExample(tokens, target, (("key", key),)))
    train, test = _split(examples, spec, rng)
    return Dataset("strikeout", symbol_l.loop, spec.seed, variant, train, test)


def dataset_header(ds: Dataset) -> str:
    return f"#task={ds.task} loop={ds.loop} seed={ds.seed} variant={ds.variant}"
