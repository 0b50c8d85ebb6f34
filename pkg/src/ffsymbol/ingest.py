"""File formats and archive ingestion.

Canonical on-disk formats are plain UTF-8 text and bit-exact: symbol
files are `<key>\\t<coefficient>` lines sorted by packed key, quad files
are `<prefix>\\t<Q:suffix>\\t<coefficient>` lines, instance files are
`<relation>\\t<slot>\\t<key,...>` lines, and dataset files carry a
`#task=...` header followed by `<input>\\t<target>` token lines.
Published archives are described by a manifest and are checksum-verified
before a single byte is parsed.
"""

from __future__ import annotations

import hashlib
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ffsymbol.datasets import (
    Dataset,
    DatasetExample,
    TokenizationError,
    dataset_header,
    decode_coefficient,
)
from ffsymbol.keys import pack_key, parse_key
from ffsymbol.quad import QUAD_TOKENS, QuadSymbol
from ffsymbol.relations import (
    RelationInstance,
    get_relation,
    instantiate,
    instantiate_dihedral,
)
from ffsymbol.symbol import Symbol

log = logging.getLogger(__name__)

DATA_DIR_ENV = "FFSYMBOL_DATA_DIR"

# sentinel for an unparsable predicted sequence; kept, never dropped,
# and counted as wrong by every metric
INVALID = "invalid"


def data_dir() -> Path:
    """Directory holding ingested archives, from the environment."""
    return Path(os.environ.get(DATA_DIR_ENV, "data"))


class IngestError(ValueError):
    pass


class MalformedLineError(IngestError):
    def __init__(self, path, lineno: int, reason: str):
        super().__init__(f"{path}:{lineno}: {reason}")
        self.lineno = lineno


class DuplicateKeyError(IngestError):
    pass


class ChecksumError(IngestError):
    pass


def _parse_coefficient(text: str) -> int:
    if not text or text.lstrip("-") == "" or not text.lstrip("-").isdigit():
        raise ValueError(f"not an integer coefficient: {text!r}")
    digits = text[1:] if text[0] == "-" else text
    if len(digits) > 1 and digits[0] == "0":
        raise ValueError(f"leading zeros in coefficient: {text!r}")
    return int(text)


def read_symbol(path, format: str = "canonical-text", loop: int | None = None) -> Symbol:
    """Parse a symbol file into a normalized Symbol.

    Canonical mode enforces the bit-exact format (tab separator, packed
    sort order, no zeros, no duplicates).  Permissive mode accepts any
    whitespace or comma delimiter and unsorted lines, drops zeros with a
    logged count, and tolerates duplicates only when they agree.
    """
    if format not in ("canonical-text", "permissive"):
        raise ValueError(f"unknown format {format!r}")
    strict = format == "canonical-text"
    elems: dict[str, int] = {}
    zeros_dropped = 0
    last_packed = -1
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if strict:
                if not line.endswith("\n"):
                    raise MalformedLineError(path, lineno, "missing newline")
                parts = line[:-1].split("\t")
                if len(parts) != 2:
                    raise MalformedLineError(path, lineno, "expected <key>\\t<coeff>")
            else:
                parts = line.replace(",", " ").split()
                if not parts:
                    continue
                if parts[0].startswith("#"):
                    continue
                if len(parts) != 2:
                    raise MalformedLineError(path, lineno, "expected key and coefficient")
            key, coeff_text = parts
            try:
                parse_key(key)
                coeff = _parse_coefficient(coeff_text)
            except ValueError as exc:
                raise MalformedLineError(path, lineno, str(exc)) from exc
            if loop is None:
                loop = len(key) // 2
            if len(key) != 2 * loop:
                raise MalformedLineError(
                    path, lineno, f"key length {len(key)} inconsistent with loop {loop}"
                )
            if strict:
                packed = pack_key(key)
                if packed <= last_packed:
                    raise MalformedLineError(path, lineno, "lines not sorted by packed key")
                last_packed = packed
                if coeff == 0:
                    raise MalformedLineError(path, lineno, "explicit zero coefficient")
            if coeff == 0:
                zeros_dropped += 1
                continue
            if key in elems:
                if elems[key] != coeff:
                    raise DuplicateKeyError(
                        f"{path}:{lineno}: key {key} has conflicting values "
                        f"{elems[key]} and {coeff}"
                    )
                continue
            elems[key] = coeff
    if loop is None:
        raise IngestError(f"{path}: empty symbol file and no loop given")
    if zeros_dropped:
        log.warning("%s: dropped %d explicit zero elements", path, zeros_dropped)
    return Symbol(loop, elems.items())


def write_symbol(symbol: Symbol, path) -> None:
    """Emit the canonical text form: packed-sorted, zeros omitted."""
    with open(path, "w", encoding="utf-8") as fh:
        for key, coeff in symbol.items():
            fh.write(f"{key}\t{coeff}\n")


@dataclass(frozen=True)
class ManifestEntry:
    relpath: str
    sha256: str
    loop: int
    count: int | None


def read_manifest(path) -> list[ManifestEntry]:
    """Parse `<relpath>\\t<sha256>\\t<loop>\\t<count|?>` lines."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise MalformedLineError(path, lineno, "expected 4 tab-separated fields")
            relpath, sha, loop_text, count_text = parts
            if len(sha) != 64 or any(c not in "0123456789abcdef" for c in sha.lower()):
                raise MalformedLineError(path, lineno, f"bad sha256 {sha!r}")
            if not loop_text.isdigit():
                raise MalformedLineError(path, lineno, f"bad loop {loop_text!r}")
            count = None if count_text == "?" else int(count_text)
            entries.append(ManifestEntry(relpath, sha.lower(), int(loop_text), count))
    return entries


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def fetch_archive(
    entries: Sequence[ManifestEntry],
    dest: Path,
    base_url: str | None = None,
    attempts: int = 4,
) -> list[Path]:
    """Ensure every manifest file is present and checksum-verified.

    Verified files are never re-downloaded.  A checksum mismatch moves
    the offending file aside (never parsed) and raises.  Downloads retry
    with exponential backoff up to the attempt bound.
    """
    dest = Path(dest)
    paths = []
    for entry in entries:
        local = dest / entry.relpath
        if local.exists():
            digest = sha256_file(local)
            if digest == entry.sha256:
                paths.append(local)
                continue
            quarantined = local.with_suffix(local.suffix + ".quarantine")
            local.rename(quarantined)
            raise ChecksumError(
                f"{local}: sha256 {digest} != expected {entry.sha256}; "
                f"moved to {quarantined}"
            )
        if base_url is None:
            raise IngestError(f"{local} missing and no source URL configured")
        _download(f"{base_url.rstrip('/')}/{entry.relpath}", local, attempts)
        digest = sha256_file(local)
        if digest != entry.sha256:
            quarantined = local.with_suffix(local.suffix + ".quarantine")
            local.rename(quarantined)
            raise ChecksumError(
                f"{local}: downloaded sha256 {digest} != expected {entry.sha256}; "
                f"moved to {quarantined}"
            )
        paths.append(local)
    return paths


def _download(url: str, local: Path, attempts: int) -> None:
    import requests

    local.parent.mkdir(parents=True, exist_ok=True)
    delay = 1.0
    for attempt in range(attempts):
        try:
            resp = requests.get(url, stream=True, timeout=60)
            resp.raise_for_status()
            tmp = local.with_suffix(local.suffix + ".part")
            with open(tmp, "wb") as fh:
                for chunk in resp.iter_content(1 << 20):
                    fh.write(chunk)
            tmp.rename(local)
            return
        except requests.RequestException as exc:
            log.warning("download %s failed (attempt %d/%d): %s", url, attempt + 1, attempts, exc)
            if attempt + 1 == attempts:
                raise IngestError(f"download failed after {attempts} attempts: {url}") from exc
            time.sleep(delay)
            delay *= 2


def ingest_archive(
    manifest_path, dest: Path | None = None, base_url: str | None = None
) -> dict[int, Symbol]:
    """Fetch, verify, parse, and count-check every manifest file."""
    entries = read_manifest(manifest_path)
    dest = data_dir() if dest is None else Path(dest)
    paths = fetch_archive(entries, dest, base_url)
    symbols: dict[int, Symbol] = {}
    for entry, path in zip(entries, paths):
        sym = read_symbol(path, "permissive", loop=entry.loop)
        if entry.count is not None and len(sym) != entry.count:
            raise IngestError(
                f"{path}: {len(sym)} nonzero elements, manifest expects {entry.count}"
            )
        if entry.loop in symbols:
            raise IngestError(f"duplicate loop {entry.loop} in manifest")
        symbols[entry.loop] = sym
    return symbols


def write_quad(qsym: QuadSymbol, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for prefix, suffix, coeff in qsym.items():
            fh.write(f"{prefix}\t{QUAD_TOKENS[suffix]}\t{coeff}\n")


def read_quad(path, loop: int | None = None) -> QuadSymbol:
    token_to_suffix = {v: k for k, v in QUAD_TOKENS.items()}
    elems = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise MalformedLineError(path, lineno, "expected prefix, quad token, coefficient")
            prefix, token, coeff_text = parts
            if token not in token_to_suffix:
                raise MalformedLineError(path, lineno, f"unknown quad token {token!r}")
            try:
                coeff = _parse_coefficient(coeff_text)
            except ValueError as exc:
                raise MalformedLineError(path, lineno, str(exc)) from exc
            if loop is None:
                loop = (len(prefix) + 4) // 2
            elems.append((prefix, token_to_suffix[token], coeff))
    if loop is None:
        raise IngestError(f"{path}: empty quad file and no loop given")
    return QuadSymbol(loop, elems)


def write_instances(instances: Iterable[RelationInstance], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            keys = ",".join(k for k, _ in inst.members)
            fh.write(f"{inst.relation}\t{inst.slot}\t{keys}\n")


def read_instances(path) -> list[RelationInstance]:
    instances = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise MalformedLineError(path, lineno, "expected relation, slot, keys")
            name, slot_text, keys_text = parts
            if not slot_text.isdigit():
                raise MalformedLineError(path, lineno, f"bad slot {slot_text!r}")
            keys = keys_text.split(",")
            try:
                rel = get_relation(name)
                inst = _reconstruct_instance(rel, int(slot_text), keys)
            except ValueError as exc:
                raise MalformedLineError(path, lineno, str(exc)) from exc
            instances.append(inst)
    return instances


def _reconstruct_instance(rel, slot: int, keys: list[str]) -> RelationInstance:
    if rel.anchor == "dihedral":
        if len(keys) != 2:
            raise ValueError(f"{rel.name} instance needs 2 keys, got {len(keys)}")
        loop = len(keys[0]) // 2
        inst = instantiate_dihedral(rel, loop, keys[0])
        if [k for k, _ in inst.members] != keys:
            raise ValueError(f"keys {keys} are not a {rel.name} pair")
        return inst
    loop = len(keys[0]) // 2
    plen = rel.pattern_len
    head = keys[0][: slot - 1]
    tail = keys[0][slot - 1 + plen :]
    inst = instantiate(rel, loop, slot, head + tail)
    if [k for k, _ in inst.members] != keys:
        raise ValueError(f"keys do not match {rel.name} at slot {slot}")
    return inst


def write_dataset(dataset: Dataset, path, split: str = "train") -> None:
    """Emit one split as header plus `<input>\\t<target>` token lines."""
    examples = getattr(dataset, split)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dataset_header(dataset) + "\n")
        for ex in examples:
            fh.write(f"{' '.join(ex.input)}\t{' '.join(ex.target)}\n")


def read_dataset(path) -> tuple[dict[str, str], list[DatasetExample]]:
    """Parse a dataset file; returns (header fields, examples)."""
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline().rstrip("\n")
        if not header_line.startswith("#"):
            raise MalformedLineError(path, 1, "missing #task=... header")
        header = {}
        for field in header_line[1:].split():
            name, _, value = field.partition("=")
            if not value:
                raise MalformedLineError(path, 1, f"bad header field {field!r}")
            header[name] = value
        examples = []
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise MalformedLineError(path, lineno, "expected <input>\\t<target>")
            examples.append(
                DatasetExample(tuple(parts[0].split()), tuple(parts[1].split()), ())
            )
    return header, examples


def write_predictions(predictions: dict[str, object], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for example_id in sorted(predictions):
            value = predictions[example_id]
            text = "+++" if value is INVALID else str(value)
            fh.write(f"{example_id}\t{text}\n")


def read_predictions(path) -> dict[str, object]:
    """Map example id to an integer, or to INVALID for nonsense output.

    Accepts either a plain decimal or a base-1000 token sequence after
    the id.  Unparsable sequences are kept as INVALID so the scorer can
    count them wrong instead of silently shrinking the test set.
    """
    predictions: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            example_id, sep, rest = line.partition("\t")
            if not sep:
                raise MalformedLineError(path, lineno, "expected <id>\\t<prediction>")
            if example_id in predictions:
                raise DuplicateKeyError(f"{path}:{lineno}: duplicate id {example_id!r}")
            tokens = rest.replace(",", " ").split()
            value: object
            if len(tokens) == 1 and tokens[0].lstrip("-").isdigit():
                try:
                    value = _parse_coefficient(tokens[0])
                except ValueError:
                    value = INVALID
            else:
                try:
                    value = decode_coefficient(tokens)
                except TokenizationError:
                    value = INVALID
            predictions[example_id] = value
    return predictions


def read_ids(path) -> list[str]:
    """One example id per line; order preserved."""
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh if line.strip()]


def read_embeddings(path) -> dict[str, list[float]]:
    """Six labeled rows `<letter> <v1> <v2> ...`, one per alphabet letter."""
    rows: dict[str, list[float]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            label, *values = parts
            if label not in "abcdef" or len(label) != 1:
                raise MalformedLineError(path, lineno, f"bad letter label {label!r}")
            if label in rows:
                raise DuplicateKeyError(f"{path}:{lineno}: duplicate label {label!r}")
            try:
                rows[label] = [float(v) for v in values]
            except ValueError as exc:
                raise MalformedLineError(path, lineno, str(exc)) from exc
    missing = set("abcdef") - set(rows)
    if missing:
        raise IngestError(f"{path}: missing letter rows {sorted(missing)}")
    widths = {len(v) for v in rows.values()}
    if len(widths) != 1 or not rows["a"]:
        raise IngestError(f"{path}: rows have inconsistent or zero dimension")
    return rows
