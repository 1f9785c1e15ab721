"""Datasets and file formats: text cleaning, the toy embedder, embedding
and pair files, synthetic wrong-match generation, and SICK conversion.

File formats (shared with external producers such as the use-exporter
tool):

* embedding file — UTF-8 JSON Lines, one object ``{"id": str,
  "vector": [numbers]}`` per line, no header; the dimension is inferred
  from the first line and enforced on the rest.
* pair file — UTF-8 CSV with header ``driver_id,target_id,label``.
* SICK input — the distribution's tab-separated file; only the two
  sentence columns and ``relatedness_score`` are consumed.
"""

from __future__ import annotations

import csv
import hashlib
import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    DuplicateIdError,
    InsufficientPairsError,
    MalformedRecordError,
    OutOfRangeError,
)

_PUNCT_RE = re.compile(r"[^\w\s]|_", flags=re.UNICODE)


@dataclass(frozen=True)
class EmbeddingRecord:
    """One id plus its fixed-dimension embedding vector."""

    id: str
    vector: np.ndarray


@dataclass(frozen=True)
class PairExample:
    """A driver-target id pair with its binary label.

    Label 0 means a right match, 1 a wrong match (smaller distance =
    more similar, so right matches aim at 0).
    """

    driver_id: str
    target_id: str
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class CleaningConfig:
    """Cleaning rules applied before embedding.

    ``boilerplate_terms`` are lowercase tokens dropped after
    tokenization (matched case-insensitively); they must not contain
    whitespace.
    """

    boilerplate_terms: frozenset[str] = field(default_factory=frozenset)
    lowercase: bool = True
    strip_punctuation: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "boilerplate_terms", frozenset(self.boilerplate_terms))
        for term in self.boilerplate_terms:
            if not term or any(c.isspace() for c in term):
                raise ValueError(f"boilerplate term {term!r} contains whitespace")


def clean_text(text: str, config: CleaningConfig | None = None) -> str:
    """Normalize one piece of text.

    Lowercases, replaces punctuation with spaces, drops boilerplate
    tokens, and collapses whitespace runs. Empty output is legal.
    """
    config = config or CleaningConfig()
    if config.lowercase:
        text = text.lower()
    if config.strip_punctuation:
        text = _PUNCT_RE.sub(" ", text)
    tokens = [
        tok for tok in text.split() if tok.casefold() not in config.boilerplate_terms
    ]
    return " ".join(tokens)


def toy_embed(
    text: str,
    dim: int = 512,
    seed: int = 0,
    config: CleaningConfig | None = None,
) -> np.ndarray:
    """Deterministic feature-hashing embedder.

    Stands in for a real sentence encoder when the pipeline is exercised
    without one: each cleaned token hashes (keyed by the seed) to a
    coordinate and a sign, the signed counts accumulate, and the result
    is L2-normalized. The all-zero vector (no surviving tokens) is
    returned as-is. Token order never matters: signed unit increments
    sum exactly.
    """
    if dim < 2:
        raise ValueError(f"embedding dimension must be >= 2, got {dim}")
    key = seed.to_bytes(8, "little", signed=True)
    vec = np.zeros(dim, dtype=np.float64)
    for token in clean_text(text, config).split():
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
        value = int.from_bytes(digest, "little")
        index = (value >> 1) % dim
        sign = 1.0 if value & 1 else -1.0
        vec[index] += sign
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


def read_embeddings(path: str | Path) -> list[EmbeddingRecord]:
    """Load an embedding file, enforcing shared dimension and unique ids."""
    records: list[EmbeddingRecord] = []
    seen: set[str] = set()
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rec_id = obj["id"]
                raw = obj["vector"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise MalformedRecordError(f"{path}:{lineno}: {exc}") from exc
            if not isinstance(rec_id, str) or not isinstance(raw, list) or not raw:
                raise MalformedRecordError(
                    f"{path}:{lineno}: expected a string id and a non-empty vector"
                )
            try:
                vector = np.asarray(raw, dtype=np.float64)
            except (TypeError, ValueError) as exc:
                raise MalformedRecordError(f"{path}:{lineno}: {exc}") from exc
            if vector.ndim != 1 or not np.isfinite(vector).all():
                raise MalformedRecordError(f"{path}:{lineno}: vector must be flat and finite")
            if dim is None:
                dim = vector.size
            elif vector.size != dim:
                raise DimensionMismatchError(
                    f"{path}:{lineno}: vector has length {vector.size}, file dimension is {dim}"
                )
            if rec_id in seen:
                raise DuplicateIdError(f"{path}:{lineno}: duplicate id {rec_id!r}")
            seen.add(rec_id)
            records.append(EmbeddingRecord(rec_id, vector))
    return records


def write_embeddings(records: Iterable[EmbeddingRecord], path: str | Path) -> None:
    """Write records as JSON Lines; floats keep full round-trip precision."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps({"id": rec.id, "vector": list(map(float, rec.vector))}))
            fh.write("\n")


def embeddings_by_id(records: Iterable[EmbeddingRecord]) -> dict[str, np.ndarray]:
    return {rec.id: rec.vector for rec in records}


def read_pairs(path: str | Path) -> list[PairExample]:
    """Load a pair CSV (header ``driver_id,target_id,label``)."""
    pairs: list[PairExample] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"driver_id", "target_id", "label"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise MalformedRecordError(
                f"{path}: pair file must have columns driver_id,target_id,label"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                pairs.append(
                    PairExample(row["driver_id"], row["target_id"], int(row["label"]))
                )
            except (ValueError, TypeError) as exc:
                raise MalformedRecordError(f"{path}:{lineno}: {exc}") from exc
    return pairs


def write_pairs(pairs: Iterable[PairExample], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["driver_id", "target_id", "label"])
        for pair in pairs:
            writer.writerow([pair.driver_id, pair.target_id, pair.label])


def generate_negatives(
    positives: Iterable[PairExample],
    drivers: Iterable[str],
    targets: Iterable[str],
    unmatched_targets: Iterable[str],
    n: int,
    seed: int = 0,
) -> list[PairExample]:
    """Sample n distinct wrong matches absent from the positive set.

    When unmatched targets exist (targets no driver pairs with), at
    least half of the emitted pairs use one: those combinations are
    known-wrong for every driver and expose the model to more of the
    rare vocabulary. Output order is deterministic for a given seed.

    Raises InsufficientPairsError when fewer than n wrong combinations
    exist at all.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    drivers = sorted(set(drivers))
    targets_sorted = sorted(set(targets))
    unmatched = set(unmatched_targets)
    if not unmatched <= set(targets_sorted):
        raise ValueError("unmatched_targets must be a subset of targets")
    taken = {(p.driver_id, p.target_id) for p in positives}

    matched_pool: list[tuple[str, str]] = []
    unmatched_pool: list[tuple[str, str]] = []
    for d in drivers:
        for t in targets_sorted:
            if (d, t) in taken:
                continue
            (unmatched_pool if t in unmatched else matched_pool).append((d, t))

    total = len(matched_pool) + len(unmatched_pool)
    if total < n:
        raise InsufficientPairsError(
            f"only {total} wrong combinations exist, {n} were requested"
        )

    # Bias: fill at least ceil(n/2) from the unmatched pool when it can
    # supply them, and spill over whenever the matched pool runs short.
    want_unmatched = 0
    if unmatched_pool:
        want_unmatched = min(len(unmatched_pool), max((n + 1) // 2, n - len(matched_pool)))
    rng = random.Random(seed)
    chosen = rng.sample(unmatched_pool, want_unmatched)
    chosen += rng.sample(matched_pool, n - want_unmatched)
    rng.shuffle(chosen)
    return [PairExample(d, t, 1) for d, t in chosen]


FILTERED = None
"""Sentinel returned by :func:`sick_convert` for midrange-dropped scores."""


def sick_convert(relatedness: float, drop_midrange: bool = False) -> int | None:
    """Map a 0..5 relatedness score to a binary label.

    Scores above 3 (exclusive) are similar (0); 3 and below are
    dissimilar (1). With ``drop_midrange``, scores in (2, 3] return
    ``None`` (filtered out): those sit right against the cut and are the
    pairs most likely to be more similar than their label claims.
    """
    if not (0.0 <= relatedness <= 5.0):
        raise OutOfRangeError(f"relatedness score must be in [0, 5], got {relatedness!r}")
    if relatedness > 3.0:
        return 0
    if drop_midrange and relatedness > 2.0:
        return FILTERED
    return 1


@dataclass(frozen=True)
class SickSentencePair:
    """One SICK row reduced to what the pipeline consumes."""

    pair_id: str
    sentence_a: str
    sentence_b: str
    relatedness: float


def read_sick(path: str | Path) -> list[SickSentencePair]:
    """Parse the SICK distribution's TSV file.

    Requires the ``sentence_A``, ``sentence_B`` and ``relatedness_score``
    columns (matched case-insensitively); entailment columns are
    ignored. ``pair_ID`` is used when present, otherwise the line
    number.
    """
    rows: list[SickSentencePair] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter="\t")
        try:
            header = next(reader)
        except StopIteration:
            return rows
        lookup = {name.strip().lower(): i for i, name in enumerate(header)}
        try:
            col_a = lookup["sentence_a"]
            col_b = lookup["sentence_b"]
            col_rel = lookup["relatedness_score"]
        except KeyError as exc:
            raise MalformedRecordError(
                f"{path}: missing required SICK column {exc.args[0]!r}"
            ) from exc
        col_id = lookup.get("pair_id")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                relatedness = float(row[col_rel])
                rows.append(
                    SickSentencePair(
                        pair_id=row[col_id] if col_id is not None else str(lineno),
                        sentence_a=row[col_a],
                        sentence_b=row[col_b],
                        relatedness=relatedness,
                    )
                )
            except (IndexError, ValueError) as exc:
                raise MalformedRecordError(f"{path}:{lineno}: {exc}") from exc
    return rows


def sick_to_pairs(
    rows: Sequence[SickSentencePair], drop_midrange: bool = False
) -> tuple[list[PairExample], list[tuple[str, str]]]:
    """Convert SICK rows to labeled pairs plus an id/text table.

    Identical sentences are deduplicated to a single id so both
    embedding export and pair files stay consistent. Returns
    (pairs, texts) where texts is a list of (id, sentence) in first-seen
    order.
    """
    text_ids: dict[str, str] = {}
    texts: list[tuple[str, str]] = []

    def intern(sentence: str) -> str:
        if sentence not in text_ids:
            text_ids[sentence] = f"s{len(text_ids):06d}"
            texts.append((text_ids[sentence], sentence))
        return text_ids[sentence]

    pairs: list[PairExample] = []
    for row in rows:
        label = sick_convert(row.relatedness, drop_midrange)
        if label is FILTERED:
            continue
        pairs.append(PairExample(intern(row.sentence_a), intern(row.sentence_b), label))
    return pairs, texts


def write_texts(texts: Iterable[tuple[str, str]], path: str | Path) -> None:
    """Write an ``id<TAB>text`` file (the embedding exporters' input)."""
    with open(path, "w", encoding="utf-8") as fh:
        for text_id, text in texts:
            fh.write(f"{text_id}\t{text}\n")


def read_texts(path: str | Path) -> list[tuple[str, str]]:
    """Read an ``id<TAB>text`` file."""
    texts: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise MalformedRecordError(f"{path}:{lineno}: expected id<TAB>text")
            text_id, text = line.split("\t", 1)
            texts.append((text_id, text))
    return texts
