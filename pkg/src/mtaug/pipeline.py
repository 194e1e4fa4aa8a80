"""Streaming corpus augmentation: filter, transform per task, write outputs.

The pipeline reads a parallel corpus (plus alignment files when the configured
tasks need them) line by line, drops pairs outside the length window, applies
every task to every kept pair, and writes one output corpus per task next to a
JSON manifest. Output bytes depend only on the inputs, the task list and the
seed, never on the worker count, so runs are reproducible and can be compared
by checksum.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import random
import struct
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from contextlib import ExitStack
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator

from .align import (
    BilingualLexicon,
    OneToOneAlignment,
    as_one_to_one,
    build_lexicon,
    intersect,
    parse_alignment_line,
    read_lexicon_tsv,
)
from .errors import ConfigError, DataError
from .transform import ALPHA_KINDS, SentencePair, TaskContext, TaskSpec, apply_task

DEFAULT_MIN_LEN = 5
DEFAULT_MAX_LEN = 100
BATCH_LINES = 512

_STOCHASTIC_KINDS = frozenset({"token", "swap", "replace"})
_MAX_SEED = 2**63


def filter_pair(pair: SentencePair, min_len: int = DEFAULT_MIN_LEN, max_len: int = DEFAULT_MAX_LEN) -> bool:
    """True when both sides have between min_len and max_len tokens, inclusive."""
    return min_len <= len(pair.src) <= max_len and min_len <= len(pair.tgt) <= max_len


def line_rng(seed: int, task_index: int, line_index: int) -> random.Random:
    """Deterministic per-line generator, independent across tasks and lines.

    The triple is packed little-endian (seed as signed 64-bit, indices as
    unsigned 64-bit) and hashed with blake2b so that neighbouring lines get
    unrelated streams.
    """
    digest = hashlib.blake2b(struct.pack("<qQQ", seed, task_index, line_index), digest_size=16).digest()
    return random.Random(int.from_bytes(digest, "little"))


@dataclass(slots=True)
class AugmentConfig:
    """Everything one augmentation run needs. Paths stay as given by the caller."""

    src: str
    tgt: str
    tasks: tuple[TaskSpec, ...]
    out_prefix: str
    seed: int = 0
    min_len: int = DEFAULT_MIN_LEN
    max_len: int = DEFAULT_MAX_LEN
    align_s2t: str | None = None
    align_t2s: str | None = None
    align_o2o: str | None = None
    lexicon_path: str | None = None
    lexicon: BilingualLexicon | None = None
    concat: bool = False
    threads: int = 1

    def validate(self) -> None:
        if not self.tasks:
            raise ConfigError("at least the main task is required")
        if self.tasks[0].kind != "main":
            raise ConfigError(f"the first task must be 'main', got {self.tasks[0].kind!r}")
        kinds = [t.kind for t in self.tasks]
        if len(set(kinds)) != len(kinds):
            raise ConfigError("task kinds must be pairwise distinct")
        tags = [t.tag for t in self.tasks if t.tag is not None]
        if len(set(tags)) != len(tags):
            raise ConfigError("task tags must be pairwise distinct")
        if not self.out_prefix:
            raise ConfigError("an output prefix is required")
        if self.min_len < 1 or self.max_len < self.min_len:
            raise ConfigError(f"need 1 <= min_len <= max_len, got {self.min_len}..{self.max_len}")
        if not -_MAX_SEED <= self.seed < _MAX_SEED:
            raise ConfigError("seed must fit in a signed 64-bit integer")
        if self.threads < 1:
            raise ConfigError(f"threads must be at least 1, got {self.threads}")
        if "mono" in kinds and self.align_s2t is None:
            raise ConfigError("task 'mono' requires a source-to-target alignment file")
        if "replace" in kinds:
            if self.lexicon is None and self.lexicon_path is None:
                raise ConfigError("task 'replace' requires a lexicon")
            if self.align_o2o is None and (self.align_s2t is None or self.align_t2s is None):
                raise ConfigError(
                    "task 'replace' requires a one-to-one alignment file, "
                    "or both directional files to intersect"
                )

    def describe(self) -> dict:
        """Resolved settings as a plain dict, echoed by the CLI and stored in the manifest."""
        return {
            "src": self.src,
            "tgt": self.tgt,
            "out_prefix": self.out_prefix,
            "seed": self.seed,
            "min_len": self.min_len,
            "max_len": self.max_len,
            "align_s2t": self.align_s2t,
            "align_t2s": self.align_t2s,
            "align_o2o": self.align_o2o,
            "lexicon": self.lexicon_path,
            "concat": self.concat,
            "tasks": [
                {"kind": t.kind, "alpha": t.alpha, "tag": t.tag, "unk": t.unk}
                for t in self.tasks
            ],
        }


@dataclass
class Manifest:
    """Run summary written next to the output corpora as <prefix>.manifest."""

    config: dict
    input_lines: int
    kept_lines: int
    filtered_lines: int
    tasks: dict[str, dict]
    checksums: dict[str, str]
    warnings: dict[str, int]

    def to_json(self) -> str:
        body = {
            "config": self.config,
            "input_lines": self.input_lines,
            "kept_lines": self.kept_lines,
            "filtered_lines": self.filtered_lines,
            "tasks": self.tasks,
            "checksums": self.checksums,
            "warnings": self.warnings,
        }
        return json.dumps(body, sort_keys=True, indent=2) + "\n"


@dataclass(slots=True)
class _WorkerState:
    tasks: tuple[TaskSpec, ...]
    seed: int
    min_len: int
    max_len: int
    lexicon: BilingualLexicon | None
    derive_o2o: bool


_WORKER: _WorkerState | None = None


def _init_worker(state: _WorkerState) -> None:
    global _WORKER
    _WORKER = state


def _process_batch(batch: list[tuple]) -> tuple[list, dict[str, int]]:
    """Transform one batch of raw lines. Pure given the worker state and the batch."""
    st = _WORKER
    warnings: Counter[str] = Counter()
    rows: list[list[tuple[str, str, int, int]] | None] = []
    for line_index, src_line, tgt_line, s2t_line, t2s_line, o2o_line in batch:
        src_tokens = src_line.split()
        tgt_tokens = tgt_line.split()
        if not (st.min_len <= len(src_tokens) <= st.max_len and st.min_len <= len(tgt_tokens) <= st.max_len):
            rows.append(None)
            continue
        pair = SentencePair(tuple(src_tokens), tuple(tgt_tokens))
        line_no = line_index + 1
        s2t = parse_alignment_line(s2t_line, line_no=line_no) if s2t_line is not None else None
        o2o: OneToOneAlignment | None = None
        if o2o_line is not None:
            o2o = as_one_to_one(parse_alignment_line(o2o_line, line_no=line_no), line_no=line_no)
        elif st.derive_o2o:
            t2s = parse_alignment_line(t2s_line, reversed=True, line_no=line_no)
            o2o = intersect(s2t, t2s, warnings)
        row = []
        for task_index, task in enumerate(st.tasks):
            if task.kind == "main":
                # pass the raw line through so untagged output round-trips byte for byte
                src_out = src_line if task.tag is None else f"{task.tag} {src_line}"
                tgt_out = tgt_line
                n_src = len(src_tokens) + (0 if task.tag is None else 1)
                n_tgt = len(tgt_tokens)
            else:
                rng = line_rng(st.seed, task_index, line_index) if task.kind in _STOCHASTIC_KINDS else None
                ctx = TaskContext(s2t=s2t, o2o=o2o, lexicon=st.lexicon, rng=rng, warnings=warnings)
                out = apply_task(task, pair, ctx)
                src_out = " ".join(out.src)
                tgt_out = " ".join(out.tgt)
                n_src = len(out.src)
                n_tgt = len(out.tgt)
            row.append((src_out, tgt_out, n_src, n_tgt))
        rows.append(row)
    return rows, dict(warnings)


_SENTINEL = object()


def _ordered_map(pool: ProcessPoolExecutor, fn, items: Iterable, window: int) -> Iterator:
    """Like pool.map but with bounded submission, yielding results in input order."""
    futures: deque = deque()
    items = iter(items)
    for item in itertools.islice(items, window):
        futures.append(pool.submit(fn, item))
    while futures:
        fut = futures.popleft()
        nxt = next(items, _SENTINEL)
        if nxt is not _SENTINEL:
            futures.append(pool.submit(fn, nxt))
        yield fut.result()


def _count_lines(path: str) -> int:
    try:
        with open(path, "rb") as f:
            return sum(1 for _ in f)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


@dataclass(slots=True)
class _TaskWriter:
    kind: str
    src_path: str
    tgt_path: str
    src_file: BinaryIO
    tgt_file: BinaryIO
    src_hash: "hashlib._Hash" = field(default_factory=hashlib.sha256)
    tgt_hash: "hashlib._Hash" = field(default_factory=hashlib.sha256)
    lines: int = 0
    src_tokens: int = 0
    tgt_tokens: int = 0

    def write(self, src_out: str, tgt_out: str, n_src: int, n_tgt: int) -> None:
        src_bytes = src_out.encode("utf-8") + b"\n"
        tgt_bytes = tgt_out.encode("utf-8") + b"\n"
        self.src_file.write(src_bytes)
        self.tgt_file.write(tgt_bytes)
        self.src_hash.update(src_bytes)
        self.tgt_hash.update(tgt_bytes)
        self.lines += 1
        self.src_tokens += n_src
        self.tgt_tokens += n_tgt


def _iter_batches(src_f, tgt_f, s2t_f, t2s_f, o2o_f) -> Iterator[list[tuple]]:
    def lines_or_none(f):
        return f if f is not None else itertools.repeat(None)

    batch: list[tuple] = []
    zipped = zip(src_f, tgt_f, lines_or_none(s2t_f), lines_or_none(t2s_f), lines_or_none(o2o_f))
    for line_index, (src, tgt, a_s2t, a_t2s, a_o2o) in enumerate(zipped):
        batch.append((
            line_index,
            src.rstrip("\n"),
            tgt.rstrip("\n"),
            a_s2t.rstrip("\n") if a_s2t is not None else None,
            a_t2s.rstrip("\n") if a_t2s is not None else None,
            a_o2o.rstrip("\n") if a_o2o is not None else None,
        ))
        if len(batch) >= BATCH_LINES:
            yield batch
            batch = []
    if batch:
        yield batch


def augment_corpus(config: AugmentConfig) -> Manifest:
    """Run the full augmentation pipeline and return the written manifest."""
    config.validate()
    kinds = {t.kind for t in config.tasks}

    lexicon = config.lexicon
    if lexicon is None and config.lexicon_path is not None and "replace" in kinds:
        try:
            with open(config.lexicon_path, encoding="utf-8") as f:
                lexicon = read_lexicon_tsv(f)
        except OSError as exc:
            raise DataError(f"cannot read {config.lexicon_path}: {exc.strerror}") from None
    if "replace" in kinds and lexicon is not None and len(lexicon) == 0:
        raise ConfigError("the replace task requires a non-empty lexicon")

    derive_o2o = "replace" in kinds and config.align_o2o is None
    use_s2t = config.align_s2t if ("mono" in kinds or derive_o2o) else None
    use_t2s = config.align_t2s if derive_o2o else None
    use_o2o = config.align_o2o if "replace" in kinds else None

    inputs = {"source corpus": config.src, "target corpus": config.tgt}
    if use_s2t is not None:
        inputs["source-to-target alignment"] = use_s2t
    if use_t2s is not None:
        inputs["target-to-source alignment"] = use_t2s
    if use_o2o is not None:
        inputs["one-to-one alignment"] = use_o2o
    line_counts = {name: _count_lines(path) for name, path in inputs.items()}
    if len(set(line_counts.values())) > 1:
        detail = ", ".join(f"{name} {path}: {line_counts[name]}" for name, path in inputs.items())
        raise DataError(f"input files differ in line count ({detail})")
    input_lines = line_counts["source corpus"]

    out_dir = os.path.dirname(config.out_prefix)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)

    state = _WorkerState(
        tasks=config.tasks,
        seed=config.seed,
        min_len=config.min_len,
        max_len=config.max_len,
        lexicon=lexicon if "replace" in kinds else None,
        derive_o2o=derive_o2o,
    )

    warnings_total: Counter[str] = Counter()
    kept = 0
    writers: list[_TaskWriter] = []
    with ExitStack() as stack:
        src_f = stack.enter_context(open(config.src, encoding="utf-8"))
        tgt_f = stack.enter_context(open(config.tgt, encoding="utf-8"))
        s2t_f = stack.enter_context(open(use_s2t, encoding="utf-8")) if use_s2t else None
        t2s_f = stack.enter_context(open(use_t2s, encoding="utf-8")) if use_t2s else None
        o2o_f = stack.enter_context(open(use_o2o, encoding="utf-8")) if use_o2o else None

        for task in config.tasks:
            src_path = f"{config.out_prefix}.{task.kind}.src"
            tgt_path = f"{config.out_prefix}.{task.kind}.tgt"
            writers.append(_TaskWriter(
                kind=task.kind,
                src_path=src_path,
                tgt_path=tgt_path,
                src_file=stack.enter_context(open(src_path, "wb")),
                tgt_file=stack.enter_context(open(tgt_path, "wb")),
            ))

        batches = _iter_batches(src_f, tgt_f, s2t_f, t2s_f, o2o_f)
        if config.threads > 1:
            with ProcessPoolExecutor(
                max_workers=config.threads, initializer=_init_worker, initargs=(state,)
            ) as pool:
                results = _ordered_map(pool, _process_batch, batches, window=config.threads * 4)
                for rows, warn in results:
                    kept += _write_rows(rows, writers)
                    warnings_total.update(warn)
        else:
            _init_worker(state)
            for batch in batches:
                rows, warn = _process_batch(batch)
                kept += _write_rows(rows, writers)
                warnings_total.update(warn)

    prefix_base = os.path.basename(config.out_prefix)
    tasks_summary: dict[str, dict] = {}
    # keyed by task and side, not by file name, so runs under different
    # prefixes can be compared checksum for checksum
    checksums: dict[str, str] = {}
    for w in writers:
        tasks_summary[w.kind] = {
            "lines": w.lines,
            "src_tokens": w.src_tokens,
            "tgt_tokens": w.tgt_tokens,
            "src_file": f"{prefix_base}.{w.kind}.src",
            "tgt_file": f"{prefix_base}.{w.kind}.tgt",
        }
        checksums[f"{w.kind}.src"] = w.src_hash.hexdigest()
        checksums[f"{w.kind}.tgt"] = w.tgt_hash.hexdigest()

    if config.concat:
        for side in ("src", "tgt"):
            concat_path = f"{config.out_prefix}.concat.{side}"
            digest = hashlib.sha256()
            with open(concat_path, "wb") as out:
                for w in writers:
                    part = w.src_path if side == "src" else w.tgt_path
                    with open(part, "rb") as f:
                        while chunk := f.read(1 << 16):
                            out.write(chunk)
                            digest.update(chunk)
            checksums[f"concat.{side}"] = digest.hexdigest()

    manifest = Manifest(
        config=config.describe(),
        input_lines=input_lines,
        kept_lines=kept,
        filtered_lines=input_lines - kept,
        tasks=tasks_summary,
        checksums=checksums,
        warnings=dict(warnings_total),
    )
    with open(f"{config.out_prefix}.manifest", "w", encoding="utf-8") as f:
        f.write(manifest.to_json())
    return manifest


def _write_rows(rows: list, writers: list[_TaskWriter]) -> int:
    kept = 0
    for row in rows:
        if row is None:
            continue
        kept += 1
        for writer, (src_out, tgt_out, n_src, n_tgt) in zip(writers, row):
            writer.write(src_out, tgt_out, n_src, n_tgt)
    return kept


_MISSING = object()


def iter_aligned_pairs(src_path: str, tgt_path: str, *, s2t_path: str | None = None,
                       t2s_path: str | None = None, o2o_path: str | None = None,
                       warnings: Counter | None = None) -> Iterator[tuple[SentencePair, OneToOneAlignment]]:
    """Stream (pair, one-to-one alignment) tuples for lexicon building.

    Needs either a one-to-one alignment file or both directional files, which
    are then intersected line by line. Length mismatches between the files
    raise DataError at the offending line.
    """
    if o2o_path is None and (s2t_path is None or t2s_path is None):
        raise ConfigError("need a one-to-one alignment file, or both directional files to intersect")
    with ExitStack() as stack:
        def open_text(path):
            try:
                return stack.enter_context(open(path, encoding="utf-8"))
            except OSError as exc:
                raise DataError(f"cannot read {path}: {exc.strerror}") from None

        src_f = open_text(src_path)
        tgt_f = open_text(tgt_path)
        if o2o_path is not None:
            align_fs = [open_text(o2o_path)]
        else:
            align_fs = [open_text(s2t_path), open_text(t2s_path)]
        zipped = itertools.zip_longest(src_f, tgt_f, *align_fs, fillvalue=_MISSING)
        for line_index, columns in enumerate(zipped):
            if any(col is _MISSING for col in columns):
                raise DataError(f"input files differ in line count near line {line_index + 1}")
            src_line, tgt_line = columns[0], columns[1]
            line_no = line_index + 1
            if o2o_path is not None:
                o2o = as_one_to_one(
                    parse_alignment_line(columns[2].rstrip("\n"), line_no=line_no), line_no=line_no
                )
            else:
                s2t = parse_alignment_line(columns[2].rstrip("\n"), line_no=line_no)
                t2s = parse_alignment_line(columns[3].rstrip("\n"), reversed=True, line_no=line_no)
                o2o = intersect(s2t, t2s, warnings)
            yield SentencePair.from_lines(src_line, tgt_line), o2o


def build_lexicon_from_files(src_path: str, tgt_path: str, *, s2t_path: str | None = None,
                             t2s_path: str | None = None, o2o_path: str | None = None,
                             warnings: Counter | None = None) -> BilingualLexicon:
    """Build a lexicon directly from corpus and alignment files."""
    return build_lexicon(iter_aligned_pairs(
        src_path, tgt_path, s2t_path=s2t_path, t2s_path=t2s_path, o2o_path=o2o_path,
        warnings=warnings,
    ))


@dataclass(frozen=True, slots=True)
class CorpusStats:
    path: str
    lines: int
    tokens: int


def corpus_stats(paths: Iterable[str]) -> list[CorpusStats]:
    """Line and whitespace-token counts for each file."""
    out = []
    for path in paths:
        lines = 0
        tokens = 0
        try:
            with open(path, encoding="utf-8") as f:
                for line in f:
                    lines += 1
                    tokens += len(line.split())
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc.strerror}") from None
        out.append(CorpusStats(path=path, lines=lines, tokens=tokens))
    return out
