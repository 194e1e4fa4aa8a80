"""Target-side transformations that synthesize auxiliary training tasks.

Each transform takes a tokenized sentence pair and returns a new pair. The
source side is left alone except by ``replace_aligned`` (which rewrites both
sides) and by task tagging, which prepends one reserved token to the source.
Counting behaviour is exact: given a ratio ``alpha`` and ``t`` target tokens,
``token_mask`` masks ``floor(alpha * t)`` positions, ``swap`` moves
``2 * floor(floor(alpha * t) / 2)`` positions, and ``replace_aligned`` rewrites
``min(floor(alpha * t), links)`` aligned positions.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from .align import BilingualLexicon, OneToOneAlignment, WordAlignment
from .errors import ConfigError, DataError

TASK_KINDS = ("main", "swap", "token", "source", "reverse", "mono", "replace")
ALPHA_KINDS = frozenset({"swap", "token", "replace"})
DEFAULT_UNK = "UNK"
DEFAULT_TAG_FORMAT = "<task:{kind}>"
SWAP_MAX_REDRAWS = 100


@dataclass(frozen=True, slots=True)
class SentencePair:
    """A tokenized parallel sentence, source and target."""

    src: tuple[str, ...]
    tgt: tuple[str, ...]

    @classmethod
    def from_lines(cls, src_line: str, tgt_line: str) -> "SentencePair":
        return cls(tuple(src_line.split()), tuple(tgt_line.split()))

    def src_line(self) -> str:
        return " ".join(self.src)

    def tgt_line(self) -> str:
        return " ".join(self.tgt)


@dataclass(frozen=True, slots=True)
class TaskSpec:
    """One augmentation task: a kind plus the knobs that kind needs.

    ``alpha`` is required for swap, token and replace and rejected elsewhere.
    ``tag`` is the token prepended to the source side, or None for untagged
    output. ``unk`` is the mask symbol used by the token task.
    """

    kind: str
    alpha: float | None = None
    unk: str = DEFAULT_UNK
    tag: str | None = None

    def __post_init__(self):
        if self.kind not in TASK_KINDS:
            raise ConfigError(f"unknown task kind {self.kind!r}; expected one of {', '.join(TASK_KINDS)}")
        if self.kind in ALPHA_KINDS:
            if self.alpha is None:
                raise ConfigError(f"task {self.kind!r} requires an alpha ratio")
            if not 0.0 <= self.alpha <= 1.0:
                raise ConfigError(f"alpha for task {self.kind!r} must be in [0, 1], got {self.alpha}")
        elif self.alpha is not None:
            raise ConfigError(f"task {self.kind!r} does not take an alpha ratio")
        if self.kind == "token" and (not self.unk or len(self.unk.split()) != 1):
            raise ConfigError(f"mask symbol must be a single non-empty token, got {self.unk!r}")
        if self.tag is not None and (not self.tag or len(self.tag.split()) != 1):
            raise ConfigError(f"task tag must be a single non-empty token, got {self.tag!r}")


def make_task(kind: str, alpha: float | None = None, unk: str = DEFAULT_UNK,
              tag_format: str | None = DEFAULT_TAG_FORMAT) -> TaskSpec:
    """Build a TaskSpec with its tag rendered from ``tag_format`` (None disables tagging)."""
    tag = tag_format.format(kind=kind) if tag_format is not None else None
    return TaskSpec(kind=kind, alpha=alpha, unk=unk, tag=tag)


@dataclass(slots=True)
class TaskContext:
    """Per-line resources a transform may need: alignments, lexicon, seeded rng."""

    s2t: WordAlignment | None = None
    o2o: OneToOneAlignment | None = None
    lexicon: BilingualLexicon | None = None
    rng: random.Random | None = None
    warnings: Counter | None = None


def _affected_count(alpha: float, t: int) -> int:
    # floor(alpha * t), nudged so decimal ratios like 0.7 * 10 do not floor to 6
    return int(alpha * t + 1e-9)


def reverse(pair: SentencePair) -> SentencePair:
    """Reverse the target token order."""
    return SentencePair(pair.src, tuple(reversed(pair.tgt)))


def copy_source(pair: SentencePair) -> SentencePair:
    """Replace the target with a copy of the source."""
    return SentencePair(pair.src, pair.src)


def token_mask(pair: SentencePair, alpha: float, unk: str, rng: random.Random) -> SentencePair:
    """Mask floor(alpha * t) distinct target positions with the unk symbol."""
    t = len(pair.tgt)
    k = _affected_count(alpha, t)
    if k == 0:
        return SentencePair(pair.src, pair.tgt)
    out = list(pair.tgt)
    for pos in rng.sample(range(t), k):
        out[pos] = unk
    return SentencePair(pair.src, tuple(out))


def swap(pair: SentencePair, alpha: float, rng: random.Random) -> SentencePair:
    """Swap floor(floor(alpha * t) / 2) disjoint target position pairs.

    Every chosen position takes part in exactly one swap, so when the sentence
    has no repeated tokens exactly ``2 * floor(floor(alpha * t) / 2)`` positions
    end up displaced. Each swap redraws while the two drawn tokens are equal,
    up to SWAP_MAX_REDRAWS attempts, then accepts whatever it drew so that
    degenerate all-equal sentences still terminate.
    """
    t = len(pair.tgt)
    n_swaps = _affected_count(alpha, t) // 2
    if n_swaps == 0 or t < 2:
        return SentencePair(pair.src, pair.tgt)
    out = list(pair.tgt)
    in_place = list(range(t))
    for _ in range(n_swaps):
        if len(in_place) < 2:
            break
        a = b = 0
        for _attempt in range(SWAP_MAX_REDRAWS):
            a, b = rng.sample(range(len(in_place)), 2)
            if out[in_place[a]] != out[in_place[b]]:
                break
        i, j = in_place[a], in_place[b]
        out[i], out[j] = out[j], out[i]
        for idx in sorted((a, b), reverse=True):
            del in_place[idx]
    return SentencePair(pair.src, tuple(out))


def monotone_reorder(pair: SentencePair, s2t: WordAlignment,
                     warnings: Counter | None = None) -> SentencePair:
    """Reorder target tokens so their linked source indices are non-decreasing.

    Each target position is keyed by its linked source index; unaligned
    positions inherit the key of the nearest aligned position to their left
    (-1 before the first one) so they travel with their left neighbour. The
    sort is stable, so equal keys keep their original relative order. A target
    index linked to several sources uses the smallest of them and is counted
    under ``warnings["mono_multi_link"]``.
    """
    t = len(pair.tgt)
    key_by_tgt: dict[int, int] = {}
    multi: set[int] = set()
    for i, j in s2t.links:
        if i >= len(pair.src) or j >= t:
            raise DataError(f"link {i}-{j} out of range for a {len(pair.src)}x{t} token pair")
        if j in key_by_tgt:
            multi.add(j)
            if i < key_by_tgt[j]:
                key_by_tgt[j] = i
        else:
            key_by_tgt[j] = i
    if multi and warnings is not None:
        warnings["mono_multi_link"] += len(multi)
    keys = []
    prev = -1
    for j in range(t):
        if j in key_by_tgt:
            prev = key_by_tgt[j]
        keys.append(prev)
    order = sorted(range(t), key=keys.__getitem__)
    return SentencePair(pair.src, tuple(pair.tgt[j] for j in order))


def replace_aligned(pair: SentencePair, alpha: float, o2o: OneToOneAlignment,
                    lexicon: BilingualLexicon, rng: random.Random) -> SentencePair:
    """Rewrite min(floor(alpha * t), len(o2o)) aligned positions on both sides.

    For each sampled link a new source word is drawn uniformly from the
    lexicon; the linked source position takes that word and the linked target
    position takes its lexicon translation. Draws are independent, with no
    rejection when a drawn word equals the one it replaces.
    """
    t = len(pair.tgt)
    k = min(_affected_count(alpha, t), len(o2o.links))
    if k == 0:
        return SentencePair(pair.src, pair.tgt)
    if len(lexicon) == 0:
        raise ConfigError("the replace task requires a non-empty lexicon")
    src = list(pair.src)
    tgt = list(pair.tgt)
    for i, j in o2o.links:
        if i >= len(src) or j >= t:
            raise DataError(f"link {i}-{j} out of range for a {len(src)}x{t} token pair")
    for i, j in rng.sample(sorted(o2o.links), k):
        new_src = rng.choice(lexicon.source_words)
        src[i] = new_src
        tgt[j] = lexicon[new_src]
    return SentencePair(tuple(src), tuple(tgt))


def _require(value, what: str, kind: str):
    if value is None:
        raise ConfigError(f"task {kind!r} requires {what}")
    return value


def apply_task(task: TaskSpec, pair: SentencePair, ctx: TaskContext) -> SentencePair:
    """Run one task on one pair and prepend the task tag if the task has one."""
    kind = task.kind
    if kind == "main":
        out = SentencePair(pair.src, pair.tgt)
    elif kind == "reverse":
        out = reverse(pair)
    elif kind == "source":
        out = copy_source(pair)
    elif kind == "token":
        out = token_mask(pair, task.alpha, task.unk, _require(ctx.rng, "a seeded rng", kind))
    elif kind == "swap":
        out = swap(pair, task.alpha, _require(ctx.rng, "a seeded rng", kind))
    elif kind == "mono":
        out = monotone_reorder(pair, _require(ctx.s2t, "a source-to-target alignment", kind), ctx.warnings)
    elif kind == "replace":
        out = replace_aligned(
            pair,
            task.alpha,
            _require(ctx.o2o, "a one-to-one alignment", kind),
            _require(ctx.lexicon, "a lexicon", kind),
            _require(ctx.rng, "a seeded rng", kind),
        )
    else:  # unreachable: TaskSpec validates kind
        raise ConfigError(f"unknown task kind {kind!r}")
    if task.tag is not None:
        out = SentencePair((task.tag,) + out.src, out.tgt)
    return out
