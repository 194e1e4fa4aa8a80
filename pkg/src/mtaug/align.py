"""Word alignment parsing, bidirectional intersection, and lexicon extraction.

Alignments use the plain text format produced by most word aligners: one line
per sentence pair, whitespace-separated ``i-j`` items where ``i`` indexes a
source token and ``j`` a target token, both zero-based.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, TYPE_CHECKING

from .errors import DataError

if TYPE_CHECKING:
    from .transform import SentencePair

_LINK_RE = re.compile(r"(\d+)-(\d+)")


@dataclass(frozen=True, slots=True)
class WordAlignment:
    """A set of links in source-to-target orientation, possibly many-to-many."""

    links: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.links)

    def to_pharaoh(self) -> str:
        return " ".join(f"{i}-{j}" for i, j in sorted(self.links))


@dataclass(frozen=True, slots=True)
class OneToOneAlignment:
    """Links where every source index and every target index appears at most once."""

    links: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.links)

    def to_pharaoh(self) -> str:
        return " ".join(f"{i}-{j}" for i, j in sorted(self.links))


def parse_alignment_line(line: str, reversed: bool = False, line_no: int | None = None) -> WordAlignment:
    """Parse one alignment line into a WordAlignment.

    With ``reversed=True`` each item is read as ``j-i``, so files written in
    target-to-source orientation come out in source-to-target orientation.
    An empty line is a valid empty alignment.
    """
    links: set[tuple[int, int]] = set()
    for item in line.split():
        m = _LINK_RE.fullmatch(item)
        if m is None:
            where = f" on line {line_no}" if line_no is not None else ""
            raise DataError(f"malformed alignment item {item!r}{where}: expected 'i-j' with non-negative integers")
        i, j = int(m.group(1)), int(m.group(2))
        links.add((j, i) if reversed else (i, j))
    return WordAlignment(frozenset(links))


def as_one_to_one(alignment: WordAlignment, line_no: int | None = None) -> OneToOneAlignment:
    """Check that no index repeats on either side and rewrap the links."""
    seen_src: set[int] = set()
    seen_tgt: set[int] = set()
    for i, j in alignment.links:
        if i in seen_src or j in seen_tgt:
            where = f" on line {line_no}" if line_no is not None else ""
            raise DataError(f"alignment{where} is not one-to-one: index repeated in link {i}-{j}")
        seen_src.add(i)
        seen_tgt.add(j)
    return OneToOneAlignment(alignment.links)


def intersect(s2t: WordAlignment, t2s: WordAlignment, warnings: Counter | None = None) -> OneToOneAlignment:
    """Intersect two directional alignments into a one-to-one alignment.

    When both inputs are functions of their own source side (the usual shape
    for directional aligner output) the intersection is one-to-one already.
    Degenerate inputs can leave an index linked twice; links are then visited
    in sorted order, the first kept, later conflicts dropped and counted under
    ``warnings["intersect_conflicts"]``.
    """
    common = s2t.links & t2s.links
    kept: set[tuple[int, int]] = set()
    used_src: set[int] = set()
    used_tgt: set[int] = set()
    dropped = 0
    for i, j in sorted(common):
        if i in used_src or j in used_tgt:
            dropped += 1
            continue
        kept.add((i, j))
        used_src.add(i)
        used_tgt.add(j)
    if dropped and warnings is not None:
        warnings["intersect_conflicts"] += dropped
    return OneToOneAlignment(frozenset(kept))


class BilingualLexicon:
    """Maps each source word to the target word it is most often aligned with.

    Ties on frequency go to the lexicographically smallest target word, so the
    winner does not depend on the order pairs were counted in.
    """

    def __init__(self, entries: dict[str, str], counts: dict[tuple[str, str], int]):
        self.entries = entries
        self.counts = counts
        self._source_words: tuple[str, ...] | None = None

    @property
    def source_words(self) -> tuple[str, ...]:
        """Source vocabulary in sorted order, for deterministic sampling."""
        if self._source_words is None:
            self._source_words = tuple(sorted(self.entries))
        return self._source_words

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __getitem__(self, word: str) -> str:
        return self.entries[word]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BilingualLexicon):
            return NotImplemented
        return self.entries == other.entries


def build_lexicon(pairs: Iterable[tuple["SentencePair", OneToOneAlignment]]) -> BilingualLexicon:
    """Count aligned word pairs and keep the most frequent target per source word.

    Out-of-range links raise DataError. The result is insensitive to the order
    of the input stream.
    """
    counts: Counter[tuple[str, str]] = Counter()
    for line_no, (pair, alignment) in enumerate(pairs, start=1):
        n_src, n_tgt = len(pair.src), len(pair.tgt)
        for i, j in alignment.links:
            if i >= n_src or j >= n_tgt:
                raise DataError(
                    f"line {line_no}: link {i}-{j} out of range for a {n_src}x{n_tgt} token pair"
                )
            counts[(pair.src[i], pair.tgt[j])] += 1
    return lexicon_from_counts(counts)


def lexicon_from_counts(counts: dict[tuple[str, str], int]) -> BilingualLexicon:
    """Reduce pair counts to one entry per source word (highest count, ties to smallest target)."""
    best: dict[str, tuple[int, str]] = {}
    for (src_word, tgt_word), count in counts.items():
        cur = best.get(src_word)
        if cur is None or count > cur[0] or (count == cur[0] and tgt_word < cur[1]):
            best[src_word] = (count, tgt_word)
    entries = {src_word: tgt_word for src_word, (_, tgt_word) in best.items()}
    return BilingualLexicon(entries, dict(counts))


def write_lexicon_tsv(lexicon: BilingualLexicon, out: IO[str]) -> None:
    """Write entries as ``source<TAB>target<TAB>count`` rows sorted by source word."""
    for src_word in sorted(lexicon.entries):
        tgt_word = lexicon.entries[src_word]
        count = lexicon.counts.get((src_word, tgt_word), 0)
        out.write(f"{src_word}\t{tgt_word}\t{count}\n")


def read_lexicon_tsv(lines: Iterable[str]) -> BilingualLexicon:
    """Parse rows written by write_lexicon_tsv. Malformed rows raise DataError."""
    entries: dict[str, str] = {}
    counts: dict[tuple[str, str], int] = {}
    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise DataError(f"lexicon line {line_no}: expected 3 tab-separated columns, got {len(cols)}")
        src_word, tgt_word, raw_count = cols
        if not src_word or not tgt_word:
            raise DataError(f"lexicon line {line_no}: empty word")
        try:
            count = int(raw_count)
        except ValueError:
            raise DataError(f"lexicon line {line_no}: count {raw_count!r} is not an integer") from None
        if count < 0:
            raise DataError(f"lexicon line {line_no}: negative count")
        entries[src_word] = tgt_word
        counts[(src_word, tgt_word)] = count
    return BilingualLexicon(entries, counts)


def read_alignments(lines: Iterable[str], reversed: bool = False) -> Iterator[WordAlignment]:
    """Parse a stream of alignment lines, numbering them for error messages."""
    for line_no, line in enumerate(lines, start=1):
        yield parse_alignment_line(line.rstrip("\n"), reversed=reversed, line_no=line_no)
