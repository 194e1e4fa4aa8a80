"""Sentence-level adjusted BLEU and the hallucination audit protocol.

The score restricts BLEU to unigram and bigram precision with weights 0.8 and
0.2. Unigram precision is left unsmoothed so that a hypothesis sharing no
token with the reference scores exactly 0; bigram precision is smoothed by
adding 0.1 to numerator and denominator so single-token or zero-overlap
bigram cases stay finite. A sentence counts as a hallucination when its score
against the reference falls below a threshold, 10 by default. Two systems are
compared by counting sentences that only one of them hallucinates while the
other scores at least a margin (20 by default) higher.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigError, DataError

UNIGRAM_WEIGHT = 0.8
BIGRAM_WEIGHT = 0.2
BIGRAM_SMOOTHING = 0.1
DEFAULT_THRESHOLD = 10.0
DEFAULT_MARGIN = 20.0
DEFAULT_BIN_WIDTH = 5.0


@dataclass(frozen=True, slots=True)
class AdjustedBleu:
    """One sentence score with its components.

    score = 100 * brevity_penalty * exp(0.8 * ln p1 + 0.2 * ln p2_smoothed)
    when p1 > 0, and 0 when p1 = 0. ``degenerate`` marks an empty hypothesis,
    which scores 0 with brevity_penalty reported as 0.
    """

    score: float
    p1: float
    p2_smoothed: float
    brevity_penalty: float
    degenerate: bool = False


@dataclass(frozen=True, slots=True)
class Histogram:
    """Normalized frequencies over score bins covering [0, 100]."""

    edges: tuple[float, ...]
    freqs: tuple[float, ...]


@dataclass
class HallucinationReport:
    """Per-sentence scores and flags for one system, or a two-system comparison.

    ``marks`` holds one of "A", "B" or "-" per sentence in the two-system
    case: which side hallucinated alone with the other side at least
    ``margin`` points higher. Single-system reports leave the B fields,
    ``margin`` and ``marks`` as None.
    """

    threshold: float
    margin: float | None
    scores_a: list[float]
    scores_b: list[float] | None
    flagged_a: list[bool]
    flagged_b: list[bool] | None
    marks: list[str] | None
    a_only: int | None
    b_only: int | None
    hist_a: Histogram
    hist_b: Histogram | None


def _tokens(text: str | Sequence[str], lowercase: bool) -> list[str]:
    toks = text.split() if isinstance(text, str) else list(text)
    if lowercase:
        toks = [t.lower() for t in toks]
    return toks


def adjusted_bleu(hyp: str | Sequence[str], ref: str | Sequence[str], *,
                  lowercase: bool = False, brevity_penalty: bool = True) -> AdjustedBleu:
    """Score one hypothesis against one reference.

    Inputs may be whitespace-tokenizable strings or token sequences. The
    reference must be non-empty; an empty hypothesis returns a degenerate
    zero score. ``brevity_penalty=False`` drops the length penalty entirely.
    """
    hyp_toks = _tokens(hyp, lowercase)
    ref_toks = _tokens(ref, lowercase)
    if not ref_toks:
        raise DataError("reference must not be empty")
    if not hyp_toks:
        return AdjustedBleu(score=0.0, p1=0.0, p2_smoothed=1.0, brevity_penalty=0.0, degenerate=True)

    ref_uni = Counter(ref_toks)
    hyp_uni = Counter(hyp_toks)
    matches1 = sum(min(count, ref_uni[tok]) for tok, count in hyp_uni.items())
    p1 = matches1 / len(hyp_toks)

    ref_bi = Counter(zip(ref_toks, ref_toks[1:]))
    hyp_bi = Counter(zip(hyp_toks, hyp_toks[1:]))
    matches2 = sum(min(count, ref_bi[gram]) for gram, count in hyp_bi.items())
    p2_smoothed = (matches2 + BIGRAM_SMOOTHING) / (len(hyp_toks) - 1 + BIGRAM_SMOOTHING)

    bp = 1.0
    if brevity_penalty and len(hyp_toks) < len(ref_toks):
        bp = math.exp(1.0 - len(ref_toks) / len(hyp_toks))

    if p1 == 0.0:
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(UNIGRAM_WEIGHT * math.log(p1) + BIGRAM_WEIGHT * math.log(p2_smoothed))
    return AdjustedBleu(score=score, p1=p1, p2_smoothed=p2_smoothed, brevity_penalty=bp)


def is_hallucination(hyp: str | Sequence[str], ref: str | Sequence[str],
                     threshold: float = DEFAULT_THRESHOLD, *,
                     brevity_penalty: bool = True) -> bool:
    """True when the lowercased adjusted BLEU of hyp against ref is below threshold."""
    return adjusted_bleu(hyp, ref, lowercase=True, brevity_penalty=brevity_penalty).score < threshold


def score_sentences(hyps: Sequence[str | Sequence[str]], refs: Sequence[str | Sequence[str]], *,
                    lowercase: bool = True, brevity_penalty: bool = True) -> list[float]:
    """Adjusted BLEU per sentence. Lengths must match."""
    if len(hyps) != len(refs):
        raise DataError(f"length mismatch: {len(hyps)} hypotheses vs {len(refs)} references")
    return [
        adjusted_bleu(h, r, lowercase=lowercase, brevity_penalty=brevity_penalty).score
        for h, r in zip(hyps, refs)
    ]


def single_system_report(hyps: Sequence[str | Sequence[str]], refs: Sequence[str | Sequence[str]],
                         threshold: float = DEFAULT_THRESHOLD, *,
                         lowercase: bool = True, brevity_penalty: bool = True,
                         bin_width: float = DEFAULT_BIN_WIDTH) -> HallucinationReport:
    """Score one system and flag its hallucinations."""
    scores = score_sentences(hyps, refs, lowercase=lowercase, brevity_penalty=brevity_penalty)
    return HallucinationReport(
        threshold=threshold,
        margin=None,
        scores_a=scores,
        scores_b=None,
        flagged_a=[s < threshold for s in scores],
        flagged_b=None,
        marks=None,
        a_only=None,
        b_only=None,
        hist_a=score_histogram(scores, bin_width),
        hist_b=None,
    )


def disjoint_hallucinations(sys_a: Sequence[str | Sequence[str]], sys_b: Sequence[str | Sequence[str]],
                            refs: Sequence[str | Sequence[str]],
                            threshold: float = DEFAULT_THRESHOLD, margin: float = DEFAULT_MARGIN, *,
                            lowercase: bool = True, brevity_penalty: bool = True,
                            bin_width: float = DEFAULT_BIN_WIDTH) -> HallucinationReport:
    """Compare two systems sentence by sentence against shared references.

    A sentence is marked "A" when system A hallucinates it and system B
    scores at least ``margin`` points higher, "B" symmetrically, otherwise
    "-". Sentences hallucinated by both or neither are never marked.
    """
    if not (len(sys_a) == len(sys_b) == len(refs)):
        raise DataError(
            f"length mismatch: {len(sys_a)} vs {len(sys_b)} hypotheses for {len(refs)} references"
        )
    scores_a = score_sentences(sys_a, refs, lowercase=lowercase, brevity_penalty=brevity_penalty)
    scores_b = score_sentences(sys_b, refs, lowercase=lowercase, brevity_penalty=brevity_penalty)
    flagged_a = [s < threshold for s in scores_a]
    flagged_b = [s < threshold for s in scores_b]
    marks = []
    for sa, sb, fa, fb in zip(scores_a, scores_b, flagged_a, flagged_b):
        if fa and not fb and sb >= sa + margin:
            marks.append("A")
        elif fb and not fa and sa >= sb + margin:
            marks.append("B")
        else:
            marks.append("-")
    return HallucinationReport(
        threshold=threshold,
        margin=margin,
        scores_a=scores_a,
        scores_b=scores_b,
        flagged_a=flagged_a,
        flagged_b=flagged_b,
        marks=marks,
        a_only=marks.count("A"),
        b_only=marks.count("B"),
        hist_a=score_histogram(scores_a, bin_width),
        hist_b=score_histogram(scores_b, bin_width),
    )


def score_histogram(scores: Iterable[float], bin_width: float = DEFAULT_BIN_WIDTH) -> Histogram:
    """Bin scores over [0, 100] and normalize frequencies to sum to 1.

    The last bin is closed on the right so a score of exactly 100 lands in it.
    Scores outside [0, 100] raise DataError; an empty input raises DataError.
    """
    if bin_width <= 0:
        raise ConfigError(f"bin width must be positive, got {bin_width}")
    values = list(scores)
    if not values:
        raise DataError("cannot build a histogram from no scores")
    n_bins = math.ceil(100.0 / bin_width)
    counts = [0] * n_bins
    for s in values:
        if not 0.0 <= s <= 100.0:
            raise DataError(f"score {s} outside [0, 100]")
        counts[min(int(s // bin_width), n_bins - 1)] += 1
    edges = tuple(min(i * bin_width, 100.0) for i in range(n_bins)) + (100.0,)
    total = len(values)
    freqs = tuple(c / total for c in counts)
    return Histogram(edges=edges, freqs=freqs)
