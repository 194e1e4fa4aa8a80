"""Command-line entry point: mtaug <subcommand>.

Subcommands: augment (build the multi-task corpora), lexicon (extract a
bilingual lexicon), align-intersect (one-to-one alignments from two
directional files), hallucinate (adjusted BLEU audit, optionally with
figures), stats (corpus line and token counts).

Exit status: 0 on success, 1 on configuration errors (including unknown
flags), 2 on data errors. Diagnostics go to standard error; data goes to
files or standard output. Every run echoes its fully resolved configuration
to standard error before processing.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from collections import Counter
from contextlib import ExitStack

from . import __version__
from .align import intersect, parse_alignment_line, write_lexicon_tsv
from .errors import ConfigError, DataError
from .metrics import (
    DEFAULT_BIN_WIDTH,
    DEFAULT_MARGIN,
    DEFAULT_THRESHOLD,
    HallucinationReport,
    disjoint_hallucinations,
    single_system_report,
)
from .pipeline import (
    DEFAULT_MAX_LEN,
    DEFAULT_MIN_LEN,
    AugmentConfig,
    augment_corpus,
    build_lexicon_from_files,
    corpus_stats,
)
from .transform import DEFAULT_TAG_FORMAT, DEFAULT_UNK, TaskSpec, make_task

THREADS_ENV_VAR = "MTAUG_THREADS"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; 2 is reserved for data errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtaug", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("augment", help="apply the configured tasks to a parallel corpus")
    p.add_argument("--src", required=True, help="source-side corpus, one sentence per line")
    p.add_argument("--tgt", required=True, help="target-side corpus, one sentence per line")
    p.add_argument("--tasks", required=True,
                   help="comma-separated task kinds, starting with main (e.g. main,reverse,mono)")
    p.add_argument("--alpha", action="append", metavar="KIND=VALUE",
                   help="ratio for swap, token or replace; repeatable, no default")
    p.add_argument("--seed", type=int, default=0, help="base seed for the stochastic tasks")
    p.add_argument("--min-len", type=int, default=DEFAULT_MIN_LEN,
                   help="drop pairs with fewer tokens on either side")
    p.add_argument("--max-len", type=int, default=DEFAULT_MAX_LEN,
                   help="drop pairs with more tokens on either side")
    p.add_argument("--align-s2t", help="source-to-target alignment file (i-j per source token)")
    p.add_argument("--align-t2s", help="target-to-source alignment file, intersected with --align-s2t")
    p.add_argument("--align-o2o", help="precomputed one-to-one alignment file")
    p.add_argument("--lexicon", help="lexicon TSV for the replace task")
    p.add_argument("--unk", default=DEFAULT_UNK, help="mask symbol for the token task")
    p.add_argument("--tag-format", default=DEFAULT_TAG_FORMAT,
                   help="task tag template; {kind} expands to the task kind")
    p.add_argument("--no-tag-main", action="store_true", help="leave the main task untagged")
    p.add_argument("--no-tags", action="store_true", help="disable task tags entirely")
    p.add_argument("--concat", action="store_true",
                   help="also write all task corpora concatenated in task order")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker count (default: ${THREADS_ENV_VAR} or 1); output does not depend on it")
    p.add_argument("--out-prefix", required=True, help="path prefix for all output files")
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("lexicon", help="extract source-to-target word translations from alignments")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--align-s2t", help="source-to-target alignment file")
    p.add_argument("--align-t2s", help="target-to-source alignment file")
    p.add_argument("--align-o2o", help="precomputed one-to-one alignment file")
    p.add_argument("--out", help="output TSV path (default: standard output)")
    p.set_defaults(func=_cmd_lexicon)

    p = sub.add_parser("align-intersect", help="intersect two directional alignment files")
    p.add_argument("--align-s2t", required=True)
    p.add_argument("--align-t2s", required=True)
    p.add_argument("--out", help="output path (default: standard output)")
    p.set_defaults(func=_cmd_align_intersect)

    p = sub.add_parser("hallucinate", help="score translations and flag hallucinations")
    p.add_argument("--ref", required=True, help="reference corpus")
    p.add_argument("--hyp-a", required=True, help="system A hypotheses")
    p.add_argument("--hyp-b", help="system B hypotheses, enables the two-system comparison")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                   help="scores below this are hallucinations")
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN,
                   help="other system must score at least this much higher to count")
    p.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH,
                   help="histogram bin width over [0, 100]")
    p.add_argument("--no-bp", action="store_true", help="score without the brevity penalty")
    p.add_argument("--no-lowercase", action="store_true", help="score case-sensitively")
    p.add_argument("--out-prefix", help="write <prefix>.scores.tsv and <prefix>.hist.tsv "
                                        "instead of standard output")
    p.add_argument("--figures", action="store_true",
                   help="also render PNG figures (requires --out-prefix)")
    p.set_defaults(func=_cmd_hallucinate)

    p = sub.add_parser("stats", help="line and token counts for corpus files")
    p.add_argument("paths", nargs="+", metavar="FILE")
    p.set_defaults(func=_cmd_stats)

    return parser


def _echo_config(payload: dict) -> None:
    print("config: " + json.dumps(payload, sort_keys=True), file=sys.stderr)


def _threads_from_env() -> int:
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from None


def _build_tasks(args) -> tuple[TaskSpec, ...]:
    kinds = [k.strip() for k in args.tasks.split(",") if k.strip()]
    if not kinds:
        raise ConfigError("at least the main task is required")
    alphas: dict[str, float] = {}
    for item in args.alpha or []:
        kind, sep, raw = item.partition("=")
        if not sep or not kind:
            raise ConfigError(f"--alpha expects KIND=VALUE, got {item!r}")
        try:
            alphas[kind] = float(raw)
        except ValueError:
            raise ConfigError(f"--alpha value for {kind!r} is not a number: {raw!r}") from None
    stray = sorted(set(alphas) - set(kinds))
    if stray:
        raise ConfigError(f"--alpha given for tasks not in --tasks: {', '.join(stray)}")
    tasks = []
    for kind in kinds:
        untagged = args.no_tags or (kind == "main" and args.no_tag_main)
        tasks.append(make_task(
            kind,
            alpha=alphas.get(kind),
            unk=args.unk,
            tag_format=None if untagged else args.tag_format,
        ))
    return tuple(tasks)


def _cmd_augment(args) -> int:
    tasks = _build_tasks(args)
    threads = args.threads if args.threads is not None else _threads_from_env()
    config = AugmentConfig(
        src=args.src,
        tgt=args.tgt,
        tasks=tasks,
        out_prefix=args.out_prefix,
        seed=args.seed,
        min_len=args.min_len,
        max_len=args.max_len,
        align_s2t=args.align_s2t,
        align_t2s=args.align_t2s,
        align_o2o=args.align_o2o,
        lexicon_path=args.lexicon,
        concat=args.concat,
        threads=threads,
    )
    config.validate()
    _echo_config({**config.describe(), "threads": threads})
    manifest = augment_corpus(config)
    print(
        f"kept {manifest.kept_lines} of {manifest.input_lines} pairs "
        f"({manifest.filtered_lines} filtered)",
        file=sys.stderr,
    )
    for kind, info in manifest.tasks.items():
        print(
            f"task {kind}: {info['lines']} lines, "
            f"{info['src_tokens']} source tokens, {info['tgt_tokens']} target tokens",
            file=sys.stderr,
        )
    for name, count in sorted(manifest.warnings.items()):
        print(f"warning {name}: {count}", file=sys.stderr)
    print(f"wrote {args.out_prefix}.manifest", file=sys.stderr)
    return 0


def _cmd_lexicon(args) -> int:
    _echo_config({
        "src": args.src,
        "tgt": args.tgt,
        "align_s2t": args.align_s2t,
        "align_t2s": args.align_t2s,
        "align_o2o": args.align_o2o,
        "out": args.out,
    })
    warnings: Counter[str] = Counter()
    lexicon = build_lexicon_from_files(
        args.src, args.tgt,
        s2t_path=args.align_s2t, t2s_path=args.align_t2s, o2o_path=args.align_o2o,
        warnings=warnings,
    )
    if args.out:
        out_dir = os.path.dirname(args.out)
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as f:
            write_lexicon_tsv(lexicon, f)
    else:
        write_lexicon_tsv(lexicon, sys.stdout)
    for name, count in sorted(warnings.items()):
        print(f"warning {name}: {count}", file=sys.stderr)
    print(f"{len(lexicon)} lexicon entries", file=sys.stderr)
    return 0


def _cmd_align_intersect(args) -> int:
    _echo_config({"align_s2t": args.align_s2t, "align_t2s": args.align_t2s, "out": args.out})
    warnings: Counter[str] = Counter()
    missing = object()
    lines = 0
    with ExitStack() as stack:
        try:
            s2t_f = stack.enter_context(open(args.align_s2t, encoding="utf-8"))
            t2s_f = stack.enter_context(open(args.align_t2s, encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read {exc.filename}: {exc.strerror}") from None
        if args.out:
            out_dir = os.path.dirname(args.out)
            if out_dir:
                os.makedirs(out_dir, exist_ok=True)
            out = stack.enter_context(open(args.out, "w", encoding="utf-8"))
        else:
            out = sys.stdout
        zipped = itertools.zip_longest(s2t_f, t2s_f, fillvalue=missing)
        for line_index, (a, b) in enumerate(zipped):
            if a is missing or b is missing:
                raise DataError(f"alignment files differ in line count near line {line_index + 1}")
            line_no = line_index + 1
            s2t = parse_alignment_line(a.rstrip("\n"), line_no=line_no)
            t2s = parse_alignment_line(b.rstrip("\n"), reversed=True, line_no=line_no)
            out.write(intersect(s2t, t2s, warnings).to_pharaoh() + "\n")
            lines += 1
    for name, count in sorted(warnings.items()):
        print(f"warning {name}: {count}", file=sys.stderr)
    print(f"{lines} lines intersected", file=sys.stderr)
    return 0


def _read_lines(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as f:
            return [line.rstrip("\n") for line in f]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _score_rows(report: HallucinationReport) -> list[str]:
    rows = []
    if report.scores_b is None:
        for i, (score, flagged) in enumerate(zip(report.scores_a, report.flagged_a), start=1):
            rows.append(f"{i}\t{score!r}\t{'H' if flagged else '-'}")
    else:
        per = zip(report.scores_a, report.scores_b, report.marks)
        for i, (sa, sb, mark) in enumerate(per, start=1):
            rows.append(f"{i}\t{sa!r}\t{sb!r}\t{mark}")
    return rows


def _cmd_hallucinate(args) -> int:
    if args.figures and not args.out_prefix:
        raise ConfigError("--figures requires --out-prefix")
    _echo_config({
        "ref": args.ref,
        "hyp_a": args.hyp_a,
        "hyp_b": args.hyp_b,
        "threshold": args.threshold,
        "margin": args.margin,
        "bin_width": args.bin_width,
        "brevity_penalty": not args.no_bp,
        "lowercase": not args.no_lowercase,
        "out_prefix": args.out_prefix,
        "figures": args.figures,
    })
    refs = _read_lines(args.ref)
    hyps_a = _read_lines(args.hyp_a)
    lowercase = not args.no_lowercase
    bp = not args.no_bp
    if args.hyp_b is not None:
        hyps_b = _read_lines(args.hyp_b)
        report = disjoint_hallucinations(
            hyps_a, hyps_b, refs, args.threshold, args.margin,
            lowercase=lowercase, brevity_penalty=bp, bin_width=args.bin_width,
        )
    else:
        report = single_system_report(
            hyps_a, refs, args.threshold,
            lowercase=lowercase, brevity_penalty=bp, bin_width=args.bin_width,
        )

    rows = _score_rows(report)
    if args.out_prefix:
        out_dir = os.path.dirname(args.out_prefix)
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
        with open(f"{args.out_prefix}.scores.tsv", "w", encoding="utf-8") as f:
            f.write("\n".join(rows) + ("\n" if rows else ""))
        with open(f"{args.out_prefix}.hist.tsv", "w", encoding="utf-8") as f:
            hist_a, hist_b = report.hist_a, report.hist_b
            for i, (lo, hi) in enumerate(zip(hist_a.edges, hist_a.edges[1:])):
                cols = [f"{lo:g}", f"{hi:g}", f"{hist_a.freqs[i]!r}"]
                if hist_b is not None:
                    cols.append(f"{hist_b.freqs[i]!r}")
                f.write("\t".join(cols) + "\n")
        if args.figures:
            from . import report as fig  # deferred: pulls in matplotlib

            hists = {"system A": report.hist_a}
            if report.hist_b is not None:
                hists["system B"] = report.hist_b
            fig.save_score_histogram(hists, f"{args.out_prefix}.hist.png")
            if report.scores_b is not None:
                fig.save_disjoint_counts(report.a_only, report.b_only,
                                         f"{args.out_prefix}.disjoint.png")
    else:
        for row in rows:
            print(row)

    n = len(report.scores_a)
    def pct(count: int) -> str:
        return f"{100.0 * count / n:.2f}%" if n else "0.00%"

    print(f"sentences: {n}", file=sys.stderr)
    print(f"threshold: {args.threshold:g}", file=sys.stderr)
    n_a = sum(report.flagged_a)
    print(f"flagged_a: {n_a} ({pct(n_a)})", file=sys.stderr)
    if report.scores_b is not None:
        n_b = sum(report.flagged_b)
        print(f"flagged_b: {n_b} ({pct(n_b)})", file=sys.stderr)
        print(f"margin: {args.margin:g}", file=sys.stderr)
        print(f"a_only: {report.a_only}", file=sys.stderr)
        print(f"b_only: {report.b_only}", file=sys.stderr)
    if args.out_prefix:
        print(f"wrote {args.out_prefix}.scores.tsv", file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    _echo_config({"paths": list(args.paths)})
    for entry in corpus_stats(args.paths):
        print(f"{entry.path}\t{entry.lines}\t{entry.tokens}")
    return 0


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        detail = exc.strerror or str(exc)
        if getattr(exc, "filename", None):
            detail = f"{detail}: {exc.filename}"
        print(f"error: {detail}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
