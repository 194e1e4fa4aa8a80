/**
 * Node bindings for the mtaug toolkit.
 *
 * Everything delegates to the `mtaug` command line program (override the
 * binary with the MTAUG_BIN environment variable); nothing is reimplemented
 * here. Single-pair calls are marshalled through temp files in the formats
 * the CLI consumes, and scores come back through the full-precision TSV the
 * `hallucinate` subcommand emits, so numbers are bit-identical to the core.
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export type TaskKind =
  | "main"
  | "swap"
  | "token"
  | "source"
  | "reverse"
  | "mono"
  | "replace";

export interface BoundPair {
  src: string[];
  tgt: string[];
}

export interface TransformOptions {
  /** Ratio of affected target tokens; required by swap, token and replace. */
  alpha?: number;
  /** Seed for the stochastic kinds. Same seed, same output. */
  seed?: number;
  /** One alignment line in "i-j" format: source-to-target for mono, one-to-one for replace. */
  alignment?: string;
  /** Lexicon TSV path for replace. */
  lexiconPath?: string;
  /** Mask symbol for token. */
  unk?: string;
}

export interface BleuOptions {
  /** Lowercase both sides before scoring. Off by default, matching the core scorer. */
  lowercase?: boolean;
  /** Apply the brevity penalty. On by default. */
  brevityPenalty?: boolean;
}

export interface TaskRequest {
  kind: TaskKind;
  alpha?: number;
}

export interface AugmentRequest {
  src: string;
  tgt: string;
  tasks: TaskRequest[];
  outPrefix: string;
  seed?: number;
  minLen?: number;
  maxLen?: number;
  alignS2t?: string;
  alignT2s?: string;
  alignO2o?: string;
  lexiconPath?: string;
  unk?: string;
  tagFormat?: string;
  noTagMain?: boolean;
  noTags?: boolean;
  concat?: boolean;
  threads?: number;
}

export interface TaskSummary {
  lines: number;
  src_tokens: number;
  tgt_tokens: number;
  src_file: string;
  tgt_file: string;
}

export interface AugmentManifest {
  config: Record<string, unknown>;
  input_lines: number;
  kept_lines: number;
  filtered_lines: number;
  tasks: Record<string, TaskSummary>;
  checksums: Record<string, string>;
  warnings: Record<string, number>;
}

const BIN = process.env.MTAUG_BIN ?? "mtaug";

function runCli(args: string[]): string {
  try {
    return execFileSync(BIN, args, {
      encoding: "utf-8",
      stdio: ["ignore", "pipe", "pipe"],
    });
  } catch (err) {
    throw toCliError(err);
  }
}

function toCliError(err: unknown): Error {
  const e = err as { stderr?: string | Buffer; message?: string; code?: string };
  if (e.code === "ENOENT") {
    return new Error(`mtaug binary not found (looked for ${JSON.stringify(BIN)}; set MTAUG_BIN)`);
  }
  const stderr = e.stderr ? e.stderr.toString() : "";
  const lines = stderr.split("\n").filter((l) => l.length > 0);
  const reported = lines.reverse().find((l) => l.startsWith("error: "));
  if (reported !== undefined) {
    return new Error(reported.slice("error: ".length));
  }
  return new Error(lines[0] ?? e.message ?? "mtaug invocation failed");
}

function checkTokens(tokens: string[], side: string): void {
  for (const tok of tokens) {
    if (tok.length === 0 || /\s/.test(tok)) {
      throw new Error(`${side} token ${JSON.stringify(tok)} is empty or contains whitespace`);
    }
  }
}

function splitLine(content: string): string[] {
  const line = content.split("\n")[0];
  return line.length > 0 ? line.split(" ") : [];
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "mtaug-bind-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

/** Apply one transform to one tokenized pair, untagged, exactly as the core does. */
export function transform(kind: TaskKind, pair: BoundPair, opts: TransformOptions = {}): BoundPair {
  checkTokens(pair.src, "source");
  checkTokens(pair.tgt, "target");
  return withTempDir((dir) => {
    const srcPath = join(dir, "in.src");
    const tgtPath = join(dir, "in.tgt");
    writeFileSync(srcPath, pair.src.join(" ") + "\n");
    writeFileSync(tgtPath, pair.tgt.join(" ") + "\n");
    const maxLen = Math.max(pair.src.length, pair.tgt.length, 1);
    const args = [
      "augment",
      "--src", srcPath,
      "--tgt", tgtPath,
      "--tasks", kind === "main" ? "main" : `main,${kind}`,
      "--no-tags",
      "--min-len", "1",
      "--max-len", String(maxLen),
      "--seed", String(opts.seed ?? 0),
      "--out-prefix", join(dir, "out"),
    ];
    if (opts.alpha !== undefined) {
      args.push("--alpha", `${kind}=${opts.alpha}`);
    }
    if (opts.unk !== undefined) {
      args.push("--unk", opts.unk);
    }
    if (opts.alignment !== undefined) {
      const alignPath = join(dir, "in.align");
      writeFileSync(alignPath, opts.alignment + "\n");
      args.push(kind === "replace" ? "--align-o2o" : "--align-s2t", alignPath);
    }
    if (opts.lexiconPath !== undefined) {
      args.push("--lexicon", opts.lexiconPath);
    }
    runCli(args);
    return {
      src: splitLine(readFileSync(join(dir, `out.${kind}.src`), "utf-8")),
      tgt: splitLine(readFileSync(join(dir, `out.${kind}.tgt`), "utf-8")),
    };
  });
}

/** Adjusted sentence BLEU of one whitespace-tokenized hypothesis against one reference. */
export function adjustedBleu(hyp: string, ref: string, opts: BleuOptions = {}): number {
  if (hyp.includes("\n") || ref.includes("\n")) {
    throw new Error("hyp and ref must be single sentences without newlines");
  }
  return withTempDir((dir) => {
    const refPath = join(dir, "ref.txt");
    const hypPath = join(dir, "hyp.txt");
    writeFileSync(refPath, ref + "\n");
    writeFileSync(hypPath, hyp + "\n");
    const args = ["hallucinate", "--ref", refPath, "--hyp-a", hypPath];
    if (!(opts.lowercase ?? false)) {
      args.push("--no-lowercase");
    }
    if (!(opts.brevityPenalty ?? true)) {
      args.push("--no-bp");
    }
    const stdout = runCli(args);
    const columns = stdout.split("\n")[0].split("\t");
    if (columns.length < 2) {
      throw new Error(`unexpected scorer output: ${JSON.stringify(stdout)}`);
    }
    return Number.parseFloat(columns[1]);
  });
}

/** Run a full augmentation over corpus files and return the parsed manifest. */
export function augmentCorpus(req: AugmentRequest): AugmentManifest {
  if (req.tasks.length === 0) {
    throw new Error("at least the main task is required");
  }
  const args = [
    "augment",
    "--src", req.src,
    "--tgt", req.tgt,
    "--tasks", req.tasks.map((t) => t.kind).join(","),
    "--out-prefix", req.outPrefix,
  ];
  for (const task of req.tasks) {
    if (task.alpha !== undefined) {
      args.push("--alpha", `${task.kind}=${task.alpha}`);
    }
  }
  const flag = (name: string, value: string | number | undefined) => {
    if (value !== undefined) {
      args.push(name, String(value));
    }
  };
  flag("--seed", req.seed);
  flag("--min-len", req.minLen);
  flag("--max-len", req.maxLen);
  flag("--align-s2t", req.alignS2t);
  flag("--align-t2s", req.alignT2s);
  flag("--align-o2o", req.alignO2o);
  flag("--lexicon", req.lexiconPath);
  flag("--unk", req.unk);
  flag("--tag-format", req.tagFormat);
  flag("--threads", req.threads);
  if (req.noTagMain) {
    args.push("--no-tag-main");
  }
  if (req.noTags) {
    args.push("--no-tags");
  }
  if (req.concat) {
    args.push("--concat");
  }
  runCli(args);
  const manifest = readFileSync(`${req.outPrefix}.manifest`, "utf-8");
  return JSON.parse(manifest) as AugmentManifest;
}
