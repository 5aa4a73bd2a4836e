/**
 * Independent validation of an exported dataset directory.
 *
 * This deliberately re-reads the emitted text files with its own parsing
 * code (shared with nothing in exporter.ts) so a bug in the writer cannot
 * hide from the checker. Checks: meta counts, index ranges, canonical
 * "u < v" edge order without duplicates, no self-loops, finite feature
 * values without duplicate cells, every node labeled exactly once, and
 * manifest checksums when a manifest is present.
 */

import * as crypto from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";

import { VerifyIssue, VerifyReport } from "./types";

export function verifyDataset(dir: string): VerifyReport {
  const issues: VerifyIssue[] = [];
  const add = (file: string, message: string, line?: number) =>
    issues.push({ file, line, message });

  const metaPath = path.join(dir, "meta.json");
  if (!fs.existsSync(metaPath)) {
    add("meta.json", "missing file");
    return { ok: false, issues };
  }
  let meta: { num_nodes: number; num_features: number; num_classes: number };
  try {
    meta = JSON.parse(fs.readFileSync(metaPath, "utf8"));
  } catch (err) {
    add("meta.json", `invalid JSON: ${err}`);
    return { ok: false, issues };
  }
  const n = meta.num_nodes;
  const f = meta.num_features;
  const c = meta.num_classes;
  if (![n, f, c].every((x) => Number.isInteger(x) && x >= 0)) {
    add("meta.json", `bad counts: nodes=${n} features=${f} classes=${c}`);
    return { ok: false, issues };
  }

  checkEdges(dir, n, add);
  checkFeatures(dir, n, f, add);
  checkLabels(dir, n, c, add);
  checkManifest(dir, add);

  return { ok: issues.length === 0, issues };
}

function readLines(dir: string, name: string, add: Function): string[] | null {
  const full = path.join(dir, name);
  if (!fs.existsSync(full)) {
    add(name, "missing file");
    return null;
  }
  return fs
    .readFileSync(full, "utf8")
    .split("\n")
    .filter((line) => line.length > 0);
}

function checkEdges(dir: string, n: number, add: Function): void {
  const lines = readLines(dir, "edges.tsv", add);
  if (lines === null) {
    return;
  }
  const seen = new Set<number>();
  lines.forEach((line, i) => {
    const parts = line.split("\t");
    if (parts.length !== 2) {
      add("edges.tsv", `expected two fields, got ${parts.length}`, i + 1);
      return;
    }
    const u = Number(parts[0]);
    const v = Number(parts[1]);
    if (!Number.isInteger(u) || !Number.isInteger(v)) {
      add("edges.tsv", `non-integer endpoints (${parts[0]}, ${parts[1]})`, i + 1);
      return;
    }
    if (u < 0 || u >= n || v < 0 || v >= n) {
      add("edges.tsv", `edge (${u}, ${v}) out of range [0, ${n})`, i + 1);
      return;
    }
    if (u === v) {
      add("edges.tsv", `self-loop at node ${u}`, i + 1);
      return;
    }
    if (u > v) {
      add("edges.tsv", `pair (${u}, ${v}) breaks canonical u < v order`, i + 1);
      return;
    }
    const key = u * n + v;
    if (seen.has(key)) {
      add("edges.tsv", `duplicate undirected pair (${u}, ${v})`, i + 1);
      return;
    }
    seen.add(key);
  });
}

function checkFeatures(dir: string, n: number, f: number, add: Function): void {
  const lines = readLines(dir, "features.tsv", add);
  if (lines === null) {
    return;
  }
  const seen = new Set<string>();
  lines.forEach((line, i) => {
    const parts = line.split("\t");
    if (parts.length !== 3) {
      add("features.tsv", `expected three fields, got ${parts.length}`, i + 1);
      return;
    }
    const node = Number(parts[0]);
    const feat = Number(parts[1]);
    const value = Number(parts[2]);
    if (!Number.isInteger(node) || node < 0 || node >= n) {
      add("features.tsv", `node ${parts[0]} out of range`, i + 1);
    }
    if (!Number.isInteger(feat) || feat < 0 || feat >= f) {
      add("features.tsv", `feature ${parts[1]} out of range`, i + 1);
    }
    if (!Number.isFinite(value)) {
      add("features.tsv", `non-finite value ${parts[2]}`, i + 1);
    }
    const key = `${node}:${feat}`;
    if (seen.has(key)) {
      add("features.tsv", `duplicate cell (${node}, ${feat})`, i + 1);
    }
    seen.add(key);
  });
}

function checkLabels(dir: string, n: number, c: number, add: Function): void {
  const lines = readLines(dir, "labels.tsv", add);
  if (lines === null) {
    return;
  }
  const covered = new Array<boolean>(n).fill(false);
  lines.forEach((line, i) => {
    const parts = line.split("\t");
    if (parts.length !== 2) {
      add("labels.tsv", `expected two fields, got ${parts.length}`, i + 1);
      return;
    }
    const node = Number(parts[0]);
    const label = Number(parts[1]);
    if (!Number.isInteger(node) || node < 0 || node >= n) {
      add("labels.tsv", `node ${parts[0]} out of range`, i + 1);
      return;
    }
    if (covered[node]) {
      add("labels.tsv", `node ${node} labeled twice`, i + 1);
    }
    covered[node] = true;
    if (!Number.isInteger(label) || label < 0 || label >= c) {
      add("labels.tsv", `label ${parts[1]} out of range [0, ${c})`, i + 1);
    }
  });
  const missing = covered
    .map((ok, node) => (ok ? -1 : node))
    .filter((node) => node >= 0);
  if (missing.length > 0) {
    add("labels.tsv", `missing labels for nodes ${missing.slice(0, 10).join(", ")}`);
  }
}

function checkManifest(dir: string, add: Function): void {
  const manifestPath = path.join(dir, "manifest.json");
  if (!fs.existsSync(manifestPath)) {
    return; // optional: hand-built fixtures ship without one
  }
  let manifest: { checksums?: Record<string, string> };
  try {
    manifest = JSON.parse(fs.readFileSync(manifestPath, "utf8"));
  } catch (err) {
    add("manifest.json", `invalid JSON: ${err}`);
    return;
  }
  for (const [name, expected] of Object.entries(manifest.checksums ?? {})) {
    const full = path.join(dir, name);
    if (!fs.existsSync(full)) {
      add("manifest.json", `checksummed file ${name} is missing`);
      continue;
    }
    const actual = crypto
      .createHash("sha256")
      .update(fs.readFileSync(full))
      .digest("hex");
    if (actual !== expected) {
      add(name, `checksum mismatch: expected ${expected}, got ${actual}`);
    }
  }
}
