/**
 * Parser for the diabetes citation-network distribution: a NODE table with
 * two header lines (the second declares the attribute vocabulary) followed
 * by "paperId <tab> label=K <tab> word=value ... <tab> summary=..." rows,
 * and a DIRECTED cites table with rows "id <tab> paper:SRC <tab> | <tab>
 * paper:DST" after its own two header lines.
 */

import * as fs from "node:fs";

import { RawGraph } from "./types";

export interface PubmedParseResult {
  graph: RawGraph;
  danglingEdges: number;
}

export function parsePubmedDataset(
  name: string,
  nodePath: string,
  citesPath: string
): PubmedParseResult {
  const nodeLines = rawLines(nodePath);
  if (nodeLines.length < 3) {
    throw new Error(`${nodePath}: expected two header lines plus data`);
  }
  const vocab = nodeLines[1]
    .split("\t")
    .map((field) => field.trim())
    .filter((field) => field.startsWith("numeric:"))
    .map((field) => field.split(":")[1]);
  if (vocab.length === 0) {
    throw new Error(`${nodePath}: no attribute vocabulary in header`);
  }
  const wordIndex = new Map(vocab.map((w, i) => [w, i]));

  const idToIndex = new Map<string, number>();
  const labels: number[] = [];
  const features: Array<[number, number, number]> = [];
  const labelValues = new Set<number>();

  nodeLines.slice(2).forEach((line, i) => {
    const parts = line.split("\t");
    if (parts.length < 2) {
      throw new Error(`${nodePath}:${i + 3}: malformed row`);
    }
    const id = parts[0];
    if (idToIndex.has(id)) {
      throw new Error(`${nodePath}:${i + 3}: duplicate node id ${id}`);
    }
    const node = labels.length;
    idToIndex.set(id, node);

    let label: number | null = null;
    for (const field of parts.slice(1)) {
      const eq = field.indexOf("=");
      if (eq < 0) {
        continue;
      }
      const key = field.slice(0, eq);
      const value = field.slice(eq + 1);
      if (key === "label") {
        label = Number(value) - 1; // distribution numbers classes from 1
      } else if (wordIndex.has(key)) {
        const v = Number(value);
        if (!Number.isFinite(v)) {
          throw new Error(`${nodePath}:${i + 3}: bad value for ${key}`);
        }
        if (v !== 0) {
          features.push([node, wordIndex.get(key) as number, v]);
        }
      }
    }
    if (label === null || !Number.isInteger(label) || label < 0) {
      throw new Error(`${nodePath}:${i + 3}: missing or bad label`);
    }
    labels.push(label);
    labelValues.add(label);
  });

  const edges: Array<[number, number]> = [];
  let dangling = 0;
  rawLines(citesPath)
    .slice(2)
    .forEach((line, i) => {
      const match = line.match(/paper:(\S+)\s*\|\s*paper:(\S+)/);
      if (!match) {
        throw new Error(`${citesPath}:${i + 3}: malformed citation row`);
      }
      const a = idToIndex.get(match[1]);
      const b = idToIndex.get(match[2]);
      if (a === undefined || b === undefined) {
        dangling += 1;
        return;
      }
      edges.push([a, b]);
    });

  return {
    graph: {
      name,
      numNodes: labels.length,
      numFeatures: vocab.length,
      numClasses: Math.max(...labelValues) + 1,
      edges,
      features,
      labels,
    },
    danglingEdges: dangling,
  };
}

function rawLines(path: string): string[] {
  if (!fs.existsSync(path)) {
    throw new Error(`missing file: ${path}`);
  }
  return fs
    .readFileSync(path, "utf8")
    .split(/\r?\n/)
    .filter((line) => line.length > 0);
}
