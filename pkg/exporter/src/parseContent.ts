/**
 * Parser for the classic citation-network text layout: a `.content` file
 * with one "paperId <tab> f1 .. fF <tab> classLabel" row per node and a
 * `.cites` file with one "cited <tab> citing" pair per line.
 *
 * Node indices follow content-file order; class labels are sorted
 * lexicographically before being numbered, so the mapping is deterministic.
 * Citations whose endpoints are missing from the content table are counted
 * as dangling and skipped (the citeseer distribution is known to contain a
 * few of these).
 */

import * as fs from "node:fs";

import { RawGraph } from "./types";

export interface ContentParseResult {
  graph: RawGraph;
  danglingEdges: number;
}

export function parseContentDataset(
  name: string,
  contentPath: string,
  citesPath: string
): ContentParseResult {
  const contentLines = readLines(contentPath);
  if (contentLines.length === 0) {
    throw new Error(`${contentPath}: empty content file`);
  }

  const idToIndex = new Map<string, number>();
  const rows: Array<{ features: number[]; label: string }> = [];
  let numFeatures = -1;

  contentLines.forEach((line, i) => {
    const parts = line.split(/\s+/);
    if (parts.length < 3) {
      throw new Error(`${contentPath}:${i + 1}: expected id, features, label`);
    }
    const id = parts[0];
    const label = parts[parts.length - 1];
    const featureFields = parts.slice(1, -1);
    if (numFeatures === -1) {
      numFeatures = featureFields.length;
    } else if (featureFields.length !== numFeatures) {
      throw new Error(
        `${contentPath}:${i + 1}: ${featureFields.length} features, expected ${numFeatures}`
      );
    }
    if (idToIndex.has(id)) {
      throw new Error(`${contentPath}:${i + 1}: duplicate node id ${id}`);
    }
    idToIndex.set(id, rows.length);
    rows.push({ features: featureFields.map(parseFeature(contentPath, i)), label });
  });

  const classNames = [...new Set(rows.map((r) => r.label))].sort();
  const classIndex = new Map(classNames.map((c, i) => [c, i]));

  const features: Array<[number, number, number]> = [];
  rows.forEach((row, node) => {
    row.features.forEach((value, j) => {
      if (value !== 0) {
        features.push([node, j, value]);
      }
    });
  });

  const edges: Array<[number, number]> = [];
  let dangling = 0;
  readLines(citesPath).forEach((line, i) => {
    const parts = line.split(/\s+/);
    if (parts.length !== 2) {
      throw new Error(`${citesPath}:${i + 1}: expected "cited citing"`);
    }
    const a = idToIndex.get(parts[0]);
    const b = idToIndex.get(parts[1]);
    if (a === undefined || b === undefined) {
      dangling += 1;
      return;
    }
    edges.push([a, b]);
  });

  return {
    graph: {
      name,
      numNodes: rows.length,
      numFeatures,
      numClasses: classNames.length,
      edges,
      features,
      labels: rows.map((r) => classIndex.get(r.label) as number),
    },
    danglingEdges: dangling,
  };
}

function parseFeature(path: string, lineIdx: number) {
  return (field: string): number => {
    const value = Number(field);
    if (!Number.isFinite(value)) {
      throw new Error(`${path}:${lineIdx + 1}: bad feature value ${field}`);
    }
    return value;
  };
}

function readLines(path: string): string[] {
  if (!fs.existsSync(path)) {
    throw new Error(`missing file: ${path}`);
  }
  return fs
    .readFileSync(path, "utf8")
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0);
}
