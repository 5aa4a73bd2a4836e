/**
 * Normalization and emission of the portable dataset directory:
 *
 *   meta.json      counts and name
 *   edges.tsv      undirected edges, canonical "u < v" order, sorted
 *   features.tsv   sparse triplets sorted by (node, feature)
 *   labels.tsv     one label per node
 *   manifest.json  source, counts, warnings, sha256 per emitted file
 *
 * Output is fully deterministic so re-exports are byte-identical.
 */

import * as crypto from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";

import { parseAmazonDataset } from "./parseAmazon";
import { parseContentDataset } from "./parseContent";
import { parsePubmedDataset } from "./parsePubmed";
import { ExportManifest, ExportWarnings, RawGraph } from "./types";

export const DATASET_NAMES = ["cora", "citeseer", "pubmed", "photo", "computers"] as const;
export type DatasetName = (typeof DATASET_NAMES)[number];

/** Format a feature value with six significant digits (round-trip safe for
 * the 0/1 and tf-idf style features these distributions carry). */
export function formatValue(v: number): string {
  if (Number.isInteger(v) && Math.abs(v) < 1e15) {
    return String(v);
  }
  return String(Number(v.toPrecision(6)));
}

interface NormalizedGraph {
  graph: RawGraph;
  undirected: Array<[number, number]>;
  warnings: ExportWarnings;
}

/** Symmetrize, deduplicate and strip self-loops from the raw edge list. */
export function normalizeEdges(graph: RawGraph, danglingEdges = 0): NormalizedGraph {
  const seen = new Set<number>();
  const undirected: Array<[number, number]> = [];
  let selfLoops = 0;
  let duplicates = 0;
  for (const [a, b] of graph.edges) {
    if (a < 0 || a >= graph.numNodes || b < 0 || b >= graph.numNodes) {
      throw new Error(`edge (${a}, ${b}) out of range [0, ${graph.numNodes})`);
    }
    if (a === b) {
      selfLoops += 1;
      continue;
    }
    const u = Math.min(a, b);
    const v = Math.max(a, b);
    const key = u * graph.numNodes + v;
    if (seen.has(key)) {
      duplicates += 1;
      continue;
    }
    seen.add(key);
    undirected.push([u, v]);
  }
  undirected.sort((x, y) => x[0] - y[0] || x[1] - y[1]);
  return {
    graph,
    undirected,
    warnings: { selfLoops, duplicateEdges: duplicates, danglingEdges },
  };
}

function sha256(content: string): string {
  return crypto.createHash("sha256").update(content).digest("hex");
}

export function writeDataset(
  normalized: NormalizedGraph,
  source: string,
  outDir: string
): ExportManifest {
  const { graph, undirected, warnings } = normalized;
  fs.mkdirSync(outDir, { recursive: true });

  const meta =
    JSON.stringify(
      {
        num_nodes: graph.numNodes,
        num_features: graph.numFeatures,
        num_classes: graph.numClasses,
        name: graph.name,
      },
      null,
      2
    ) + "\n";

  const edgeLines = undirected.map(([u, v]) => `${u}\t${v}`);
  const edges = edgeLines.join("\n") + (edgeLines.length ? "\n" : "");

  const triplets = [...graph.features].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  for (const [node, feat] of triplets) {
    if (node < 0 || node >= graph.numNodes) {
      throw new Error(`feature row ${node} out of range`);
    }
    if (feat < 0 || feat >= graph.numFeatures) {
      throw new Error(`feature column ${feat} out of range`);
    }
  }
  const featureLines = triplets.map(
    ([node, feat, value]) => `${node}\t${feat}\t${formatValue(value)}`
  );
  const features = featureLines.join("\n") + (featureLines.length ? "\n" : "");

  if (graph.labels.length !== graph.numNodes) {
    throw new Error(`${graph.labels.length} labels for ${graph.numNodes} nodes`);
  }
  graph.labels.forEach((label, node) => {
    if (!Number.isInteger(label) || label < 0 || label >= graph.numClasses) {
      throw new Error(`label ${label} of node ${node} out of range`);
    }
  });
  const labels =
    graph.labels.map((label, node) => `${node}\t${label}`).join("\n") + "\n";

  const files: Record<string, string> = {
    "meta.json": meta,
    "edges.tsv": edges,
    "features.tsv": features,
    "labels.tsv": labels,
  };
  const checksums: Record<string, string> = {};
  for (const [name, content] of Object.entries(files)) {
    fs.writeFileSync(path.join(outDir, name), content);
    checksums[name] = sha256(content);
  }

  const manifest: ExportManifest = {
    dataset: graph.name,
    source,
    outDir,
    counts: {
      nodes: graph.numNodes,
      features: graph.numFeatures,
      classes: graph.numClasses,
      undirectedEdges: undirected.length,
    },
    warnings,
    checksums,
  };
  fs.writeFileSync(
    path.join(outDir, "manifest.json"),
    JSON.stringify(manifest, null, 2) + "\n"
  );
  return manifest;
}

/** Locate the source files for a named dataset under a directory (or accept
 * a direct file path for the npz archives). */
export function exportDataset(
  name: DatasetName,
  source: string,
  outDir: string
): ExportManifest {
  let parsed: { graph: RawGraph; danglingEdges: number };
  if (name === "cora" || name === "citeseer") {
    const content = resolveSource(source, [`${name}.content`]);
    const cites = resolveSource(source, [`${name}.cites`]);
    parsed = parseContentDataset(name, content, cites);
  } else if (name === "pubmed") {
    const node = resolveSource(source, [
      "Pubmed-Diabetes.NODE.paper.tab",
      "pubmed.node.tab",
    ]);
    const cites = resolveSource(source, [
      "Pubmed-Diabetes.DIRECTED.cites.tab",
      "pubmed.cites.tab",
    ]);
    parsed = parsePubmedDataset(name, node, cites);
  } else if (name === "photo" || name === "computers") {
    const npz = source.endsWith(".npz")
      ? source
      : resolveSource(source, [
          `amazon_electronics_${name}.npz`,
          `${name}.npz`,
        ]);
    parsed = { graph: parseAmazonDataset(name, npz), danglingEdges: 0 };
  } else {
    throw new Error(`unknown dataset name: ${name}`);
  }
  const normalized = normalizeEdges(parsed.graph, parsed.danglingEdges);
  return writeDataset(normalized, source, outDir);
}

function resolveSource(source: string, candidates: string[]): string {
  if (fs.existsSync(source) && fs.statSync(source).isFile()) {
    return source;
  }
  for (const candidate of candidates) {
    const full = path.join(source, candidate);
    if (fs.existsSync(full)) {
      return full;
    }
  }
  throw new Error(
    `none of [${candidates.join(", ")}] found under ${source}`
  );
}
