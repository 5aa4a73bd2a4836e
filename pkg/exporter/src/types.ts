/** Shared shapes for the dataset conversion pipeline. */

/** A graph in memory, node ids already mapped to 0..numNodes-1. */
export interface RawGraph {
  name: string;
  numNodes: number;
  numFeatures: number;
  numClasses: number;
  /** Directed pairs as parsed from the source; normalized later. */
  edges: Array<[number, number]>;
  /** Sparse triplets (node, featureIndex, value), unordered. */
  features: Array<[number, number, number]>;
  /** labels[node] = class index. */
  labels: number[];
}

export interface ExportWarnings {
  selfLoops: number;
  duplicateEdges: number;
  /** Edges referencing node ids absent from the node table. */
  danglingEdges: number;
}

export interface ExportManifest {
  dataset: string;
  source: string;
  outDir: string;
  counts: {
    nodes: number;
    features: number;
    classes: number;
    undirectedEdges: number;
  };
  warnings: ExportWarnings;
  /** sha256 per emitted file, keyed by file name. */
  checksums: Record<string, string>;
}

export interface VerifyIssue {
  file: string;
  line?: number;
  message: string;
}

export interface VerifyReport {
  ok: boolean;
  issues: VerifyIssue[];
}
