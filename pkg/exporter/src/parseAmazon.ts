/**
 * Parser for the co-purchase archives (photo / computers): an `.npz`
 * holding the adjacency and attribute matrices in CSR form plus a label
 * vector.
 */

import { readNpz } from "./npz";
import { RawGraph } from "./types";

const REQUIRED = [
  "adj_data",
  "adj_indices",
  "adj_indptr",
  "adj_shape",
  "attr_data",
  "attr_indices",
  "attr_indptr",
  "attr_shape",
  "labels",
];

export function parseAmazonDataset(name: string, npzPath: string): RawGraph {
  const arrays = readNpz(npzPath, REQUIRED);
  const [n, nCols] = arrays.adj_shape.data;
  if (n !== nCols) {
    throw new Error(`${npzPath}: adjacency is ${n}x${nCols}, expected square`);
  }
  const numNodes = n;
  const numFeatures = arrays.attr_shape.data[1];

  const edges: Array<[number, number]> = [];
  const adjIndptr = arrays.adj_indptr.data;
  const adjIndices = arrays.adj_indices.data;
  for (let row = 0; row < numNodes; row++) {
    for (let p = adjIndptr[row]; p < adjIndptr[row + 1]; p++) {
      edges.push([row, adjIndices[p]]);
    }
  }

  const features: Array<[number, number, number]> = [];
  const attrIndptr = arrays.attr_indptr.data;
  const attrIndices = arrays.attr_indices.data;
  const attrData = arrays.attr_data.data;
  for (let row = 0; row < numNodes; row++) {
    for (let p = attrIndptr[row]; p < attrIndptr[row + 1]; p++) {
      if (attrData[p] !== 0) {
        features.push([row, attrIndices[p], attrData[p]]);
      }
    }
  }

  const labels = Array.from(arrays.labels.data, (v) => {
    if (!Number.isInteger(v) || v < 0) {
      throw new Error(`${npzPath}: non-integer label ${v}`);
    }
    return v;
  });
  if (labels.length !== numNodes) {
    throw new Error(
      `${npzPath}: ${labels.length} labels for ${numNodes} nodes`
    );
  }

  return {
    name,
    numNodes,
    numFeatures,
    numClasses: Math.max(...labels) + 1,
    edges,
    features,
    labels,
  };
}
