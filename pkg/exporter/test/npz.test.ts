import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { readNpz } from "../src/npz";
import { parseAmazonDataset } from "../src/parseAmazon";
import { parsePubmedDataset } from "../src/parsePubmed";

import * as fs from "node:fs";
import * as os from "node:os";

const FIXTURES = path.join(__dirname, "fixtures");

describe("npz reader", () => {
  it.each(["mini_stored.npz", "mini_compressed.npz"])(
    "round-trips arrays from %s",
    (name) => {
      const arrays = readNpz(path.join(FIXTURES, name), [
        "adj_shape",
        "labels",
        "attr_data",
      ]);
      expect(arrays.adj_shape.data).toEqual(new Float64Array([6, 6]));
      expect(Array.from(arrays.labels.data)).toEqual([0, 0, 0, 1, 1, 1]);
      expect(arrays.attr_data.shape).toEqual([10]);
      expect(arrays.attr_data.data[2]).toBeCloseTo(1.0, 12);
    }
  );

  it("errors on a requested missing member", () => {
    expect(() =>
      readNpz(path.join(FIXTURES, "mini_stored.npz"), ["nope"])
    ).toThrow(/missing array nope/);
  });

  it("skips unsupported members when scanning everything", () => {
    const arrays = readNpz(path.join(FIXTURES, "mini_stored.npz"));
    expect("labels" in arrays).toBe(true);
    // class_names is a unicode array the reader does not model
    expect("class_names" in arrays).toBe(false);
  });

  it("rejects non-zip input", () => {
    const junk = path.join(os.tmpdir(), `junk-${Date.now()}.npz`);
    fs.writeFileSync(junk, Buffer.from("definitely not a zip file"));
    expect(() => readNpz(junk)).toThrow(/not a zip/);
    fs.rmSync(junk);
  });
});

describe("amazon parser", () => {
  it("reconstructs edges and sparse features from CSR arrays", () => {
    const graph = parseAmazonDataset(
      "photo",
      path.join(FIXTURES, "mini_stored.npz")
    );
    expect(graph.numNodes).toBe(6);
    expect(graph.numFeatures).toBe(4);
    expect(graph.numClasses).toBe(2);
    expect(graph.edges.length).toBe(14); // directed pairs, both directions
    expect(graph.features).toContainEqual([0, 2, 0.25]);
    expect(graph.features).toContainEqual([3, 3, 1]);
  });
});

describe("pubmed layout parser", () => {
  it("parses the two-header node table and piped citation rows", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "pubmed-"));
    const node = [
      "NODE\tpaper",
      "cat=label:label\tnumeric:w-gene:0.0\tnumeric:w-cell:0.0\tstring:summary:summary",
      "111\tlabel=1\tw-gene=0.5\tsummary=aa",
      "222\tlabel=2\tw-cell=0.25\tsummary=bb",
      "333\tlabel=3\tw-gene=0.125\tw-cell=1.0\tsummary=cc",
    ].join("\n");
    const cites = [
      "DIRECTED\tcites",
      "NO_FEATURES\t",
      "1\tpaper:111\t|\tpaper:222",
      "2\tpaper:222\t|\tpaper:333",
      "3\tpaper:999\t|\tpaper:111",
    ].join("\n");
    fs.writeFileSync(path.join(dir, "Pubmed-Diabetes.NODE.paper.tab"), node + "\n");
    fs.writeFileSync(path.join(dir, "Pubmed-Diabetes.DIRECTED.cites.tab"), cites + "\n");

    const { graph, danglingEdges } = parsePubmedDataset(
      "pubmed",
      path.join(dir, "Pubmed-Diabetes.NODE.paper.tab"),
      path.join(dir, "Pubmed-Diabetes.DIRECTED.cites.tab")
    );
    expect(graph.numNodes).toBe(3);
    expect(graph.numFeatures).toBe(2);
    expect(graph.numClasses).toBe(3);
    expect(graph.labels).toEqual([0, 1, 2]);
    expect(graph.edges).toEqual([
      [0, 1],
      [1, 2],
    ]);
    expect(danglingEdges).toBe(1);
    expect(graph.features).toContainEqual([2, 0, 0.125]);
    fs.rmSync(dir, { recursive: true, force: true });
  });
});
