#!/usr/bin/env node
/**
 * Command line:
 *   export --name <cora|citeseer|pubmed|photo|computers> --source <dir|file> --out <dir>
 *   verify --dir <dir>
 *
 * Exit codes: 0 ok, 1 verification failed, 2 usage error, 3 conversion error.
 */

import { DATASET_NAMES, DatasetName, exportDataset } from "./exporter";
import { verifyDataset } from "./verify";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`expected --flag value pairs, got "${argv.join(" ")}"`);
    }
    flags.set(key.slice(2), value);
  }
  return flags;
}

function usage(): void {
  console.error(
    "usage:\n" +
      "  export --name <dataset> --source <dir|file> --out <dir>\n" +
      "  verify --dir <dir>\n" +
      `datasets: ${DATASET_NAMES.join(", ")}`
  );
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  let flags: Map<string, string>;
  try {
    flags = parseFlags(rest);
  } catch (err) {
    console.error(String(err));
    usage();
    return 2;
  }

  if (command === "export") {
    const name = flags.get("name");
    const source = flags.get("source");
    const out = flags.get("out");
    if (!name || !source || !out) {
      usage();
      return 2;
    }
    if (!(DATASET_NAMES as readonly string[]).includes(name)) {
      console.error(`unknown dataset: ${name}`);
      usage();
      return 2;
    }
    try {
      const manifest = exportDataset(name as DatasetName, source, out);
      console.log(
        `exported ${manifest.dataset}: ${manifest.counts.nodes} nodes, ` +
          `${manifest.counts.undirectedEdges} undirected edges, ` +
          `${manifest.counts.features} features, ${manifest.counts.classes} classes`
      );
      const w = manifest.warnings;
      if (w.selfLoops || w.duplicateEdges || w.danglingEdges) {
        console.log(
          `warnings: ${w.selfLoops} self-loops, ${w.duplicateEdges} duplicates, ` +
            `${w.danglingEdges} dangling citations`
        );
      }
      const report = verifyDataset(out);
      if (!report.ok) {
        console.error("self-verification failed:");
        for (const issue of report.issues) {
          console.error(formatIssue(issue));
        }
        return 3;
      }
      console.log(`verified: ${out}`);
      return 0;
    } catch (err) {
      console.error(`export failed: ${err instanceof Error ? err.message : err}`);
      return 3;
    }
  }

  if (command === "verify") {
    const dir = flags.get("dir");
    if (!dir) {
      usage();
      return 2;
    }
    const report = verifyDataset(dir);
    if (report.ok) {
      console.log(`ok: ${dir}`);
      return 0;
    }
    for (const issue of report.issues) {
      console.error(formatIssue(issue));
    }
    return 1;
  }

  usage();
  return 2;
}

function formatIssue(issue: { file: string; line?: number; message: string }): string {
  const loc = issue.line === undefined ? issue.file : `${issue.file}:${issue.line}`;
  return `  ${loc}: ${issue.message}`;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
