/**
 * Minimal reader for numpy `.npz` archives (zip of `.npy` members).
 *
 * Supports stored and deflated members, little-endian integer/float dtypes
 * and C-order arrays, which covers archives produced by np.savez and
 * np.savez_compressed. Members with unsupported dtypes (e.g. object
 * arrays) are skipped unless explicitly requested.
 */

import * as fs from "node:fs";
import * as zlib from "node:zlib";

export interface NpyArray {
  shape: number[];
  /** Values widened to float64; integer dtypes are exact below 2^53. */
  data: Float64Array;
}

const EOCD_SIG = 0x06054b50;
const CENTRAL_SIG = 0x02014b50;
const LOCAL_SIG = 0x04034b50;

interface ZipEntry {
  name: string;
  method: number;
  compressedSize: number;
  localHeaderOffset: number;
}

function readCentralDirectory(buf: Buffer): ZipEntry[] {
  let eocd = -1;
  const floor = Math.max(0, buf.length - 65557);
  for (let i = buf.length - 22; i >= floor; i--) {
    if (buf.readUInt32LE(i) === EOCD_SIG) {
      eocd = i;
      break;
    }
  }
  if (eocd < 0) {
    throw new Error("not a zip archive (no end-of-central-directory)");
  }
  const count = buf.readUInt16LE(eocd + 10);
  let offset = buf.readUInt32LE(eocd + 16);
  const entries: ZipEntry[] = [];
  for (let i = 0; i < count; i++) {
    if (buf.readUInt32LE(offset) !== CENTRAL_SIG) {
      throw new Error("corrupt central directory");
    }
    const method = buf.readUInt16LE(offset + 10);
    const compressedSize = buf.readUInt32LE(offset + 20);
    const nameLen = buf.readUInt16LE(offset + 28);
    const extraLen = buf.readUInt16LE(offset + 30);
    const commentLen = buf.readUInt16LE(offset + 32);
    const localHeaderOffset = buf.readUInt32LE(offset + 42);
    const name = buf.toString("utf8", offset + 46, offset + 46 + nameLen);
    entries.push({ name, method, compressedSize, localHeaderOffset });
    offset += 46 + nameLen + extraLen + commentLen;
  }
  return entries;
}

function extractEntry(buf: Buffer, entry: ZipEntry): Buffer {
  const at = entry.localHeaderOffset;
  if (buf.readUInt32LE(at) !== LOCAL_SIG) {
    throw new Error(`corrupt local header for ${entry.name}`);
  }
  const nameLen = buf.readUInt16LE(at + 26);
  const extraLen = buf.readUInt16LE(at + 28);
  const start = at + 30 + nameLen + extraLen;
  const raw = buf.subarray(start, start + entry.compressedSize);
  if (entry.method === 0) {
    return Buffer.from(raw);
  }
  if (entry.method === 8) {
    return zlib.inflateRawSync(raw);
  }
  throw new Error(`unsupported compression method ${entry.method} for ${entry.name}`);
}

const DTYPE_READERS: Record<string, (buf: Buffer, i: number) => number> = {
  "<f8": (b, i) => b.readDoubleLE(i * 8),
  "<f4": (b, i) => b.readFloatLE(i * 4),
  "<i8": (b, i) => Number(b.readBigInt64LE(i * 8)),
  "<i4": (b, i) => b.readInt32LE(i * 4),
  "<i2": (b, i) => b.readInt16LE(i * 2),
  "<u8": (b, i) => Number(b.readBigUInt64LE(i * 8)),
  "<u4": (b, i) => b.readUInt32LE(i * 4),
  "<u2": (b, i) => b.readUInt16LE(i * 2),
  "|i1": (b, i) => b.readInt8(i),
  "|u1": (b, i) => b.readUInt8(i),
  "|b1": (b, i) => b.readUInt8(i),
};

const DTYPE_SIZES: Record<string, number> = {
  "<f8": 8, "<f4": 4, "<i8": 8, "<i4": 4, "<i2": 2,
  "<u8": 8, "<u4": 4, "<u2": 2, "|i1": 1, "|u1": 1, "|b1": 1,
};

export function parseNpy(buf: Buffer, name = "<npy>"): NpyArray {
  if (buf.length < 10 || buf[0] !== 0x93 || buf.toString("ascii", 1, 6) !== "NUMPY") {
    throw new Error(`${name}: not an npy array`);
  }
  const major = buf[6];
  let headerLen: number;
  let headerStart: number;
  if (major === 1) {
    headerLen = buf.readUInt16LE(8);
    headerStart = 10;
  } else {
    headerLen = buf.readUInt32LE(8);
    headerStart = 12;
  }
  const header = buf.toString("latin1", headerStart, headerStart + headerLen);
  const descr = header.match(/'descr':\s*'([^']+)'/)?.[1];
  const fortran = header.match(/'fortran_order':\s*(True|False)/)?.[1];
  const shapeText = header.match(/'shape':\s*\(([^)]*)\)/)?.[1];
  if (!descr || !fortran || shapeText === undefined) {
    throw new Error(`${name}: malformed npy header: ${header.trim()}`);
  }
  if (fortran === "True") {
    throw new Error(`${name}: fortran-order arrays are not supported`);
  }
  const shape = shapeText
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map((s) => Number(s));
  const reader = DTYPE_READERS[descr];
  if (!reader) {
    throw new Error(`${name}: unsupported dtype ${descr}`);
  }
  const count = shape.reduce((a, b) => a * b, 1);
  const body = buf.subarray(headerStart + headerLen);
  const needed = count * DTYPE_SIZES[descr];
  if (body.length < needed) {
    throw new Error(`${name}: truncated data (${body.length} < ${needed})`);
  }
  const data = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = reader(body, i);
  }
  return { shape, data };
}

/** Read selected members (all parseable members when `wanted` is omitted). */
export function readNpz(path: string, wanted?: string[]): Record<string, NpyArray> {
  const buf = fs.readFileSync(path);
  const out: Record<string, NpyArray> = {};
  for (const entry of readCentralDirectory(buf)) {
    const key = entry.name.replace(/\.npy$/, "");
    if (wanted && !wanted.includes(key)) {
      continue;
    }
    try {
      out[key] = parseNpy(extractEntry(buf, entry), entry.name);
    } catch (err) {
      if (wanted) {
        throw err;
      }
      // Optional member with an exotic dtype; ignore.
    }
  }
  if (wanted) {
    for (const key of wanted) {
      if (!(key in out)) {
        throw new Error(`${path}: missing array ${key}`);
      }
    }
  }
  return out;
}
