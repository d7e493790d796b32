/**
 * Weights container: a sequence of named float32 tensors.
 *
 * Layout per tensor: u32 jsonLen | u32 byteLen | JSON {name, shape} | f32
 * data; the file starts with the magic "SPWT". The detector topology is
 * reconstructed from the tensor names and shapes, so containers may carry
 * any channel widths (converted pretrained weights or generated fixtures).
 */

import * as fs from "fs";

export const SPWT_MAGIC = "SPWT";

export interface NamedTensor {
  name: string;
  shape: number[];
  data: Float32Array;
}

export function encodeWeights(tensors: NamedTensor[]): Buffer {
  const parts: Buffer[] = [Buffer.from(SPWT_MAGIC, "ascii")];
  for (const t of tensors) {
    const json = Buffer.from(JSON.stringify({ name: t.name, shape: t.shape }), "utf8");
    const head = Buffer.alloc(8);
    head.writeUInt32LE(json.length, 0);
    head.writeUInt32LE(t.data.byteLength, 4);
    parts.push(head, json, Buffer.from(t.data.buffer, t.data.byteOffset, t.data.byteLength));
  }
  return Buffer.concat(parts);
}

export function decodeWeights(blob: Buffer): NamedTensor[] {
  if (blob.subarray(0, 4).toString("ascii") !== SPWT_MAGIC) {
    throw new Error("not a weights container (bad magic)");
  }
  const tensors: NamedTensor[] = [];
  let at = 4;
  while (at < blob.length) {
    const jsonLen = blob.readUInt32LE(at);
    const byteLen = blob.readUInt32LE(at + 4);
    at += 8;
    const meta = JSON.parse(blob.subarray(at, at + jsonLen).toString("utf8"));
    at += jsonLen;
    const count = byteLen / 4;
    const data = new Float32Array(count);
    for (let i = 0; i < count; i++) data[i] = blob.readFloatLE(at + i * 4);
    at += byteLen;
    const size = meta.shape.reduce((a: number, b: number) => a * b, 1);
    if (size !== count) {
      throw new Error(`tensor ${meta.name}: shape ${meta.shape} != ${count} values`);
    }
    tensors.push({ name: meta.name, shape: meta.shape, data });
  }
  return tensors;
}

export function loadWeightsFile(path: string): NamedTensor[] {
  if (!fs.existsSync(path)) {
    throw new Error(
      `detector weights not found at ${path}; generate fixture weights with ` +
        `"export-heads gen-weights --out ${path}" or place converted weights there`
    );
  }
  return decodeWeights(fs.readFileSync(path));
}

/** mulberry32: tiny deterministic PRNG for fixture weights. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function fill(rand: () => number, shape: number[], scale: number): Float32Array {
  const size = shape.reduce((a, b) => a * b, 1);
  const out = new Float32Array(size);
  for (let i = 0; i < size; i++) {
    // Box-Muller from two uniforms
    const u = Math.max(rand(), 1e-12);
    const v = rand();
    out[i] = Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v) * scale;
  }
  return out;
}

/**
 * Deterministic random-init weights for the detector topology: four
 * two-conv encoder blocks (2x2 max pool after the first three), a point
 * head ending in 65 channels, a descriptor head ending in 256.
 *
 * These are fixtures for exercising the export pipeline and formats; the
 * container accepts converted pretrained weights with the same names.
 */
export function generateFixtureWeights(
  seed = 1234,
  widths: number[] = [16, 16, 32, 32],
  headWidth = 64
): NamedTensor[] {
  const rand = mulberry32(seed);
  const tensors: NamedTensor[] = [];
  const conv = (name: string, kh: number, kw: number, cin: number, cout: number) => {
    const scale = Math.sqrt(2 / (kh * kw * cin));
    tensors.push({ name: `${name}.w`, shape: [kh, kw, cin, cout], data: fill(rand, [kh, kw, cin, cout], scale) });
    tensors.push({ name: `${name}.b`, shape: [cout], data: fill(rand, [cout], 0.01) });
  };
  let cin = 1;
  widths.forEach((width, i) => {
    conv(`enc${i}a`, 3, 3, cin, width);
    conv(`enc${i}b`, 3, 3, width, width);
    cin = width;
  });
  conv("det0", 3, 3, cin, headWidth);
  conv("det1", 1, 1, headWidth, 65);
  conv("desc0", 3, 3, cin, headWidth);
  conv("desc1", 1, 1, headWidth, 256);
  return tensors;
}
