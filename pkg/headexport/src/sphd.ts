/**
 * SPHD binary format: serialized detector heads on a coarse cell grid.
 *
 * Layout (little endian):
 *   magic "SPHD" | u32 version=1 | u32 hc | u32 wc | u32 cP | u32 cD |
 *   u32 cellSize | point head f32 (hc*wc*cP, channel-last row-major) |
 *   descriptor head f32 (hc*wc*cD)
 */

export const SPHD_MAGIC = "SPHD";
export const SPHD_VERSION = 1;

export interface Heads {
  hc: number;
  wc: number;
  cP: number;
  cD: number;
  cellSize: number;
  /** shape (hc, wc, cP), flattened row-major channel-last */
  pointHead: Float32Array;
  /** shape (hc, wc, cD), flattened row-major channel-last */
  descHead: Float32Array;
}

export function encodeSphd(heads: Heads): Buffer {
  const { hc, wc, cP, cD, cellSize, pointHead, descHead } = heads;
  if (pointHead.length !== hc * wc * cP) {
    throw new Error(`point head length ${pointHead.length} != ${hc}*${wc}*${cP}`);
  }
  if (descHead.length !== hc * wc * cD) {
    throw new Error(`descriptor head length ${descHead.length} != ${hc}*${wc}*${cD}`);
  }
  const header = Buffer.alloc(28);
  header.write(SPHD_MAGIC, 0, "ascii");
  header.writeUInt32LE(SPHD_VERSION, 4);
  header.writeUInt32LE(hc, 8);
  header.writeUInt32LE(wc, 12);
  header.writeUInt32LE(cP, 16);
  header.writeUInt32LE(cD, 20);
  header.writeUInt32LE(cellSize, 24);
  return Buffer.concat([
    header,
    Buffer.from(pointHead.buffer, pointHead.byteOffset, pointHead.byteLength),
    Buffer.from(descHead.buffer, descHead.byteOffset, descHead.byteLength),
  ]);
}

export function decodeSphd(blob: Buffer): Heads {
  if (blob.subarray(0, 4).toString("ascii") !== SPHD_MAGIC) {
    throw new Error("not an SPHD blob (bad magic)");
  }
  const version = blob.readUInt32LE(4);
  if (version !== SPHD_VERSION) {
    throw new Error(`unsupported SPHD version ${version}`);
  }
  const hc = blob.readUInt32LE(8);
  const wc = blob.readUInt32LE(12);
  const cP = blob.readUInt32LE(16);
  const cD = blob.readUInt32LE(20);
  const cellSize = blob.readUInt32LE(24);
  const nPoint = hc * wc * cP;
  const nDesc = hc * wc * cD;
  const expected = 28 + (nPoint + nDesc) * 4;
  if (blob.length !== expected) {
    throw new Error(`SPHD payload is ${blob.length} bytes, expected ${expected}`);
  }
  const body = blob.subarray(28);
  const pointHead = new Float32Array(nPoint);
  const descHead = new Float32Array(nDesc);
  for (let i = 0; i < nPoint; i++) pointHead[i] = body.readFloatLE(i * 4);
  for (let i = 0; i < nDesc; i++) descHead[i] = body.readFloatLE((nPoint + i) * 4);
  return { hc, wc, cP, cD, cellSize, pointHead, descHead };
}
