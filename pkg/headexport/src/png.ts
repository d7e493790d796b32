/** PNG decoding/encoding helpers (8-bit, via pngjs). */

import * as fs from "fs";
import { PNG } from "pngjs";

export interface GrayImage {
  width: number;
  height: number;
  /** row-major luminance in [0,1] */
  data: Float32Array;
}

/** Decode a PNG file to [0,1] luminance (Rec. 601 weights for color). */
export function readPngGray(path: string): GrayImage {
  if (!fs.existsSync(path)) {
    throw new Error(`input image not found: ${path}`);
  }
  const png = PNG.sync.read(fs.readFileSync(path));
  const { width, height } = png;
  const data = new Float32Array(width * height);
  for (let i = 0; i < width * height; i++) {
    const r = png.data[i * 4];
    const g = png.data[i * 4 + 1];
    const b = png.data[i * 4 + 2];
    data[i] = (0.299 * r + 0.587 * g + 0.114 * b) / 255;
  }
  return { width, height, data };
}

/** Encode a [0,1] gray image to PNG bytes (for tests and fixtures). */
export function encodePngGray(img: GrayImage): Buffer {
  const png = new PNG({ width: img.width, height: img.height });
  for (let i = 0; i < img.width * img.height; i++) {
    const v = Math.max(0, Math.min(255, Math.round(img.data[i] * 255)));
    png.data[i * 4] = v;
    png.data[i * 4 + 1] = v;
    png.data[i * 4 + 2] = v;
    png.data[i * 4 + 3] = 255;
  }
  return PNG.sync.write(png);
}
