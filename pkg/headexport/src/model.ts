/**
 * Detector forward pass: a VGG-style shared encoder (three 2x2 max pools,
 * so the output grid is ceil(H/8) x ceil(W/8)) feeding an interest-point
 * head (raw 65-channel logits per cell) and a descriptor head (256
 * channels, l2-normalized per cell). Heads are exported pre-decoding; no
 * softmax or keypoint extraction happens here.
 */

import * as tf from "@tensorflow/tfjs";
import { Heads } from "./sphd";
import { NamedTensor } from "./weights";

export const CELL_SIZE = 8;

interface ConvParams {
  w: tf.Tensor4D;
  b: tf.Tensor1D;
}

export class DetectorModel {
  private params = new Map<string, ConvParams>();
  private encoderBlocks: number;

  constructor(tensors: NamedTensor[]) {
    const byName = new Map(tensors.map((t) => [t.name, t]));
    const names = [...byName.keys()];
    this.encoderBlocks = 0;
    while (byName.has(`enc${this.encoderBlocks}a.w`)) this.encoderBlocks++;
    if (this.encoderBlocks === 0) {
      throw new Error("weights container has no encoder blocks (enc0a.w missing)");
    }
    const layerNames: string[] = [];
    for (let i = 0; i < this.encoderBlocks; i++) layerNames.push(`enc${i}a`, `enc${i}b`);
    layerNames.push("det0", "det1", "desc0", "desc1");
    for (const name of layerNames) {
      const w = byName.get(`${name}.w`);
      const b = byName.get(`${name}.b`);
      if (!w || !b) throw new Error(`weights container is missing ${name}.w/.b`);
      this.params.set(name, {
        w: tf.tensor4d(w.data, w.shape as [number, number, number, number]),
        b: tf.tensor1d(b.data),
      });
    }
    const det1 = byName.get("det1.w")!;
    const desc1 = byName.get("desc1.w")!;
    if (det1.shape[3] !== 65) throw new Error(`point head must have 65 channels, got ${det1.shape[3]}`);
    if (desc1.shape[3] !== 256) throw new Error(`descriptor head must have 256 channels, got ${desc1.shape[3]}`);
    const pools = this.encoderBlocks - 1;
    if (2 ** pools !== CELL_SIZE) {
      throw new Error(`encoder must pool down by ${CELL_SIZE}, got ${this.encoderBlocks} blocks`);
    }
    for (const unexpected of names) {
      if (!layerNames.some((l) => unexpected === `${l}.w` || unexpected === `${l}.b`)) {
        throw new Error(`unexpected tensor ${unexpected} in weights container`);
      }
    }
  }

  private conv(name: string, x: tf.Tensor4D, relu: boolean): tf.Tensor4D {
    const p = this.params.get(name)!;
    let out = tf.add(tf.conv2d(x, p.w, 1, "same"), p.b) as tf.Tensor4D;
    if (relu) out = tf.relu(out);
    return out;
  }

  /** gray: row-major [0,1] image. Returns heads on the ceil(H/8) grid. */
  forward(gray: Float32Array, height: number, width: number): Heads {
    return tf.tidy(() => {
      let x = tf.tensor4d(gray, [1, height, width, 1]);
      for (let i = 0; i < this.encoderBlocks; i++) {
        x = this.conv(`enc${i}a`, x, true);
        x = this.conv(`enc${i}b`, x, true);
        if (i < this.encoderBlocks - 1) {
          x = tf.maxPool(x, 2, 2, "same");
        }
      }
      const point = this.conv("det1", this.conv("det0", x, true), false);
      let desc = this.conv("desc1", this.conv("desc0", x, true), false);
      const norms = tf.sqrt(tf.sum(tf.square(desc), 3, true));
      desc = tf.div(desc, tf.maximum(norms, 1e-12));
      const [, hc, wc] = point.shape;
      return {
        hc,
        wc,
        cP: 65,
        cD: 256,
        cellSize: CELL_SIZE,
        pointHead: point.dataSync() as Float32Array,
        descHead: desc.dataSync() as Float32Array,
      };
    });
  }

  dispose(): void {
    for (const p of this.params.values()) {
      p.w.dispose();
      p.b.dispose();
    }
  }
}
