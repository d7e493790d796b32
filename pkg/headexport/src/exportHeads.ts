/** The export pipeline: image file -> detector heads -> SPHD file. */

import * as fs from "fs";
import * as path from "path";
import { DetectorModel, CELL_SIZE } from "./model";
import { readPngGray } from "./png";
import { encodeSphd, Heads } from "./sphd";
import { loadWeightsFile } from "./weights";

export const DEFAULT_WEIGHTS = path.join(__dirname, "..", "weights", "detector.spwt");

export interface ExportJob {
  input: string;
  output: string;
  weights?: string;
}

/** Run the detector on an image and write its heads as an SPHD file. */
export function exportHeads(job: ExportJob): Heads {
  const weightsPath = job.weights ?? DEFAULT_WEIGHTS;
  const tensors = loadWeightsFile(weightsPath);
  const model = new DetectorModel(tensors);
  try {
    const img = readPngGray(job.input);
    const heads = model.forward(img.data, img.height, img.width);
    const wantHc = Math.ceil(img.height / CELL_SIZE);
    const wantWc = Math.ceil(img.width / CELL_SIZE);
    if (heads.hc !== wantHc || heads.wc !== wantWc) {
      throw new Error(
        `grid ${heads.hc}x${heads.wc} does not match ceil(${img.height}/${CELL_SIZE}) x ` +
          `ceil(${img.width}/${CELL_SIZE})`
      );
    }
    fs.writeFileSync(job.output, encodeSphd(heads));
    return heads;
  } finally {
    model.dispose();
  }
}
