export { exportHeads, ExportJob, DEFAULT_WEIGHTS } from "./exportHeads";
export { DetectorModel, CELL_SIZE } from "./model";
export { encodeSphd, decodeSphd, Heads } from "./sphd";
export {
  encodeWeights,
  decodeWeights,
  generateFixtureWeights,
  loadWeightsFile,
  NamedTensor,
} from "./weights";
export { readPngGray, encodePngGray, GrayImage } from "./png";
