import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { spawnSync } from "child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { exportHeads } from "../src/exportHeads";
import { main as cliMain } from "../src/cli";
import { encodePngGray } from "../src/png";
import { decodeSphd } from "../src/sphd";
import { decodeWeights, encodeWeights, generateFixtureWeights } from "../src/weights";

let dir: string;
let weightsPath: string;

function testImage(h: number, w: number) {
  const data = new Float32Array(h * w);
  for (let i = 0; i < h; i++) {
    for (let j = 0; j < w; j++) {
      const v =
        0.5 + 0.3 * Math.sin(i / 7) * Math.cos(j / 5) + 0.2 * Math.sin((i + 2 * j) / 11);
      data[i * w + j] = Math.min(1, Math.max(0, v));
    }
  }
  return { width: w, height: h, data };
}

beforeAll(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "headexport-"));
  weightsPath = path.join(dir, "detector.spwt");
  fs.writeFileSync(weightsPath, encodeWeights(generateFixtureWeights()));
  fs.writeFileSync(path.join(dir, "img256.png"), encodePngGray(testImage(256, 256)));
  fs.writeFileSync(path.join(dir, "img64.png"), encodePngGray(testImage(64, 64)));
  fs.writeFileSync(path.join(dir, "img100x80.png"), encodePngGray(testImage(100, 80)));
});

afterAll(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

describe("weights container", () => {
  it("fixture generation is deterministic", () => {
    const a = encodeWeights(generateFixtureWeights(77));
    const b = encodeWeights(generateFixtureWeights(77));
    expect(a.equals(b)).toBe(true);
    const c = encodeWeights(generateFixtureWeights(78));
    expect(a.equals(c)).toBe(false);
  });

  it("encode/decode round trip preserves names, shapes, values", () => {
    const tensors = generateFixtureWeights(5);
    const back = decodeWeights(encodeWeights(tensors));
    expect(back.length).toBe(tensors.length);
    for (let i = 0; i < tensors.length; i++) {
      expect(back[i].name).toBe(tensors[i].name);
      expect(back[i].shape).toEqual(tensors[i].shape);
      expect(back[i].data).toEqual(tensors[i].data);
    }
  });
});

describe("export-heads", () => {
  it("256x256 input gives the 32x32 header with 65+256 channels", () => {
    const out = path.join(dir, "h256.sphd");
    const heads = exportHeads({
      input: path.join(dir, "img256.png"),
      output: out,
      weights: weightsPath,
    });
    expect([heads.hc, heads.wc, heads.cP, heads.cD, heads.cellSize]).toEqual([
      32, 32, 65, 256, 8,
    ]);
    const parsed = decodeSphd(fs.readFileSync(out));
    expect([parsed.hc, parsed.wc, parsed.cP, parsed.cD, parsed.cellSize]).toEqual([
      32, 32, 65, 256, 8,
    ]);
  });

  it("non-multiple-of-8 sizes round the grid up", () => {
    const out = path.join(dir, "h100.sphd");
    const heads = exportHeads({
      input: path.join(dir, "img100x80.png"),
      output: out,
      weights: weightsPath,
    });
    expect([heads.hc, heads.wc]).toEqual([13, 10]);
  });

  it("exporting the same image twice is byte-identical", () => {
    const out1 = path.join(dir, "rep1.sphd");
    const out2 = path.join(dir, "rep2.sphd");
    exportHeads({ input: path.join(dir, "img64.png"), output: out1, weights: weightsPath });
    exportHeads({ input: path.join(dir, "img64.png"), output: out2, weights: weightsPath });
    expect(fs.readFileSync(out1).equals(fs.readFileSync(out2))).toBe(true);
  });

  it("descriptors come out unit-normalized (1 +- 1e-4)", () => {
    const out = path.join(dir, "norm.sphd");
    const heads = exportHeads({
      input: path.join(dir, "img64.png"),
      output: out,
      weights: weightsPath,
    });
    for (let c = 0; c < heads.hc * heads.wc; c++) {
      let s = 0;
      for (let k = 0; k < heads.cD; k++) s += heads.descHead[c * heads.cD + k] ** 2;
      expect(Math.abs(Math.sqrt(s) - 1)).toBeLessThan(1e-4);
    }
  });

  it("missing weights error names the expected path", () => {
    const missing = path.join(dir, "nowhere", "weights.spwt");
    expect(() =>
      exportHeads({ input: path.join(dir, "img64.png"), output: "/dev/null", weights: missing })
    ).toThrowError(new RegExp(missing.replace(/[/\\]/g, "[/\\\\]")));
  });

  it("cli gen-weights + export works end to end", () => {
    const w = path.join(dir, "cliweights.spwt");
    const out = path.join(dir, "cli.sphd");
    expect(cliMain(["gen-weights", "--out", w, "--seed", "9"])).toBe(0);
    expect(cliMain([path.join(dir, "img64.png"), out, "--weights", w])).toBe(0);
    const parsed = decodeSphd(fs.readFileSync(out));
    expect([parsed.hc, parsed.wc]).toEqual([8, 8]);
  });
});

describe("round trip through the warping toolkit", () => {
  it("image scored against itself: point part exactly 0, total < 1e-3", () => {
    const sphd = path.join(dir, "self.sphd");
    exportHeads({ input: path.join(dir, "img64.png"), output: sphd, weights: weightsPath });
    fs.copyFileSync(sphd, path.join(dir, "self_copy.sphd"));
    fs.writeFileSync(path.join(dir, "manifest.csv"), "self.sphd,self_copy.sphd\n");
    const proc = spawnSync(
      "python3",
      ["-m", "maskwarp.cli", "eval", "ir", path.join(dir, "manifest.csv")],
      { encoding: "utf8" }
    );
    expect(proc.status, proc.stderr).toBe(0);
    const lines = proc.stdout.trim().split("\n");
    expect(lines[0]).toBe("pred,gt,total,point,desc");
    const [, , total, point] = lines[1].split(",");
    expect(Number(point)).toBe(0);
    expect(Number(total)).toBeLessThan(1e-3);
  });
});
