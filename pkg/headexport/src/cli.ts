#!/usr/bin/env node
/**
 * export-heads INPUT.png OUTPUT.sphd [--weights PATH]
 * export-heads gen-weights [--out PATH] [--seed N]
 */

import * as fs from "fs";
import * as path from "path";
import { DEFAULT_WEIGHTS, exportHeads } from "./exportHeads";
import { encodeWeights, generateFixtureWeights } from "./weights";

function fail(message: string, code: number): never {
  process.stderr.write(`error: ${message}\n`);
  process.exit(code);
}

function parseFlag(args: string[], flag: string): string | undefined {
  const at = args.indexOf(flag);
  if (at === -1) return undefined;
  const value = args[at + 1];
  if (value === undefined) fail(`${flag} needs a value`, 1);
  args.splice(at, 2);
  return value;
}

export function main(argv: string[]): number {
  const args = [...argv];
  if (args[0] === "gen-weights") {
    args.shift();
    const out = parseFlag(args, "--out") ?? DEFAULT_WEIGHTS;
    const seed = Number(parseFlag(args, "--seed") ?? "1234");
    if (!Number.isFinite(seed)) fail("--seed must be a number", 1);
    if (args.length) fail(`unexpected arguments: ${args.join(" ")}`, 1);
    fs.mkdirSync(path.dirname(out), { recursive: true });
    fs.writeFileSync(out, encodeWeights(generateFixtureWeights(seed)));
    process.stdout.write(`wrote fixture weights (seed ${seed}) to ${out}\n`);
    return 0;
  }

  const weights = parseFlag(args, "--weights");
  if (args.length !== 2) {
    fail("usage: export-heads INPUT.png OUTPUT.sphd [--weights PATH]", 1);
  }
  const [input, output] = args;
  try {
    const heads = exportHeads({ input, output, weights });
    process.stdout.write(
      `wrote ${output}: grid ${heads.hc}x${heads.wc}, ${heads.cP}+${heads.cD} channels\n`
    );
    return 0;
  } catch (err) {
    fail((err as Error).message, 2);
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
