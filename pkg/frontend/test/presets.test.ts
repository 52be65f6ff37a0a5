import { readdirSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { z } from "zod";

import { loadAllPresets, loadPresetFile, presetFileNames, presetsPath } from "./helpers.js";

const structureSchema = z.object({
  signature: z.array(z.tuple([z.string(), z.number().int().positive()])),
  universe: z.number().int().nonnegative(),
  relations: z.record(z.string(), z.array(z.array(z.number().int().nonnegative()))),
});

const presetSchema = z.object({
  id: z.string().min(1),
  label: z.string().min(1),
  description: z.string().min(1),
  mode: z.enum(["human-spoiler", "human-duplicator"]),
  clock: z.number().int().nonnegative(),
  left: structureSchema,
  right: structureSchema,
});

describe("preset library", () => {
  it("indexes exactly the preset files on disk", () => {
    const onDisk = readdirSync(presetsPath())
      .filter((f) => f.endsWith(".json") && f !== "index.json")
      .sort();
    expect([...presetFileNames()].sort()).toEqual(onDisk);
  });

  it("every preset file matches the schema", () => {
    for (const name of presetFileNames()) {
      const preset = loadPresetFile(name);
      expect(() => presetSchema.parse(preset), name).not.toThrow();
      expect(`${preset.id}.json`).toBe(name);
    }
  });

  it("relation rows respect the signature arity and the universe", () => {
    for (const preset of loadAllPresets()) {
      for (const [side, structure] of [
        ["left", preset.left],
        ["right", preset.right],
      ] as const) {
        const arity = new Map(structure.signature);
        for (const [name, rows] of Object.entries(structure.relations)) {
          expect(arity.has(name), `${preset.id}.${side}: stray relation ${name}`).toBe(true);
          for (const row of rows) {
            expect(row.length, `${preset.id}.${side}.${name}`).toBe(arity.get(name));
            for (const element of row) {
              expect(element, `${preset.id}.${side}.${name}`).toBeLessThan(structure.universe);
            }
          }
        }
      }
    }
  });

  it("ships the two flows the scripted test drives", () => {
    const byId = new Map(loadAllPresets().map((p) => [p.id, p]));

    const spoilerWin = byId.get("chain2-vs-chain3");
    expect(spoilerWin).toBeDefined();
    expect(spoilerWin!.mode).toBe("human-spoiler");
    expect(spoilerWin!.clock).toBe(1);
    expect(spoilerWin!.left.universe).toBe(2);
    expect(spoilerWin!.right.universe).toBe(3);

    const symmetric = byId.get("chain3-vs-chain3");
    expect(symmetric).toBeDefined();
    expect(symmetric!.mode).toBe("human-duplicator");
    expect(symmetric!.left).toEqual(symmetric!.right);
  });
});
