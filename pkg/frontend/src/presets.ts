/** Loader for the static JSON preset library. */

import type { Mode, StructureJson } from "./types.js";
import { validateStructure } from "./types.js";

export interface Preset {
  id: string;
  label: string;
  description: string;
  mode: Mode;
  clock: number;
  left: StructureJson;
  right: StructureJson;
}

export function validatePreset(x: unknown, context = "preset"): Preset {
  if (typeof x !== "object" || x === null || Array.isArray(x)) {
    throw new Error(`${context}: not an object`);
  }
  const record = x as Record<string, unknown>;
  for (const key of ["id", "label", "description"] as const) {
    if (typeof record[key] !== "string" || record[key] === "") {
      throw new Error(`${context}: missing ${key}`);
    }
  }
  if (record.mode !== "human-spoiler" && record.mode !== "human-duplicator") {
    throw new Error(`${context}: bad mode`);
  }
  if (typeof record.clock !== "number" || !Number.isInteger(record.clock) || record.clock < 0) {
    throw new Error(`${context}: clock must be a non-negative integer`);
  }
  validateStructure(record.left, `${context}.left`);
  validateStructure(record.right, `${context}.right`);
  return record as unknown as Preset;
}

/** Fetch `index.json` and every preset file it lists from a static directory. */
export async function loadPresets(baseUrl = "presets"): Promise<Preset[]> {
  const indexResponse = await fetch(`${baseUrl}/index.json`);
  if (!indexResponse.ok) {
    throw new Error(`failed to load preset index: HTTP ${indexResponse.status}`);
  }
  const index = (await indexResponse.json()) as { presets?: unknown };
  if (!Array.isArray(index.presets) || !index.presets.every((f) => typeof f === "string")) {
    throw new Error("preset index must list file names under `presets`");
  }
  const loaded: Preset[] = [];
  for (const file of index.presets as string[]) {
    const response = await fetch(`${baseUrl}/${file}`);
    if (!response.ok) throw new Error(`failed to load preset ${file}: HTTP ${response.status}`);
    loaded.push(validatePreset(await response.json(), file));
  }
  return loaded;
}
