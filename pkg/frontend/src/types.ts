/** Wire types for the game service's HTTP+JSON API, plus light runtime guards. */

export interface StructureJson {
  signature: [string, number][];
  universe: number;
  relations: Record<string, number[][]>;
}

export type Mode = "human-spoiler" | "human-duplicator";
export type Status = "in-progress" | "spoiler-won" | "duplicator-survived";
export type Side = "spoiler" | "duplicator";

export interface Verdict {
  holds: boolean;
  witness: number[] | null;
}

export interface PositionView {
  left: StructureJson;
  right: StructureJson;
  left_tuple: number[];
  right_tuple: number[];
  orientation: "original" | "swapped";
}

export interface HistoryEntry {
  side: Side;
  by: "human" | "engine";
  into: "left" | "right";
  tuple: number[];
  label: string | null;
}

export interface SessionState {
  id: string;
  mode: Mode;
  status: Status;
  clock: number;
  initial_clock: number;
  awaiting: Side | null;
  verdict: Verdict;
  position: PositionView;
  pending_challenge: number[] | null;
  history: HistoryEntry[];
}

export interface Hint {
  side: Side;
  move: number[];
  label: string;
  explanation: string;
  formula?: string | null;
}

export interface BfResult {
  direction: "leq" | "geq" | "equiv";
  n: number;
  holds: boolean;
  witness: number[] | null;
}

export interface ClassifyResult {
  ranks: Record<string, number>;
  normalized: string;
}

function fail(context: string, detail: string): never {
  throw new Error(`${context}: ${detail}`);
}

function isRecord(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

function isNumberArray(x: unknown): x is number[] {
  return Array.isArray(x) && x.every((v) => typeof v === "number");
}

export function validateStructure(x: unknown, context = "structure"): StructureJson {
  if (!isRecord(x)) fail(context, "not an object");
  const { signature, universe, relations } = x;
  if (
    !Array.isArray(signature) ||
    !signature.every(
      (p) => Array.isArray(p) && p.length === 2 && typeof p[0] === "string" && typeof p[1] === "number",
    )
  ) {
    fail(context, "signature must be a list of [name, arity] pairs");
  }
  if (typeof universe !== "number" || !Number.isInteger(universe) || universe < 0) {
    fail(context, "universe must be a non-negative integer size");
  }
  if (!isRecord(relations)) fail(context, "relations must be an object");
  for (const [name, rows] of Object.entries(relations)) {
    if (!Array.isArray(rows) || !rows.every(isNumberArray)) {
      fail(context, `relation ${name} must be a list of integer rows`);
    }
  }
  return x as unknown as StructureJson;
}

export function validateSession(x: unknown): SessionState {
  const context = "session state";
  if (!isRecord(x)) fail(context, "not an object");
  if (typeof x.id !== "string") fail(context, "missing id");
  if (x.mode !== "human-spoiler" && x.mode !== "human-duplicator") fail(context, "bad mode");
  if (x.status !== "in-progress" && x.status !== "spoiler-won" && x.status !== "duplicator-survived") {
    fail(context, "bad status");
  }
  if (typeof x.clock !== "number" || typeof x.initial_clock !== "number") fail(context, "bad clock");
  if (x.awaiting !== null && x.awaiting !== "spoiler" && x.awaiting !== "duplicator") {
    fail(context, "bad awaiting");
  }
  const verdict = x.verdict;
  if (!isRecord(verdict) || typeof verdict.holds !== "boolean") fail(context, "bad verdict");
  const pos = x.position;
  if (!isRecord(pos)) fail(context, "missing position");
  validateStructure(pos.left, "position.left");
  validateStructure(pos.right, "position.right");
  if (!isNumberArray(pos.left_tuple) || !isNumberArray(pos.right_tuple)) fail(context, "bad pinned tuples");
  if (pos.orientation !== "original" && pos.orientation !== "swapped") fail(context, "bad orientation");
  if (x.pending_challenge !== null && !isNumberArray(x.pending_challenge)) {
    fail(context, "bad pending challenge");
  }
  if (!Array.isArray(x.history)) fail(context, "bad history");
  return x as unknown as SessionState;
}

export function validateHint(x: unknown): Hint {
  if (!isRecord(x)) fail("hint", "not an object");
  if (x.side !== "spoiler" && x.side !== "duplicator") fail("hint", "bad side");
  if (!isNumberArray(x.move)) fail("hint", "bad move");
  if (typeof x.label !== "string" || typeof x.explanation !== "string") fail("hint", "bad label");
  return x as unknown as Hint;
}
