/** Client-side pre-checks for selections. Verdicts and legality stay server-authoritative;
 * these only block clicks that could never be part of a legal move, with a reason. */

import type { SessionState } from "./types.js";

export type Panel = "left" | "right";

export interface SelectionRule {
  /** Display panel whose elements may be clicked, or null when no move is expected. */
  panel: Panel | null;
  /** Exact tuple length required (duplicator replies), or null for free length. */
  requiredLength: number | null;
  /** Why no panel is active, when panel is null. */
  reason: string;
}

/** Display panel holding the structure that was `left`/`right` at session creation. */
export function displayPanelOf(state: SessionState, current: "left" | "right"): Panel {
  if (state.position.orientation === "original") return current;
  return current === "left" ? "right" : "left";
}

export function selectionRule(state: SessionState | null): SelectionRule {
  if (state === null) {
    return { panel: null, requiredLength: null, reason: "no active session" };
  }
  if (state.status !== "in-progress") {
    return { panel: null, requiredLength: null, reason: "the session is already resolved" };
  }
  const humanSide = state.mode === "human-spoiler" ? "spoiler" : "duplicator";
  if (state.awaiting !== humanSide) {
    return { panel: null, requiredLength: null, reason: "waiting for the engine to move" };
  }
  if (humanSide === "spoiler") {
    // Challenges always index into the current position's right structure.
    return { panel: displayPanelOf(state, "right"), requiredLength: null, reason: "" };
  }
  const challenge = state.pending_challenge ?? [];
  return {
    panel: displayPanelOf(state, "left"),
    requiredLength: challenge.length,
    reason: "",
  };
}

export interface CheckResult {
  ok: boolean;
  reason: string;
}

export function clickCheck(
  state: SessionState | null,
  selection: number[],
  panel: Panel,
  element: number,
): CheckResult {
  const rule = selectionRule(state);
  if (rule.panel === null) return { ok: false, reason: rule.reason };
  if (panel !== rule.panel) {
    return { ok: false, reason: `moves go into the ${rule.panel} board this round` };
  }
  const universe =
    rule.panel === displayPanelOf(state!, "right")
      ? state!.position.right.universe
      : state!.position.left.universe;
  if (!Number.isInteger(element) || element < 0 || element >= universe) {
    return { ok: false, reason: `element ${element} is outside the structure` };
  }
  if (rule.requiredLength !== null && selection.length >= rule.requiredLength) {
    return {
      ok: false,
      reason: `the reply already has ${rule.requiredLength} element(s), matching the challenge`,
    };
  }
  return { ok: true, reason: "" };
}

export function submitCheck(state: SessionState | null, selection: number[]): CheckResult {
  const rule = selectionRule(state);
  if (rule.panel === null) return { ok: false, reason: rule.reason };
  if (rule.requiredLength !== null && selection.length !== rule.requiredLength) {
    return {
      ok: false,
      reason: `the reply must have exactly ${rule.requiredLength} element(s), one per challenged element`,
    };
  }
  return { ok: true, reason: "" };
}
