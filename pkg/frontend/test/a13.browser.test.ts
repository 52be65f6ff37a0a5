// @vitest-environment jsdom
/**
 * Scripted browser-style drive of the full UI against a real service process:
 * the chain2-vs-chain3 preset is played to a Spoiler win and the symmetric
 * chain preset to Duplicator survival, re-checking after every interaction
 * that the rendered clock, turn, and verdict equal the server's state.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { selectionRule } from "../src/legality.js";
import type { Preset } from "../src/presets.js";
import type { SessionState } from "../src/types.js";
import { loadAllPresets, startBackend, type Backend } from "./helpers.js";

let backend: Backend;
let api: ApiClient;
let presets: Preset[];

beforeAll(async () => {
  expect(typeof fetch, "global fetch must exist in the test DOM").toBe("function");
  backend = await startBackend();
  api = new ApiClient(backend.url);
  presets = loadAllPresets();
});

afterAll(async () => {
  await backend?.stop();
});

function mountApp(): App {
  document.body.innerHTML = '<div id="app"></div>';
  return new App(document.getElementById("app")!, api, presets);
}

function byId<T extends HTMLElement = HTMLElement>(id: string): T {
  const el = document.querySelector<T>(`#${id}`);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

function clickById(id: string): void {
  byId(id).dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

function clickNode(panel: "left" | "right", element: number): void {
  const node = document.querySelector(`g[data-panel="${panel}"][data-element="${element}"]`);
  if (!node) throw new Error(`no rendered node ${panel}/${element}`);
  node.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

function choosePreset(id: string): void {
  const select = byId<HTMLSelectElement>("preset-select");
  select.value = id;
  select.dispatchEvent(new Event("change", { bubbles: true }));
}

/** The A13 invariant: rendered clock/turn/verdict equal the server's session state. */
async function expectDomMatchesServer(sessionId: string): Promise<SessionState> {
  const server = await api.getSession(sessionId);
  const clock = byId("clock-display");
  expect(clock.dataset.clock).toBe(String(server.clock));
  expect(clock.textContent).toBe(`clock ${server.clock} of ${server.initial_clock}`);
  expect(byId("turn-indicator").dataset.awaiting).toBe(server.awaiting ?? "none");
  const verdict = byId("verdict-banner");
  expect(verdict.dataset.status).toBe(server.status);
  expect(verdict.dataset.holds).toBe(String(server.verdict.holds));
  if (server.status === "spoiler-won") expect(verdict.textContent).toBe("Spoiler won");
  if (server.status === "duplicator-survived") expect(verdict.textContent).toBe("Duplicator survived");
  expect(document.querySelectorAll("#history-list li")).toHaveLength(server.history.length);
  return server;
}

describe("scripted UI flows", () => {
  it("drives chain2-vs-chain3 to a Spoiler win", async () => {
    const app = mountApp();
    choosePreset("chain2-vs-chain3");
    clickById("new-session");
    await app.whenIdle();

    const sessionId = app.session!.id;
    let server = await expectDomMatchesServer(sessionId);
    expect(server.mode).toBe("human-spoiler");
    expect(server.status).toBe("in-progress");
    expect(server.awaiting).toBe("spoiler");
    expect(server.clock).toBe(1);
    expect(byId("verdict-banner").textContent).toContain("fails");

    // Hint while holding the turn: a winning challenge plus a separating formula.
    clickById("hint-button");
    await app.whenIdle();
    expect(byId("hint-panel").hidden).toBe(false);
    expect(byId("hint-text").textContent).toContain("spoiler hint (winning)");
    expect(byId("hint-formula").hidden).toBe(false);
    expect(byId("hint-formula").textContent!.length).toBeGreaterThan(0);
    server = await expectDomMatchesServer(sessionId);

    // Clicking the non-challenge board is blocked client-side with a reason.
    clickNode("left", 0);
    const notice = byId("notice");
    expect(notice.hidden).toBe(false);
    expect(notice.textContent).toContain("blocked");
    expect(notice.textContent).toContain("right board");
    server = await expectDomMatchesServer(sessionId);
    expect(server.history).toHaveLength(0);

    // Challenge with all three right-side elements, then submit.
    for (const element of [0, 1, 2]) clickNode("right", element);
    expect(document.querySelectorAll("#selection-chips .chip")).toHaveLength(3);
    await expectDomMatchesServer(sessionId);
    clickById("submit-move");
    await app.whenIdle();

    server = await expectDomMatchesServer(sessionId);
    expect(server.status).toBe("spoiler-won");
    expect(server.clock).toBe(0);
    expect(server.awaiting).toBeNull();
    expect(byId("verdict-banner").textContent).toBe("Spoiler won");
    expect(server.history).toHaveLength(2);
    expect(server.history[0]).toMatchObject({ side: "spoiler", by: "human", tuple: [0, 1, 2] });
    expect(server.history[1]).toMatchObject({ side: "duplicator", by: "engine" });

    // The finished session accepts no further moves.
    clickById("submit-move");
    expect(byId("notice").textContent).toContain("resolved");
    await expectDomMatchesServer(sessionId);
  });

  it("drives the symmetric chain preset to Duplicator survival", async () => {
    const app = mountApp();
    choosePreset("chain3-vs-chain3");
    clickById("new-session");
    await app.whenIdle();

    const sessionId = app.session!.id;
    let server = await expectDomMatchesServer(sessionId);
    expect(server.mode).toBe("human-duplicator");
    expect(server.status).toBe("in-progress");
    expect(server.awaiting).toBe("duplicator");
    expect(server.pending_challenge).not.toBeNull();
    expect(server.verdict.holds).toBe(true);

    let rounds = 0;
    while (app.session!.status === "in-progress" && rounds < 6) {
      const challenge = app.session!.pending_challenge ?? [];
      const panel = selectionRule(app.session)!.panel;
      expect(panel).not.toBeNull();
      // Identical structures: echoing the challenge is always a sound reply.
      for (const element of challenge) clickNode(panel!, element);
      expect(document.querySelectorAll("#selection-chips .chip")).toHaveLength(
        Math.max(challenge.length, 1),
      );
      clickById("submit-move");
      await app.whenIdle();
      server = await expectDomMatchesServer(sessionId);
      rounds += 1;
    }

    expect(server.status).toBe("duplicator-survived");
    expect(server.clock).toBe(0);
    expect(server.awaiting).toBeNull();
    expect(byId("verdict-banner").textContent).toBe("Duplicator survived");
    expect(server.history).toHaveLength(2 * server.initial_clock);
    for (const entry of server.history) {
      expect(entry.side === "spoiler" ? entry.by === "engine" : entry.by === "human").toBe(true);
    }
  });

  it("surfaces server rejections verbatim in the error banner", async () => {
    const app = mountApp();
    choosePreset("__custom__");
    // Passes the client's shape check but names an element outside the universe,
    // so the rejection below comes from the server.
    byId<HTMLTextAreaElement>("custom-left").value = JSON.stringify({
      signature: [["lt", 2]],
      universe: 2,
      relations: { lt: [[0, 99]] },
    });
    byId<HTMLTextAreaElement>("custom-right").value = JSON.stringify({
      signature: [["lt", 2]],
      universe: 2,
      relations: { lt: [[0, 1]] },
    });
    clickById("new-session");
    await app.whenIdle();

    expect(app.session).toBeNull();
    const banner = byId("error-banner");
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toMatch(/^server error \[/);
    expect(banner.textContent).toContain("left structure");
  });
});
