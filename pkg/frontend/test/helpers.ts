/** Test utilities: spawn a real game service and load the shipped preset files. */

import { spawn } from "node:child_process";
import { readFileSync } from "node:fs";
import net from "node:net";
import path from "node:path";

import { validatePreset, type Preset } from "../src/presets.js";

export async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        probe.close(() => reject(new Error("no port assigned")));
        return;
      }
      const { port } = address;
      probe.close(() => resolve(port));
    });
  });
}

export interface Backend {
  url: string;
  stop(): Promise<void>;
}

/** Start `backforth serve` on a free port and wait until it answers. */
export async function startBackend(): Promise<Backend> {
  const port = await freePort();
  const url = `http://127.0.0.1:${port}`;
  const child = spawn("backforth", ["serve", "--port", String(port)], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  let stderr = "";
  child.stderr?.on("data", (chunk: Buffer) => {
    stderr += chunk.toString();
  });
  const exited = new Promise<void>((resolve) => {
    child.once("exit", () => resolve());
  });

  const deadline = Date.now() + 30_000;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early (code ${child.exitCode}): ${stderr.slice(-500)}`);
    }
    try {
      const response = await fetch(`${url}/compute/classify`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ formula: "(rel R v0 v0)" }),
      });
      if (response.ok) {
        return {
          url,
          stop: async () => {
            child.kill("SIGTERM");
            const timeout = new Promise<void>((resolve) => {
              setTimeout(() => {
                child.kill("SIGKILL");
                resolve();
              }, 5_000);
            });
            await Promise.race([exited, timeout]);
          },
        };
      }
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  child.kill("SIGKILL");
  throw new Error(`service did not come up on ${url}: ${String(lastError)}\n${stderr.slice(-500)}`);
}

// import.meta.url is not a file URL under the DOM test environment, so the
// preset directory is resolved from the package root the tests run in.
export function presetsPath(): string {
  return path.resolve(process.cwd(), "presets");
}

export function presetFileNames(): string[] {
  const index = JSON.parse(readFileSync(path.join(presetsPath(), "index.json"), "utf8")) as {
    presets: string[];
  };
  return index.presets;
}

export function loadPresetFile(name: string): Preset {
  const raw = JSON.parse(readFileSync(path.join(presetsPath(), name), "utf8"));
  return validatePreset(raw, name);
}

export function loadAllPresets(): Preset[] {
  return presetFileNames().map(loadPresetFile);
}
