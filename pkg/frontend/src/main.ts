/** Browser entry point: load the preset library and mount the app. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { loadPresets } from "./presets.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const apiBase = document.querySelector<HTMLMetaElement>('meta[name="api-base"]')?.content ?? "";
  try {
    const presets = await loadPresets();
    new App(root, new ApiClient(apiBase), presets);
  } catch (err) {
    root.textContent = `failed to start: ${err instanceof Error ? err.message : String(err)}`;
  }
}

void boot();
