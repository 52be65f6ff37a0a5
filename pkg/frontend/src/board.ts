/** SVG rendering of a structure: nodes on the layout circles, arrows per relation row. */

import type { Point } from "./layout.js";
import type { StructureJson } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export const EDGE_PALETTE = ["#2563eb", "#d97706", "#059669", "#db2777", "#7c3aed", "#0891b2"];
export const PIN_PALETTE = ["#dc2626", "#2563eb", "#059669", "#d97706", "#7c3aed", "#0891b2"];

export type Panel = "left" | "right";

export interface BoardOptions {
  panel: Panel;
  /** Elements already pinned on this board, in pin order (pairs index-by-index across boards). */
  pinned: number[];
  /** Elements the user has clicked so far, in click order. */
  selection: number[];
  /** Challenged elements awaiting a reply, drawn with a halo. */
  highlight: number[];
  clickable: boolean;
  onElementClick?: (element: number) => void;
}

export function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
  return el;
}

function occurrences(tuple: number[], element: number): number[] {
  const hits: number[] = [];
  tuple.forEach((value, index) => {
    if (value === element) hits.push(index);
  });
  return hits;
}

function drawEdge(group: SVGGElement, from: Point, to: Point, color: string, offsetIndex: number): void {
  if (from.x === to.x && from.y === to.y) {
    // Self-loop: a small circle tangent to the node, shifted per relation.
    const loop = svgEl("circle", {
      cx: String(from.x + 16 + 4 * offsetIndex),
      cy: String(from.y - 16 - 4 * offsetIndex),
      r: "9",
      fill: "none",
      stroke: color,
      "stroke-width": "1.6",
      class: "edge",
    });
    group.appendChild(loop);
    return;
  }
  const dx = to.x - from.x;
  const dy = to.y - from.y;
  const length = Math.hypot(dx, dy) || 1;
  // Perpendicular shift separates edges of different relations on the same pair.
  const px = (-dy / length) * 3 * offsetIndex;
  const py = (dx / length) * 3 * offsetIndex;
  // Stop short of the node circle so the arrowhead stays visible.
  const trim = 16 / length;
  const x1 = from.x + dx * trim + px;
  const y1 = from.y + dy * trim + py;
  const x2 = to.x - dx * trim + px;
  const y2 = to.y - dy * trim + py;
  group.appendChild(
    svgEl("line", {
      x1: String(x1),
      y1: String(y1),
      x2: String(x2),
      y2: String(y2),
      stroke: color,
      "stroke-width": "1.6",
      "marker-end": "url(#arrowhead)",
      class: "edge",
    }),
  );
}

/** Clear `group` and draw the structure into it. */
export function renderStructure(
  group: SVGGElement,
  structure: StructureJson,
  points: Point[],
  opts: BoardOptions,
): void {
  group.replaceChildren();
  const relationNames = structure.signature.map(([name]) => name);

  const edges = svgEl("g", { class: "edges" });
  group.appendChild(edges);
  relationNames.forEach((name, relIndex) => {
    const rows = structure.relations[name] ?? [];
    const color = EDGE_PALETTE[relIndex % EDGE_PALETTE.length];
    for (const row of rows) {
      if (row.length === 2) {
        drawEdge(edges, points[row[0]], points[row[1]], color, relIndex);
      } else if (row.length === 1) {
        // Unary mark: a colored ring around the node.
        const p = points[row[0]];
        edges.appendChild(
          svgEl("circle", {
            cx: String(p.x),
            cy: String(p.y),
            r: String(18 + 3 * relIndex),
            fill: "none",
            stroke: color,
            "stroke-width": "1.4",
            "stroke-dasharray": "3 2",
            class: "unary-mark",
          }),
        );
      }
      // Higher arities are listed in the relation legend only.
    }
  });

  const nodes = svgEl("g", { class: "nodes" });
  group.appendChild(nodes);
  for (let element = 0; element < structure.universe; element += 1) {
    const p = points[element];
    const node = svgEl("g", {
      class: `node${opts.clickable ? " clickable" : ""}`,
      "data-panel": opts.panel,
      "data-element": String(element),
    });
    if (opts.highlight.includes(element)) {
      node.appendChild(
        svgEl("circle", {
          cx: String(p.x),
          cy: String(p.y),
          r: "19",
          class: "halo",
        }),
      );
    }
    const selectedAt = occurrences(opts.selection, element);
    node.appendChild(
      svgEl("circle", {
        cx: String(p.x),
        cy: String(p.y),
        r: "13",
        class: `node-circle${selectedAt.length > 0 ? " selected" : ""}`,
      }),
    );
    const label = svgEl("text", {
      x: String(p.x),
      y: String(p.y + 4),
      "text-anchor": "middle",
      class: "node-label",
    });
    label.textContent = String(element);
    node.appendChild(label);

    const pinnedAt = occurrences(opts.pinned, element);
    if (pinnedAt.length > 0) {
      const pin = svgEl("text", {
        x: String(p.x),
        y: String(p.y - 18),
        "text-anchor": "middle",
        class: "pin-label",
        fill: PIN_PALETTE[pinnedAt[0] % PIN_PALETTE.length],
      });
      pin.textContent = pinnedAt.map((i) => `#${i}`).join(",");
      node.appendChild(pin);
    }
    if (selectedAt.length > 0) {
      const order = svgEl("text", {
        x: String(p.x),
        y: String(p.y + 28),
        "text-anchor": "middle",
        class: "selection-label",
      });
      order.textContent = selectedAt.map((i) => String(i + 1)).join(",");
      node.appendChild(order);
    }
    if (opts.onElementClick) {
      // Attach on both boards: clicks on the inactive one surface a reason.
      const handler = opts.onElementClick;
      node.addEventListener("click", () => handler(element));
    }
    nodes.appendChild(node);
  }
}

/** Dashed lines joining pinned pairs index-by-index across the two boards. */
export function renderPairingLines(
  group: SVGGElement,
  leftPoints: Point[],
  leftTuple: number[],
  leftOffset: Point,
  rightPoints: Point[],
  rightTuple: number[],
  rightOffset: Point,
): void {
  group.replaceChildren();
  const pairs = Math.min(leftTuple.length, rightTuple.length);
  for (let i = 0; i < pairs; i += 1) {
    const a = leftPoints[leftTuple[i]];
    const b = rightPoints[rightTuple[i]];
    group.appendChild(
      svgEl("line", {
        x1: String(a.x + leftOffset.x),
        y1: String(a.y + leftOffset.y),
        x2: String(b.x + rightOffset.x),
        y2: String(b.y + rightOffset.y),
        stroke: PIN_PALETTE[i % PIN_PALETTE.length],
        "stroke-width": "1.2",
        "stroke-dasharray": "5 4",
        "data-pair-index": String(i),
        class: "pairing-line",
      }),
    );
  }
}
