/** Deterministic circular layout: one circle per connected component, components on a grid. */

import type { StructureJson } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

/** Connected components of the union of all relation rows, sorted by least element. */
export function components(structure: StructureJson): number[][] {
  const parent = Array.from({ length: structure.universe }, (_, i) => i);
  const find = (a: number): number => {
    while (parent[a] !== a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  const union = (a: number, b: number): void => {
    const ra = find(a);
    const rb = find(b);
    if (ra !== rb) parent[Math.max(ra, rb)] = Math.min(ra, rb);
  };
  for (const rows of Object.values(structure.relations)) {
    for (const row of rows) {
      for (let i = 1; i < row.length; i += 1) union(row[i - 1], row[i]);
    }
  }
  const groups = new Map<number, number[]>();
  for (let e = 0; e < structure.universe; e += 1) {
    const root = find(e);
    const group = groups.get(root);
    if (group) group.push(e);
    else groups.set(root, [e]);
  }
  return [...groups.values()]
    .map((g) => g.sort((a, b) => a - b))
    .sort((a, b) => a[0] - b[0]);
}

/**
 * Positions for every element of the structure inside a width x height box.
 *
 * Each component's elements sit on a circle in ascending-id order starting at
 * twelve o'clock; component circles occupy the cells of a near-square grid in
 * component order. The result depends only on the structure and the box, so
 * the same input always renders identically.
 */
export function circularLayout(
  structure: StructureJson,
  width: number,
  height: number,
  margin = 26,
): Point[] {
  const points: Point[] = Array.from({ length: structure.universe }, () => ({ x: 0, y: 0 }));
  const groups = components(structure);
  if (groups.length === 0) return points;
  const cols = Math.ceil(Math.sqrt(groups.length));
  const rowsCount = Math.ceil(groups.length / cols);
  const cellW = width / cols;
  const cellH = height / rowsCount;
  groups.forEach((group, index) => {
    const cx = (index % cols) * cellW + cellW / 2;
    const cy = Math.floor(index / cols) * cellH + cellH / 2;
    if (group.length === 1) {
      points[group[0]] = { x: cx, y: cy };
      return;
    }
    const radius = Math.max(10, Math.min(cellW, cellH) / 2 - margin);
    group.forEach((element, k) => {
      const angle = -Math.PI / 2 + (2 * Math.PI * k) / group.length;
      points[element] = {
        x: cx + radius * Math.cos(angle),
        y: cy + radius * Math.sin(angle),
      };
    });
  });
  return points;
}
