// Client-local node layout: tidy-tree defaults plus per-model persistence.
// Positions are never sent to the server; they live in browser storage
// keyed by the model name.

import type { ModelJson, ObjectJson } from './types.js';

export interface Point {
  x: number;
  y: number;
}

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export const NODE_WIDTH = 132;
export const NODE_HEIGHT = 40;
const H_GAP = 28;
const V_GAP = 78;

/** Depth-first tidy layout: leaves get consecutive slots, parents centre
 * over their children, depth maps to rows. */
export function defaultLayout(model: ModelJson): Map<string, Point> {
  const byId = new Map(model.objects.map((o) => [o.id, o]));
  const roots = model.objects.filter((o) => o.parent === 'root');
  const positions = new Map<string, Point>();
  let cursor = 0;

  const place = (node: ObjectJson, depth: number): number => {
    const children = node.children
      .map((id) => byId.get(id))
      .filter((c): c is ObjectJson => c !== undefined);
    let x: number;
    if (children.length === 0) {
      x = cursor;
      cursor += NODE_WIDTH + H_GAP;
    } else {
      const xs = children.map((child) => place(child, depth + 1));
      x = (Math.min(...xs) + Math.max(...xs)) / 2;
    }
    positions.set(node.id, { x: x + 20, y: depth * V_GAP + 20 });
    return x;
  };

  for (const root of roots) {
    place(root, 0);
    cursor += H_GAP;
  }
  return positions;
}

interface StoredLayout {
  positions: Record<string, Point>;
  collapsed: string[];
}

const keyFor = (modelName: string) => `model-studio/layout/${modelName}`;

export function loadStoredLayout(
  storage: StorageLike,
  modelName: string,
): { positions: Map<string, Point>; collapsed: Set<string> } {
  const raw = storage.getItem(keyFor(modelName));
  if (!raw) return { positions: new Map(), collapsed: new Set() };
  try {
    const parsed = JSON.parse(raw) as StoredLayout;
    return {
      positions: new Map(Object.entries(parsed.positions ?? {})),
      collapsed: new Set(parsed.collapsed ?? []),
    };
  } catch {
    return { positions: new Map(), collapsed: new Set() };
  }
}

export function saveStoredLayout(
  storage: StorageLike,
  modelName: string,
  positions: Map<string, Point>,
  collapsed: Set<string>,
): void {
  const stored: StoredLayout = {
    positions: Object.fromEntries(positions),
    collapsed: [...collapsed],
  };
  storage.setItem(keyFor(modelName), JSON.stringify(stored));
}
