// Editor state: the server's model plus client-local view state (layout,
// roll-up, selection).  The server stays authoritative — every mutation
// round-trips through the API and re-fetches the model, so a reload
// reconstructs the identical view from GET /model plus stored layout.

import { ApiClient, ApiError } from './api.js';
import {
  defaultLayout,
  loadStoredLayout,
  Point,
  saveStoredLayout,
  StorageLike,
} from './layout.js';
import type { ModelJson, ObjectJson, ObjectKind, ScenarioJson } from './types.js';

export type WireClass = 'hierarchy' | 'connection' | 'pending';

export interface WireView {
  id: string;
  cls: WireClass;
  from: string; // glyph (object) id
  to: string;
  reason?: string; // populated on a refused pending wire
}

export interface NodeView {
  id: string;
  name: string;
  kind: ObjectKind;
  position: Point;
  collapsed: boolean;
  hiddenChildren: number;
}

export interface SurfacedError {
  code: string;
  detail: string;
  at?: { from: string; to: string };
}

const memoryStorage = (): StorageLike => {
  const bag = new Map<string, string>();
  return {
    getItem: (key) => bag.get(key) ?? null,
    setItem: (key, value) => void bag.set(key, value),
  };
};

export class EditorStore {
  readonly api: ApiClient;
  private readonly storage: StorageLike;

  model: ModelJson | null = null;
  version = 0;
  positions = new Map<string, Point>();
  collapsed = new Set<string>();
  selection: string | null = null;
  lastError: SurfacedError | null = null;
  conflict = false; // a stale version token was rejected; prompt a reload

  constructor(api: ApiClient, storage?: StorageLike) {
    this.api = api;
    this.storage = storage ?? memoryStorage();
  }

  // -- loading -------------------------------------------------------------

  async load(): Promise<void> {
    const model = await this.api.getModel();
    this.model = model;
    this.version = model.version ?? 0;
    this.conflict = false;
    const stored = loadStoredLayout(this.storage, model.name);
    const fresh = defaultLayout(model);
    const positions = new Map<string, Point>();
    for (const obj of model.objects) {
      positions.set(obj.id, stored.positions.get(obj.id) ?? fresh.get(obj.id)!);
    }
    this.positions = positions;
    this.collapsed = new Set(
      [...stored.collapsed].filter((id) => model.objects.some((o) => o.id === id)),
    );
    if (this.selection && !model.objects.some((o) => o.id === this.selection)) {
      this.selection = null;
    }
  }

  private persistLayout(): void {
    if (this.model) {
      saveStoredLayout(this.storage, this.model.name, this.positions, this.collapsed);
    }
  }

  private async mutate<T>(action: () => Promise<T>): Promise<T | null> {
    this.lastError = null;
    try {
      const result = await action();
      await this.load(); // re-sync model and version; the server is authoritative
      return result;
    } catch (error) {
      if (error instanceof ApiError) {
        if (error.status === 409) {
          this.conflict = true;
        }
        this.lastError = { code: error.code, detail: error.message };
        return null;
      }
      throw error;
    }
  }

  // -- lookups ----------------------------------------------------------------

  object(id: string): ObjectJson | undefined {
    return this.model?.objects.find((o) => o.id === id);
  }

  interfaceOwner(interfaceId: string): ObjectJson | undefined {
    return this.model?.objects.find((o) => o.interfaces.some((i) => i.id === interfaceId));
  }

  defaultInterface(objectId: string): string | null {
    const obj = this.object(objectId);
    if (!obj) return null;
    const preferred = obj.interfaces.find((i) => i.name === 'default') ?? obj.interfaces[0];
    return preferred ? preferred.id : null;
  }

  /** Nearest visible ancestor: the object itself, or the outermost collapsed
   * composite hiding it. */
  glyphFor(objectId: string): string {
    let current = this.object(objectId);
    let glyph = objectId;
    while (current && current.parent !== 'root') {
      const parent = this.object(current.parent);
      if (!parent) break;
      if (this.collapsed.has(parent.id)) glyph = parent.id;
      current = parent;
    }
    return glyph;
  }

  private isHidden(objectId: string): boolean {
    return this.glyphFor(objectId) !== objectId;
  }

  // -- view derivation -----------------------------------------------------------

  visibleNodes(): NodeView[] {
    if (!this.model) return [];
    const nodes: NodeView[] = [];
    for (const obj of this.model.objects) {
      if (this.isHidden(obj.id)) continue;
      const descendants = this.subtreeIds(obj.id).length - 1;
      nodes.push({
        id: obj.id,
        name: obj.name,
        kind: obj.kind,
        position: this.positions.get(obj.id) ?? { x: 0, y: 0 },
        collapsed: this.collapsed.has(obj.id),
        hiddenChildren: this.collapsed.has(obj.id) ? descendants : 0,
      });
    }
    return nodes;
  }

  /** Hierarchy and network wires between visible glyphs; wires interior to a
   * rolled-up composite disappear, external ones re-route to its glyph. */
  visibleWires(): WireView[] {
    if (!this.model) return [];
    const wires: WireView[] = [];
    for (const obj of this.model.objects) {
      if (obj.parent === 'root') continue;
      const from = this.glyphFor(obj.parent);
      const to = this.glyphFor(obj.id);
      if (from !== to) {
        wires.push({ id: `h-${obj.id}`, cls: 'hierarchy', from, to });
      }
    }
    for (const conn of this.model.connections) {
      const a = this.interfaceOwner(conn.a_interface);
      const b = this.interfaceOwner(conn.b_interface);
      if (!a || !b) continue;
      const from = this.glyphFor(a.id);
      const to = this.glyphFor(b.id);
      if (from !== to) {
        wires.push({ id: conn.id, cls: 'connection', from, to });
      }
    }
    return wires;
  }

  subtreeIds(objectId: string): string[] {
    const obj = this.object(objectId);
    if (!obj) return [];
    const out = [objectId];
    for (const child of obj.children) out.push(...this.subtreeIds(child));
    return out;
  }

  // -- gestures / mutations ---------------------------------------------------------

  moveNode(objectId: string, position: Point): void {
    this.positions.set(objectId, position);
    this.persistLayout();
  }

  toggleRollup(objectId: string): void {
    const obj = this.object(objectId);
    if (!obj || obj.kind !== 'composite') return;
    if (this.collapsed.has(objectId)) {
      this.collapsed.delete(objectId);
    } else {
      this.collapsed.add(objectId);
    }
    this.persistLayout();
  }

  /** Drag-to-connect: link two glyphs through their default interfaces.
   * A refusal surfaces the server's rule code on lastError. */
  async connectObjects(fromId: string, toId: string): Promise<boolean> {
    const a = this.defaultInterface(fromId);
    const b = this.defaultInterface(toId);
    if (!a || !b) {
      this.lastError = { code: 'not-found', detail: 'missing interface' };
      return false;
    }
    const result = await this.mutate(() =>
      this.api.createConnection(a, b, this.version),
    );
    if (result === null && this.lastError) {
      this.lastError.at = { from: fromId, to: toId };
    }
    return result !== null;
  }

  /** Drag-to-parent: create a child under a composite glyph. */
  async addChild(parentId: string, kind: ObjectKind, name: string): Promise<string | null> {
    const created = await this.mutate(() =>
      this.api.createObject(parentId, kind, name, this.version),
    );
    return created ? created.id : null;
  }

  async duplicate(objectId: string): Promise<string | null> {
    const copied = await this.mutate(() => this.api.copyObject(objectId, this.version));
    return copied ? copied.id : null;
  }

  async remove(objectId: string): Promise<boolean> {
    const ok = await this.mutate(() => this.api.deleteObject(objectId, this.version));
    if (this.selection === objectId) this.selection = null;
    return ok !== null;
  }

  // -- scenario cockpit ---------------------------------------------------------------

  scenario(name: string): ScenarioJson | undefined {
    return this.model?.scenarios.find((s) => s.name === name);
  }

  /** Replace the whole model with an edited scenario list (the service
   * re-validates everything server-side). */
  async saveScenarios(scenarios: ScenarioJson[]): Promise<boolean> {
    if (!this.model) return false;
    const payload: ModelJson = { ...this.model, scenarios };
    const result = await this.mutate(() => this.api.putModel(payload, this.version));
    return result !== null;
  }

  async upsertScenario(spec: ScenarioJson): Promise<boolean> {
    if (!this.model) return false;
    const rest = this.model.scenarios.filter((s) => s.name !== spec.name);
    return this.saveScenarios([...rest, spec]);
  }
}
