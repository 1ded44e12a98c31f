// Browser entry point: SVG node-graph editor plus the scenario cockpit.
// All authoritative state lives on the server; this file only wires DOM
// events to the store and renders its derived views.

import { ApiClient } from './api.js';
import { chartGeometry, deliverySeries, maxDelivery, Series } from './chart.js';
import { NODE_HEIGHT, NODE_WIDTH } from './layout.js';
import { EditorStore } from './store.js';
import type { ObjectKind, ScenarioJson } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

const api = new ApiClient((url, init) => fetch(url, init), '');
const store = new EditorStore(api, window.localStorage);

const canvas = document.getElementById('canvas') as unknown as SVGSVGElement;
const wireLayer = document.getElementById('wires') as unknown as SVGGElement;
const nodeLayer = document.getElementById('nodes') as unknown as SVGGElement;
const statusBar = document.getElementById('status') as HTMLElement;
const conflictBanner = document.getElementById('conflict') as HTMLElement;
const chartHost = document.getElementById('chart') as HTMLElement;
const legendHost = document.getElementById('legend') as HTMLElement;
const runsHost = document.getElementById('runs') as HTMLElement;

interface PendingWire {
  from: string;
  x: number;
  y: number;
  targetId: string | null;
}

let pending: PendingWire | null = null;
let dragging: { id: string; dx: number; dy: number } | null = null;
let overlays: Series[] = [];
let runCounter = 0;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

function centre(id: string): { x: number; y: number } {
  const position = store.positions.get(id) ?? { x: 0, y: 0 };
  return { x: position.x + NODE_WIDTH / 2, y: position.y + NODE_HEIGHT / 2 };
}

function canvasPoint(event: PointerEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return { x: event.clientX - rect.left, y: event.clientY - rect.top };
}

// -- canvas rendering ---------------------------------------------------------

function renderCanvas(): void {
  wireLayer.replaceChildren();
  nodeLayer.replaceChildren();

  for (const wire of store.visibleWires()) {
    const a = centre(wire.from);
    const b = centre(wire.to);
    wireLayer.appendChild(
      svgEl('line', {
        x1: String(a.x),
        y1: String(a.y),
        x2: String(b.x),
        y2: String(b.y),
        class: `wire ${wire.cls}`,
      }),
    );
  }
  if (pending) {
    const a = centre(pending.from);
    wireLayer.appendChild(
      svgEl('line', {
        x1: String(a.x),
        y1: String(a.y),
        x2: String(pending.x),
        y2: String(pending.y),
        class: 'wire pending',
      }),
    );
  }
  const error = store.lastError;
  if (error && error.at) {
    const a = centre(error.at.from);
    const b = centre(error.at.to);
    const label = svgEl('text', {
      x: String((a.x + b.x) / 2),
      y: String((a.y + b.y) / 2 - 6),
      class: 'wire-error',
    });
    label.textContent = error.code;
    wireLayer.appendChild(label);
  }

  for (const node of store.visibleNodes()) {
    const group = svgEl('g', {
      class:
        `node ${node.kind}` +
        (store.selection === node.id ? ' selected' : '') +
        (node.collapsed ? ' collapsed' : ''),
      transform: `translate(${node.position.x},${node.position.y})`,
      'data-id': node.id,
    });
    group.appendChild(
      svgEl('rect', { width: String(NODE_WIDTH), height: String(NODE_HEIGHT), rx: '7' }),
    );
    const title = svgEl('text', { x: '10', y: '17', class: 'name' });
    title.textContent = node.name;
    group.appendChild(title);
    const sub = svgEl('text', { x: '10', y: '31', class: 'kind' });
    sub.textContent = node.collapsed ? `${node.kind} (+${node.hiddenChildren} hidden)` : node.kind;
    group.appendChild(sub);
    const port = svgEl('circle', {
      cx: String(NODE_WIDTH),
      cy: String(NODE_HEIGHT / 2),
      r: '6',
      class: 'port',
      'data-port': node.id,
    });
    group.appendChild(port);
    nodeLayer.appendChild(group);
  }
}

function nodeIdAt(target: EventTarget | null): string | null {
  let element = target as Element | null;
  while (element && element !== canvas) {
    const id = element.getAttribute?.('data-id');
    if (id) return id;
    element = element.parentElement;
  }
  return null;
}

canvas.addEventListener('pointerdown', (event) => {
  const portId = (event.target as Element).getAttribute?.('data-port');
  const point = canvasPoint(event);
  if (portId) {
    pending = { from: portId, x: point.x, y: point.y, targetId: null };
    canvas.setPointerCapture(event.pointerId);
    renderAll();
    return;
  }
  const id = nodeIdAt(event.target);
  if (id) {
    store.selection = id;
    const position = store.positions.get(id)!;
    dragging = { id, dx: point.x - position.x, dy: point.y - position.y };
    canvas.setPointerCapture(event.pointerId);
  } else {
    store.selection = null;
  }
  renderAll();
});

canvas.addEventListener('pointermove', (event) => {
  const point = canvasPoint(event);
  if (pending) {
    pending.x = point.x;
    pending.y = point.y;
    pending.targetId = nodeIdAt(document.elementFromPoint(event.clientX, event.clientY));
    renderCanvas();
  } else if (dragging) {
    store.moveNode(dragging.id, { x: point.x - dragging.dx, y: point.y - dragging.dy });
    renderCanvas();
  }
});

canvas.addEventListener('pointerup', async (event) => {
  if (pending) {
    const target = nodeIdAt(document.elementFromPoint(event.clientX, event.clientY));
    const from = pending.from;
    pending = null;
    if (target && target !== from) {
      await store.connectObjects(from, target);
    }
    renderAll();
  }
  dragging = null;
});

// -- toolbar ---------------------------------------------------------------------

function toolbarHandlers(): void {
  (document.getElementById('add-child') as HTMLButtonElement).onclick = async () => {
    const parent = store.selection ?? 'root';
    const kind = (document.getElementById('new-kind') as HTMLSelectElement).value as ObjectKind;
    const name = (document.getElementById('new-name') as HTMLInputElement).value || 'Node';
    await store.addChild(parent, kind, name);
    renderAll();
  };
  (document.getElementById('duplicate') as HTMLButtonElement).onclick = async () => {
    if (store.selection) await store.duplicate(store.selection);
    renderAll();
  };
  (document.getElementById('rollup') as HTMLButtonElement).onclick = () => {
    if (store.selection) store.toggleRollup(store.selection);
    renderAll();
  };
  (document.getElementById('delete') as HTMLButtonElement).onclick = async () => {
    if (store.selection) await store.remove(store.selection);
    renderAll();
  };
  (document.getElementById('reload') as HTMLButtonElement).onclick = async () => {
    await store.load();
    renderAll();
  };
}

// -- scenario cockpit ---------------------------------------------------------------

function currentScenarioName(): string {
  return (document.getElementById('scenario-select') as HTMLSelectElement).value;
}

function renderScenarioControls(): void {
  const select = document.getElementById('scenario-select') as HTMLSelectElement;
  const existing = select.value;
  select.replaceChildren();
  for (const spec of store.model?.scenarios ?? []) {
    select.appendChild(el('option', { value: spec.name }, spec.name));
  }
  if (existing && store.scenario(existing)) select.value = existing;
}

function scenarioForEdit(): ScenarioJson {
  const name = currentScenarioName() || 'scenario';
  return (
    store.scenario(name) ?? {
      name,
      duration: 3600,
      seed: 1,
      resources: [],
      tasks: [],
      services: [],
    }
  );
}

function cockpitHandlers(): void {
  (document.getElementById('attach-resource') as HTMLButtonElement).onclick = async () => {
    if (!store.selection) return setStatus('select an object first');
    const spec = scenarioForEdit();
    const capacity = Number((document.getElementById('res-capacity') as HTMLInputElement).value);
    const delay = Number((document.getElementById('res-delay') as HTMLInputElement).value);
    const resources = spec.resources.filter((r) => r.object !== store.selection);
    resources.push({ object: store.selection, capacity, delay });
    await store.upsertScenario({ ...spec, resources });
    renderAll();
  };
  (document.getElementById('attach-service') as HTMLButtonElement).onclick = async () => {
    if (!store.selection) return setStatus('select an object first');
    const spec = scenarioForEdit();
    const delay = Number((document.getElementById('svc-delay') as HTMLInputElement).value);
    const services = spec.services.filter((s) => s.object !== store.selection);
    services.push({ object: store.selection, kind: 'ack-responder', per_message_delay: delay });
    await store.upsertScenario({ ...spec, services });
    renderAll();
  };
  (document.getElementById('add-task') as HTMLButtonElement).onclick = async () => {
    const spec = scenarioForEdit();
    const source = (document.getElementById('task-source') as HTMLInputElement).value;
    const destination = (document.getElementById('task-dest') as HTMLInputElement).value;
    const label = (document.getElementById('task-label') as HTMLInputElement).value || 'traffic';
    const interval = Number((document.getElementById('task-interval') as HTMLInputElement).value);
    const repeats = Number((document.getElementById('task-repeats') as HTMLInputElement).value);
    const task = {
      source,
      destination,
      label,
      start: 0,
      repeats,
      interval_mean: interval,
      interval_sigma: 0,
      routed: true,
      request_ack: false,
    };
    await store.upsertScenario({ ...spec, tasks: [...spec.tasks, task] });
    renderAll();
  };
  (document.getElementById('run') as HTMLButtonElement).onclick = () => void launchRun();
  (document.getElementById('clear-runs') as HTMLButtonElement).onclick = () => {
    overlays = [];
    renderChart();
  };
}

async function launchRun(): Promise<void> {
  const scenarioName = currentScenarioName();
  if (!scenarioName) return setStatus('no scenario to run');
  const seedField = (document.getElementById('run-seed') as HTMLInputElement).value;
  const seed = seedField === '' ? undefined : Number(seedField);
  try {
    setStatus('running…');
    const handle = await api.startRun(scenarioName, seed);
    const done = await api.waitForRun(handle.run_id);
    if (done.status === 'failed') {
      setStatus(`run failed: ${done.error ?? 'unknown error'}`);
      return;
    }
    runCounter += 1;
    const records = await api.getRunLog(handle.run_id);
    const tag = `#${runCounter} ${scenarioName} seed ${done.seed}`;
    overlays = overlays.concat(deliverySeries(tag, records));
    const worst = [...maxDelivery(deliverySeries(tag, records)).entries()]
      .map(([label, value]) => `${label} max ${value.toFixed(2)}s`)
      .join(', ');
    setStatus(`run ${tag} done — ${worst || 'no deliveries'}`);
    renderChart();
    renderRuns(tag);
  } catch (error) {
    setStatus(`run failed: ${(error as Error).message}`);
  }
}

function renderRuns(latest?: string): void {
  if (latest) {
    runsHost.appendChild(el('div', { class: 'run-entry' }, latest));
  }
}

function renderChart(): void {
  chartHost.replaceChildren();
  legendHost.replaceChildren();
  if (overlays.length === 0) {
    chartHost.appendChild(el('p', { class: 'hint' }, 'no runs yet'));
    return;
  }
  const geometry = chartGeometry(overlays, chartHost.clientWidth || 640, 280);
  const svg = svgEl('svg', {
    viewBox: `0 0 ${geometry.width} ${geometry.height}`,
    class: 'chart-svg',
  });
  for (const tick of geometry.yTicks) {
    svg.appendChild(
      svgEl('line', {
        x1: '46',
        x2: String(geometry.width - 12),
        y1: String(tick.y),
        y2: String(tick.y),
        class: 'grid',
      }),
    );
    const label = svgEl('text', { x: '4', y: String(tick.y + 4), class: 'tick' });
    label.textContent = String(tick.value);
    svg.appendChild(label);
  }
  for (const tick of geometry.xTicks) {
    const label = svgEl('text', {
      x: String(tick.x),
      y: String(geometry.height - 6),
      class: 'tick',
    });
    label.textContent = String(tick.value);
    svg.appendChild(label);
  }
  for (const line of geometry.lines) {
    svg.appendChild(
      svgEl('polyline', { points: line.points, fill: 'none', stroke: line.color, class: 'series' }),
    );
    const item = el('span', { class: 'legend-item' }, `${line.run} · ${line.label}`);
    item.style.borderLeftColor = line.color;
    legendHost.appendChild(item);
  }
  chartHost.appendChild(svg);
}

// -- status / conflict ------------------------------------------------------------------

function setStatus(text: string): void {
  statusBar.textContent = text;
}

function renderStatus(): void {
  conflictBanner.style.display = store.conflict ? 'block' : 'none';
  if (store.lastError && !store.conflict) {
    setStatus(`${store.lastError.code}: ${store.lastError.detail}`);
  }
  const selected = store.selection ? store.object(store.selection) : null;
  const selectionLabel = document.getElementById('selection') as HTMLElement;
  selectionLabel.textContent = selected
    ? `${selected.name} (${selected.kind}, ${selected.id})`
    : 'nothing selected';
}

function renderAll(): void {
  renderCanvas();
  renderScenarioControls();
  renderStatus();
}

(document.getElementById('conflict-reload') as HTMLButtonElement).onclick = async () => {
  await store.load();
  renderAll();
};

async function start(): Promise<void> {
  toolbarHandlers();
  cockpitHandlers();
  await store.load();
  renderAll();
  renderChart();
  setStatus(`loaded ${store.model?.name ?? 'model'}`);
}

void start();
