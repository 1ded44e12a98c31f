// Thin typed client for the model service. The fetch implementation is
// injectable so tests can run against an in-memory fake server.

import type { LogRecordJson, ModelJson, RunHandle } from './types.js';

export interface FetchResponseLike {
  status: number;
  text(): Promise<string>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<FetchResponseLike>;

/** Request failure carrying the service's machine-readable rule code. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly violations: string[];

  constructor(status: number, code: string, detail: string, violations: string[] = []) {
    super(detail || code);
    this.status = status;
    this.code = code;
    this.violations = violations;
  }
}

export class ApiClient {
  private readonly fetchImpl: FetchLike;
  readonly base: string;

  constructor(fetchImpl: FetchLike, base = '') {
    this.fetchImpl = fetchImpl;
    this.base = base;
  }

  private async requestText(
    method: string,
    path: string,
    body?: unknown,
    version?: number,
  ): Promise<string> {
    const headers: Record<string, string> = {};
    let payload: string | undefined;
    if (body !== undefined) {
      headers['content-type'] = 'application/json';
      payload = JSON.stringify(body);
    }
    if (version !== undefined) {
      headers['if-match'] = String(version);
    }
    const response = await this.fetchImpl(this.base + path, { method, headers, body: payload });
    const text = await response.text();
    if (response.status >= 400) {
      let err: { error?: string; detail?: string; violations?: string[] } = {};
      try {
        err = JSON.parse(text) as typeof err;
      } catch {
        err = { detail: text };
      }
      throw new ApiError(
        response.status,
        err.error ?? `http-${response.status}`,
        err.detail ?? '',
        err.violations ?? [],
      );
    }
    return text;
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
    version?: number,
  ): Promise<unknown> {
    const text = await this.requestText(method, path, body, version);
    if (!text) return null;
    try {
      return JSON.parse(text);
    } catch {
      return text;
    }
  }

  async getModel(): Promise<ModelJson> {
    return (await this.request('GET', '/model')) as ModelJson;
  }

  async putModel(model: ModelJson, version?: number): Promise<number> {
    const body = (await this.request('PUT', '/model', model, version)) as { version: number };
    return body.version;
  }

  async createObject(
    parent: string,
    kind: string,
    name: string,
    version?: number,
  ): Promise<{ id: string; name: string }> {
    return (await this.request('POST', '/objects', { parent, kind, name }, version)) as {
      id: string;
      name: string;
    };
  }

  async createConnection(
    aInterface: string,
    bInterface: string,
    version?: number,
  ): Promise<{ id: string }> {
    return (await this.request(
      'POST',
      '/connections',
      { a_interface: aInterface, b_interface: bInterface },
      version,
    )) as { id: string };
  }

  async copyObject(
    objectId: string,
    version?: number,
  ): Promise<{ id: string; name: string; objects: number; connections: number }> {
    return (await this.request('POST', `/objects/${objectId}/copy`, undefined, version)) as {
      id: string;
      name: string;
      objects: number;
      connections: number;
    };
  }

  async deleteObject(objectId: string, version?: number): Promise<void> {
    await this.request('DELETE', `/objects/${objectId}`, undefined, version);
  }

  async startRun(scenario: string, seed?: number, duration?: number): Promise<RunHandle> {
    return (await this.request('POST', '/runs', { scenario, seed, duration })) as RunHandle;
  }

  async getRun(runId: string): Promise<RunHandle> {
    return (await this.request('GET', `/runs/${runId}`)) as RunHandle;
  }

  async waitForRun(runId: string, pollMs = 50, timeoutMs = 30_000): Promise<RunHandle> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const handle = await this.getRun(runId);
      if (handle.status === 'done' || handle.status === 'failed') return handle;
      if (Date.now() > deadline) throw new ApiError(408, 'timeout', `run ${runId} did not finish`);
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }

  async getRunLog(runId: string): Promise<LogRecordJson[]> {
    const raw = await this.requestText('GET', `/runs/${runId}/log?format=jsonl`);
    return raw
      .split('\n')
      .filter((line) => line.trim().length > 0)
      .map((line) => JSON.parse(line) as LogRecordJson);
  }
}
