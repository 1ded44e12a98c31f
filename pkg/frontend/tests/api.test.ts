import { describe, expect, it } from 'vitest';

import { ApiClient, ApiError } from '../src/api.js';
import { FakeServer } from './support/fakeServer.js';

describe('ApiClient', () => {
  it('fetches the model with its version token', async () => {
    const server = new FakeServer();
    const client = new ApiClient(server.fetch);
    const model = await client.getModel();
    expect(model.name).toBe('Company Model');
    expect(model.objects).toHaveLength(6);
    expect(model.version).toBe(0);
  });

  it('surfaces the service error code and detail', async () => {
    const server = new FakeServer();
    const client = new ApiClient(server.fetch);
    // terminal (o6) to grandparent platoon (o2) is outside the rule
    const attempt = client.createConnection('i6', 'i2');
    await expect(attempt).rejects.toBeInstanceOf(ApiError);
    await expect(attempt).rejects.toMatchObject({ status: 422, code: 'illegal-connection' });
  });

  it('sends the version as an If-Match header and reports conflicts', async () => {
    const server = new FakeServer();
    const client = new ApiClient(server.fetch);
    await client.createObject('root', 'network', 'HQ', 0); // bumps server to v1
    const stale = client.createObject('root', 'network', 'HQ2', 0);
    await expect(stale).rejects.toMatchObject({ status: 409, code: 'conflict' });
  });

  it('parses a JSONL run log into records', async () => {
    const server = new FakeServer();
    server.model.scenarios.push({
      name: 'drill',
      duration: 600,
      seed: 1,
      resources: [],
      tasks: [
        {
          source: 'o6',
          destination: 'o1',
          label: 'position',
          start: 0,
          repeats: 3,
          interval_mean: 60,
          interval_sigma: 0,
          routed: true,
          request_ack: false,
        },
      ],
      services: [],
    });
    const client = new ApiClient(server.fetch);
    const handle = await client.startRun('drill', 7);
    const done = await client.waitForRun(handle.run_id);
    expect(done.status).toBe('done');
    const records = await client.getRunLog(handle.run_id);
    expect(records.filter((r) => r.kind === 'sent')).toHaveLength(4);
    expect(records.every((r) => typeof r.time === 'number')).toBe(true);
  });

  it('404s on unknown scenario names', async () => {
    const server = new FakeServer();
    const client = new ApiClient(server.fetch);
    await expect(client.startRun('nope')).rejects.toMatchObject({ status: 404 });
  });
});
