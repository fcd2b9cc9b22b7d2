import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { EnvClient } from '../src/envClient.js';

const TINY = {
  seed: 3,
  node_count: 5,
  traffic_slots: 30,
  flows: [{ source: 0, destination: 4, packets_per_slot: 1.0 }],
};

describe('environment client', () => {
  let env: EnvClient;

  beforeAll(() => {
    env = new EnvClient();
  });

  afterAll(async () => {
    await env.close();
  });

  it('reset returns the first decision batch', async () => {
    const out = await env.reset(TINY);
    expect(out.slot).toBe(1);
    expect(Object.keys(out.obs)).toEqual(['0']);
    expect(out.obs['0']).toHaveLength(18);
    expect(out.cbest['0']).toBe(0);
  });

  it('reset is deterministic per seed', async () => {
    const a = await env.reset(TINY);
    const b = await env.reset(TINY);
    expect(b).toEqual(a);
  });

  it('floods a connected static line to full delivery', async () => {
    let out = await env.reset({
      ...TINY,
      node_count: 3,
      flows: [{ source: 0, destination: 2, packets_per_slot: 1.0 }],
      mobility: {
        model: 'static',
        region_layout: 'uniform',
        initial_positions: [[0, 0], [100, 0], [200, 0]],
      },
      channel: { falloff_m: 1e-6, ack_lossless: true },
    });
    let done = false;
    let rounds = 0;
    let info: Record<string, unknown> = {};
    while (!done) {
      const actions: Record<string, 0 | 1> = {};
      for (const agent of Object.keys(out.obs)) actions[agent] = 1;
      const step = await env.step(actions);
      done = step.done;
      info = step.info;
      out = step;
      rounds += 1;
      expect(rounds).toBeLessThan(500);
    }
    expect(info.generated).toBe(30);
    expect(info.goodput).toBe(1.0);
  });

  it('protocol errors reject but keep the session alive', async () => {
    const out = await env.reset(TINY);
    await expect(env.step({ '99': 1 })).rejects.toThrow(/env error/);
    const actions: Record<string, 0 | 1> = {};
    for (const agent of Object.keys(out.obs)) actions[agent] = 0;
    const step = await env.step(actions);
    expect(step).toHaveProperty('rewards');
  });
});
