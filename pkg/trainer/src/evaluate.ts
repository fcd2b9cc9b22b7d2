/**
 * Paired evaluation: trained policy vs the rule-based baseline on identical
 * episode seeds, driven through the environment protocol.
 *
 *   node dist/evaluate.js --policy runs/exp1/policy.json
 *        [--nodes 10,15,20] [--episodes 100] [--epsilon 0.05] [--out eval.csv]
 */

import fs from 'node:fs';
import path from 'node:path';

import { EnvClient } from './envClient.js';
import { Mlp, mulberry32, softmax2 } from './mlp.js';
import { fromWeightDocument } from './weightsIO.js';

export interface EvalRow {
  policy: string;
  nodes: number;
  episodes: number;
  goodput: number;
  overhead: number;
  broadcastRate: number;
}

type Decide = (obs: number[], cbest: number, rand: () => number) => 0 | 1;

async function runEpisodes(env: EnvClient, decide: Decide, nodes: number,
                           episodes: number, baseSeed: number,
                           trafficSlots: number): Promise<EvalRow> {
  let goodput = 0;
  let overhead = 0;
  let overheadCount = 0;
  let bcRate = 0;
  for (let ep = 0; ep < episodes; ep++) {
    const rand = mulberry32(baseSeed + ep * 7919 + 1);
    let response = await env.reset({
      seed: baseSeed + ep,
      node_count: nodes,
      traffic_slots: trafficSlots,
      flows: [{ source: 0, destination: nodes - 1, packets_per_slot: 1.0 }],
    });
    let done = false;
    let info: Record<string, unknown> = {};
    while (!done) {
      const actions: Record<string, 0 | 1> = {};
      for (const agent of Object.keys(response.obs).sort((a, b) => Number(a) - Number(b))) {
        actions[agent] = decide(response.obs[agent], response.cbest[agent], rand);
      }
      const stepResponse = await env.step(actions);
      done = stepResponse.done;
      info = stepResponse.info;
      response = stepResponse;
    }
    goodput += info.goodput as number;
    if (info.overhead !== null) {
      overhead += info.overhead as number;
      overheadCount += 1;
    }
    bcRate += info.broadcast_rate as number;
  }
  return {
    policy: '', nodes, episodes,
    goodput: goodput / episodes,
    overhead: overheadCount ? overhead / overheadCount : NaN,
    broadcastRate: bcRate / episodes,
  };
}

export function neuralDecider(policy: Mlp): Decide {
  return (obs, _cbest, rand) => {
    const [, pBroadcast] = softmax2(policy.forward(obs));
    return rand() < pBroadcast ? 1 : 0;
  };
}

export function cqPlusDecider(epsilon: number): Decide {
  return (_obs, cbest, rand) => (rand() < 1 - cbest * (1 - epsilon) ? 1 : 0);
}

export async function evaluate(policyFile: string, nodes: number[], episodes: number,
                               epsilon: number, baseSeed: number, trafficSlots: number,
                               pythonBin?: string): Promise<EvalRow[]> {
  const policy = fromWeightDocument(JSON.parse(fs.readFileSync(policyFile, 'utf-8')));
  const env = new EnvClient(pythonBin);
  const rows: EvalRow[] = [];
  try {
    for (const n of nodes) {
      const trained = await runEpisodes(env, neuralDecider(policy), n, episodes,
        baseSeed, trafficSlots);
      rows.push({ ...trained, policy: 'neural' });
      const baseline = await runEpisodes(env, cqPlusDecider(epsilon), n, episodes,
        baseSeed, trafficSlots);
      rows.push({ ...baseline, policy: 'cq_plus' });
    }
  } finally {
    await env.close();
  }
  return rows;
}

const isMain = process.argv[1] &&
  path.resolve(process.argv[1]).replace(/\.ts$/, '.js').endsWith('evaluate.js');
if (isMain) {
  const argv = process.argv.slice(2);
  const get = (flag: string, dflt: string) => {
    const i = argv.indexOf(flag);
    return i >= 0 ? argv[i + 1] : dflt;
  };
  const policyFile = get('--policy', '');
  if (!policyFile) {
    console.error('--policy POLICY.json required');
    process.exit(2);
  }
  const nodes = get('--nodes', '10,15,20').split(',').map(Number);
  const episodes = Number(get('--episodes', '100'));
  const epsilon = Number(get('--epsilon', '0.05'));
  const seed = Number(get('--seed', '1'));
  const slots = Number(get('--traffic-slots', '3000'));
  const out = get('--out', '');
  evaluate(policyFile, nodes, episodes, epsilon, seed, slots).then((rows) => {
    const lines = ['policy,nodes,episodes,goodput,overhead,broadcast_rate'];
    for (const r of rows) {
      lines.push(`${r.policy},${r.nodes},${r.episodes},${r.goodput},${r.overhead},${r.broadcastRate}`);
    }
    const text = lines.join('\n') + '\n';
    if (out) fs.writeFileSync(out, text);
    else process.stdout.write(text);
  }).catch((err) => {
    console.error(err);
    process.exit(1);
  });
}
