/**
 * Multi-agent rollout collection with parameter sharing.
 *
 * Every node runs the same policy; their transitions are flattened into one
 * training stream.  A transition opens when an agent receives an observation
 * and acts, and closes at that agent's next observation (or episode end);
 * rewards arriving in between, delivery credits included, accumulate onto
 * the open transition.  Advantages use GAE over each agent's own decision
 * sequence within the episode.
 */

import { EnvClient } from './envClient.js';
import { computeGae } from './gae.js';
import { PpoLearner, Transition } from './ppo.js';
import { TrainConfig } from './config.js';

export interface EpisodeSummary {
  goodput: number;
  overhead: number | null;
  broadcastRate: number;
  steps: number;
  rewardMean: number;
}

export interface RolloutResult {
  transitions: Transition[];
  episodes: EpisodeSummary[];
  steps: number;
}

export function episodeOverrides(cfg: TrainConfig, rand: () => number, seed: number): object {
  const pick = <T>(xs: T[]) => xs[Math.floor(rand() * xs.length)];
  const nodes = pick(cfg.nodeCounts);
  const flows: { source: number; destination: number; packets_per_slot: number }[] = [
    { source: 0, destination: nodes - 1, packets_per_slot: 1.0 },
  ];
  const flowCount = pick(cfg.flowCounts);
  while (flows.length < flowCount) {
    const src = Math.floor(rand() * nodes);
    const dst = Math.floor(rand() * nodes);
    if (src !== dst) flows.push({ source: src, destination: dst, packets_per_slot: 1.0 });
  }
  const areaScale = pick(cfg.areaScales);
  return {
    seed,
    node_count: nodes,
    traffic_slots: cfg.trafficSlots,
    area_width_m: 800.0 * areaScale,
    area_height_m: 300.0 * areaScale,
    flows,
    mobility: { dynamic_scale: pick(cfg.dynamicScales) },
    reward: { kind: cfg.rewardKind, gamma: cfg.gamma, ...cfg.rewardWeights },
  };
}

/** Sample an action from the shared policy; returns the action and log-prob. */
function act(learner: PpoLearner, obs: Float64Array, rand: () => number): [0 | 1, number, number] {
  const [p0, p1] = learner.actionProbs(obs);
  const action: 0 | 1 = rand() < p1 ? 1 : 0;
  const logp = Math.log(action === 1 ? p1 : p0);
  return [action, logp, learner.stateValue(obs)];
}

export async function collectRollout(
  env: EnvClient,
  learner: PpoLearner,
  cfg: TrainConfig,
  rand: () => number,
  nextSeed: () => number,
): Promise<RolloutResult> {
  const transitions: Transition[] = [];
  const episodes: EpisodeSummary[] = [];
  let steps = 0;

  while (steps < cfg.rolloutLength) {
    const open = new Map<string, Transition>();   // agent -> transition awaiting close
    const perAgent = new Map<string, Transition[]>();
    let response = await env.reset(episodeOverrides(cfg, rand, nextSeed()));
    let done = false;
    let info: Record<string, unknown> = {};
    let rewardSum = 0;
    let rewardCount = 0;

    while (!done) {
      const agents = Object.keys(response.obs).sort((a, b) => Number(a) - Number(b));
      const actions: Record<string, 0 | 1> = {};
      for (const agent of agents) {
        const obs = Float64Array.from(response.obs[agent]);
        const [action, logp, value] = act(learner, obs, rand);
        actions[agent] = action;
        const t: Transition = { obs, action, logProbOld: logp, value, reward: 0 };
        open.set(agent, t);
        let seq = perAgent.get(agent);
        if (!seq) perAgent.set(agent, (seq = []));
        seq.push(t);
        steps += 1;
      }
      const stepResponse = await env.step(actions);
      for (const [agent, r] of Object.entries(stepResponse.rewards)) {
        const t = open.get(agent);
        if (t) {
          t.reward += r;
          rewardSum += r;
          rewardCount += 1;
        }
      }
      done = stepResponse.done;
      info = stepResponse.info;
      response = stepResponse;
    }

    for (const seq of perAgent.values()) {
      const { advantages, returns } = computeGae(
        Float64Array.from(seq, (t) => t.reward),
        Float64Array.from(seq, (t) => t.value),
        cfg.gamma, cfg.gaeLambda);
      seq.forEach((t, i) => {
        t.advantage = advantages[i];
        t.ret = returns[i];
        transitions.push(t);
      });
    }
    episodes.push({
      goodput: (info.goodput as number) ?? 0,
      overhead: (info.overhead as number | null) ?? null,
      broadcastRate: (info.broadcast_rate as number) ?? 0,
      steps,
      rewardMean: rewardCount ? rewardSum / rewardCount : 0,
    });
  }
  return { transitions, episodes, steps };
}
