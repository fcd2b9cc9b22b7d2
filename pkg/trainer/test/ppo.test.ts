import { describe, expect, it } from 'vitest';

import { Mlp, mulberry32, softmax2 } from '../src/mlp.js';
import { PpoLearner, Transition } from '../src/ppo.js';

const CFG = {
  clip: 0.2, epochs: 3, minibatch: 32, entropyCoef: 0.0,
  valueCoef: 0.5, maxGradNorm: 10.0,
};

function learner(lr: number, seed = 5): PpoLearner {
  const rand = mulberry32(seed);
  return new PpoLearner(Mlp.seeded([4, 8, 2], rand), Mlp.seeded([4, 8, 1], rand), lr);
}

function transition(l: PpoLearner, obs: number[], action: 0 | 1,
                    advantage: number): Transition {
  return {
    obs: Float64Array.from(obs),
    action,
    logProbOld: l.logProb(obs, action),
    value: l.stateValue(obs),
    reward: advantage,
    advantage,
    ret: advantage,
  };
}

describe('clipped-surrogate update', () => {
  it('reinforces positively-advantaged actions on a synthetic bandit', () => {
    const l = learner(0.01);
    const obs = [0.2, -0.4, 0.7, 0.1];
    const before = l.actionProbs(obs)[1];
    for (let round = 0; round < 20; round++) {
      const batch: Transition[] = [];
      for (let i = 0; i < 32; i++) {
        batch.push(transition(l, obs, 1, +1));
        batch.push(transition(l, obs, 0, -1));
      }
      l.update(batch, CFG, mulberry32(round));
    }
    const after = l.actionProbs(obs)[1];
    expect(after).toBeGreaterThan(before);
    expect(after).toBeGreaterThan(0.9);
  });

  it('a tiny-step update leaves the argmax action unchanged on a frozen batch', () => {
    // at the first epoch the ratio is 1 everywhere, so the clip is inactive;
    // with a vanishing learning rate the preferred action cannot flip
    const l = learner(1e-7, 11);
    const rand = mulberry32(2);
    const batch: Transition[] = [];
    const observations: number[][] = [];
    for (let i = 0; i < 64; i++) {
      const obs = [rand() * 2 - 1, rand() * 2 - 1, rand() * 2 - 1, rand() * 2 - 1];
      observations.push(obs);
      batch.push(transition(l, obs, rand() < 0.5 ? 1 : 0, rand() * 2 - 1));
    }
    const argmaxBefore = observations.map((o) => {
      const p = l.actionProbs(o);
      return p[1] > p[0] ? 1 : 0;
    });
    l.update(batch, { ...CFG, epochs: 1 }, mulberry32(3));
    const argmaxAfter = observations.map((o) => {
      const p = l.actionProbs(o);
      return p[1] > p[0] ? 1 : 0;
    });
    expect(argmaxAfter).toEqual(argmaxBefore);
  });

  it('reports a sane clip fraction on a frozen batch', () => {
    // ratios start at 1, so nothing can be clipped in the first epoch
    const l = learner(1e-7, 13);
    const batch = [transition(l, [0, 0, 0, 0], 1, 1)];
    const stats = l.update(batch, { ...CFG, epochs: 1, minibatch: 1 }, mulberry32(1));
    expect(stats.clipFraction).toBe(0);
  });

  it('value regression moves the state value toward the return', () => {
    const l = learner(0.01, 17);
    const obs = [0.5, 0.5, -0.5, 0.0];
    for (let round = 0; round < 50; round++) {
      const batch = [transition(l, obs, 1, 0)];
      batch[0].ret = 2.5;
      l.update(batch, { ...CFG, epochs: 2, minibatch: 1 }, mulberry32(round));
    }
    expect(l.stateValue(obs)).toBeCloseTo(2.5, 1);
  });

  it('entropy bonus pushes a confident policy back toward uniform', () => {
    const l = learner(0.01, 19);
    l.policy.layers[l.policy.layers.length - 1].b.set([3.0, -3.0]);
    const obs = [0, 0, 0, 0];
    const before = softmax2(l.policy.forward(obs))[0];
    for (let round = 0; round < 30; round++) {
      const batch = [transition(l, obs, 0, 0)];
      l.update(batch, { ...CFG, epochs: 1, minibatch: 1, entropyCoef: 0.5 },
        mulberry32(round));
    }
    const after = softmax2(l.policy.forward(obs))[0];
    expect(after).toBeLessThan(before);
  });
});
