/**
 * Clipped-surrogate policy optimization for the 2-action routing policy.
 *
 * Maximizes E[min(r*A, clip(r, 1-c, 1+c)*A)] + entropyCoef*H over minibatch
 * epochs with Adam, alongside an L2 value-regression on a separate network
 * of the same trunk widths.
 */

import { Adam, Grads, Mlp, logSoftmax2, scaleGrads, softmax2, zeroGrads } from './mlp.js';
import { normalize } from './gae.js';

export interface Transition {
  obs: Float64Array;
  action: 0 | 1;
  logProbOld: number;
  value: number;       // V(s) at collection time
  reward: number;      // accumulated until the agent's next decision
  advantage?: number;
  ret?: number;
}

export interface PpoConfig {
  clip: number;
  epochs: number;
  minibatch: number;
  entropyCoef: number;
  valueCoef: number;
  maxGradNorm: number;
}

export interface UpdateStats {
  policyLoss: number;
  valueLoss: number;
  entropy: number;
  clipFraction: number;
}

export class PpoLearner {
  readonly policy: Mlp;
  readonly value: Mlp;
  readonly policyOpt: Adam;
  readonly valueOpt: Adam;

  constructor(policy: Mlp, value: Mlp, lr: number) {
    this.policy = policy;
    this.value = value;
    this.policyOpt = new Adam(policy, lr);
    this.valueOpt = new Adam(value, lr);
  }

  actionProbs(obs: ArrayLike<number>): [number, number] {
    return softmax2(this.policy.forward(obs));
  }

  logProb(obs: ArrayLike<number>, action: 0 | 1): number {
    return logSoftmax2(this.policy.forward(obs))[action];
  }

  stateValue(obs: ArrayLike<number>): number {
    return this.value.forward(obs)[0];
  }

  /** One PPO update over a finished batch (advantages already attached). */
  update(batch: Transition[], cfg: PpoConfig, rand: () => number): UpdateStats {
    const advantages = Float64Array.from(batch, (t) => t.advantage ?? 0);
    normalize(advantages);
    batch.forEach((t, i) => { t.advantage = advantages[i]; });

    const order = batch.map((_, i) => i);
    let policyLoss = 0;
    let valueLoss = 0;
    let entropy = 0;
    let clipped = 0;
    let samples = 0;

    for (let epoch = 0; epoch < cfg.epochs; epoch++) {
      shuffle(order, rand);
      for (let start = 0; start < order.length; start += cfg.minibatch) {
        const idx = order.slice(start, start + cfg.minibatch);
        const pGrads = zeroGrads(this.policy);
        const vGrads = zeroGrads(this.value);
        for (const i of idx) {
          const t = batch[i];
          const adv = t.advantage ?? 0;

          const trace = this.policy.forwardTrace(t.obs);
          const logp = logSoftmax2(trace.out);
          const probs = softmax2(trace.out);
          const ratio = Math.exp(logp[t.action] - t.logProbOld);
          const inClipRegion =
            (adv >= 0 && ratio > 1 + cfg.clip) || (adv < 0 && ratio < 1 - cfg.clip);
          if (inClipRegion) clipped += 1;

          // d(surrogate)/d(logits): zero when the clip is active, else
          // ratio*adv*(onehot(a) - probs); entropy gradient -p*(logp + H)
          const h = -(probs[0] * logp[0] + probs[1] * logp[1]);
          const dLogit = [0, 0];
          if (!inClipRegion) {
            const g = ratio * adv;
            dLogit[0] += g * ((t.action === 0 ? 1 : 0) - probs[0]);
            dLogit[1] += g * ((t.action === 1 ? 1 : 0) - probs[1]);
          }
          dLogit[0] += cfg.entropyCoef * -(probs[0] * (logp[0] + h));
          dLogit[1] += cfg.entropyCoef * -(probs[1] * (logp[1] + h));
          this.policy.backward(trace.acts, dLogit, pGrads);

          const vTrace = this.value.forwardTrace(t.obs);
          const vErr = vTrace.out[0] - (t.ret ?? 0);
          // ascend the negated squared error
          this.value.backward(vTrace.acts, [-cfg.valueCoef * vErr], vGrads);

          policyLoss += -Math.min(ratio * adv,
            clamp(ratio, 1 - cfg.clip, 1 + cfg.clip) * adv);
          valueLoss += 0.5 * vErr * vErr;
          entropy += h;
          samples += 1;
        }
        scaleGrads(pGrads, 1 / idx.length);
        scaleGrads(vGrads, 1 / idx.length);
        clipGradNorm(pGrads, cfg.maxGradNorm);
        clipGradNorm(vGrads, cfg.maxGradNorm);
        this.policyOpt.step(this.policy, pGrads);
        this.valueOpt.step(this.value, vGrads);
      }
    }
    return {
      policyLoss: policyLoss / samples,
      valueLoss: valueLoss / samples,
      entropy: entropy / samples,
      clipFraction: clipped / samples,
    };
  }
}

function clamp(x: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, x));
}

function shuffle(xs: number[], rand: () => number): void {
  for (let i = xs.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [xs[i], xs[j]] = [xs[j], xs[i]];
  }
}

function clipGradNorm(grads: Grads, maxNorm: number): void {
  let sq = 0;
  for (const g of grads.layers) {
    for (const v of g.w) sq += v * v;
    for (const v of g.b) sq += v * v;
  }
  const norm = Math.sqrt(sq);
  if (norm > maxNorm) scaleGrads(grads, maxNorm / norm);
}
