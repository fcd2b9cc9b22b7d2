/**
 * Generalized advantage estimation over one agent's decision sequence.
 * Transitions are indexed by the agent's own decisions; the last one in an
 * episode bootstraps with zero.
 */

export interface GaeResult {
  advantages: Float64Array;
  returns: Float64Array;
}

export function computeGae(
  rewards: ArrayLike<number>,
  values: ArrayLike<number>,
  gamma: number,
  lambda: number,
): GaeResult {
  const n = rewards.length;
  if (values.length !== n) throw new Error('rewards/values length mismatch');
  const advantages = new Float64Array(n);
  const returns = new Float64Array(n);
  let nextAdvantage = 0;
  let nextValue = 0; // terminal bootstrap
  for (let i = n - 1; i >= 0; i--) {
    const delta = rewards[i] + gamma * nextValue - values[i];
    nextAdvantage = delta + gamma * lambda * nextAdvantage;
    advantages[i] = nextAdvantage;
    returns[i] = advantages[i] + values[i];
    nextValue = values[i];
  }
  return { advantages, returns };
}

/** In-place standardization; a no-op on batches of one. */
export function normalize(xs: Float64Array): void {
  if (xs.length < 2) return;
  let mean = 0;
  for (const x of xs) mean += x;
  mean /= xs.length;
  let variance = 0;
  for (const x of xs) variance += (x - mean) * (x - mean);
  const std = Math.sqrt(variance / xs.length);
  if (std < 1e-8) return;
  for (let i = 0; i < xs.length; i++) xs[i] = (xs[i] - mean) / std;
}
