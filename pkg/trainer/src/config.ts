/** Training configuration and defaults. */

export interface TrainConfig {
  learningRate: number;
  gamma: number;            // discount
  gaeLambda: number;
  clip: number;
  rolloutLength: number;    // transitions per update
  minibatch: number;
  epochs: number;
  entropyCoef: number;
  valueCoef: number;
  maxGradNorm: number;
  totalSteps: number;       // environment transitions to train on
  kNeighbors: number;
  hidden: number[];
  rewardKind: 'reward1' | 'reward2';
  rewardWeights: { w1: number; w2: number; w3: number };
  // per-episode sampling ranges (one value is picked per episode)
  nodeCounts: number[];
  flowCounts: number[];
  dynamicScales: number[];
  areaScales: number[];
  trafficSlots: number;
  checkpointEvery: number;  // steps between checkpoint exports
  seed: number;
}

export const DEFAULT_CONFIG: TrainConfig = {
  learningRate: 5e-5,
  gamma: 0.99,
  gaeLambda: 0.95,
  clip: 0.2,
  rolloutLength: 4096,
  minibatch: 256,
  epochs: 4,
  entropyCoef: 0.01,
  valueCoef: 0.5,
  maxGradNorm: 0.5,
  totalSteps: 2_000_000,
  kNeighbors: 4,
  hidden: [16, 16, 8, 8, 4],
  rewardKind: 'reward2',
  rewardWeights: { w1: 1.0, w2: 0.2, w3: 0.5 },
  nodeCounts: [12],
  flowCounts: [1],
  dynamicScales: [1.0],
  areaScales: [1.0],
  trafficSlots: 3000,
  checkpointEvery: 50_000,
  seed: 0,
};
