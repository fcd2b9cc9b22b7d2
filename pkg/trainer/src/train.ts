/**
 * PPO training entry point.
 *
 *   node dist/train.js --steps 2000000 --out runs/exp1 [--resume runs/exp1/checkpoint.json]
 *
 * Writes checkpoint.json (full optimizer state), policy.json (simulator
 * weight schema) and curve.csv (per-rollout goodput / overhead / broadcast
 * rate) under --out.  Training resumes from the checkpoint after a crash or
 * disconnect.
 */

import fs from 'node:fs';
import path from 'node:path';

import { DEFAULT_CONFIG, TrainConfig } from './config.js';
import { EnvClient } from './envClient.js';
import { Mlp, mulberry32 } from './mlp.js';
import { PpoLearner } from './ppo.js';
import { collectRollout } from './rollout.js';
import { fromWeightDocument, toWeightDocument, WeightDocument } from './weightsIO.js';

export interface Checkpoint {
  config: TrainConfig;
  steps: number;
  episodeIndex: number;
  policy: WeightDocument;
  value: WeightDocument;
  policyOpt: { m: number[][][]; v: number[][][]; t: number };
  valueOpt: { m: number[][][]; v: number[][][]; t: number };
}

export function makeLearner(cfg: TrainConfig, rand: () => number): PpoLearner {
  const inWidth = 4 * cfg.kNeighbors + 2;
  const policy = Mlp.seeded([inWidth, ...cfg.hidden, 2], rand);
  const value = Mlp.seeded([inWidth, ...cfg.hidden, 1], rand);
  return new PpoLearner(policy, value, cfg.learningRate);
}

export function saveCheckpoint(file: string, learner: PpoLearner, cfg: TrainConfig,
                               steps: number, episodeIndex: number): void {
  const ckpt: Checkpoint = {
    config: cfg,
    steps,
    episodeIndex,
    policy: toWeightDocument(learner.policy, cfg.kNeighbors),
    value: { ...toWeightDocument(learner.value, cfg.kNeighbors), output: 'softmax-2' },
    policyOpt: learner.policyOpt.state(),
    valueOpt: learner.valueOpt.state(),
  };
  fs.writeFileSync(file, JSON.stringify(ckpt));
}

export function loadCheckpoint(file: string): { learner: PpoLearner; cfg: TrainConfig;
                                                steps: number; episodeIndex: number } {
  const ckpt = JSON.parse(fs.readFileSync(file, 'utf-8')) as Checkpoint;
  const learner = new PpoLearner(
    fromWeightDocument(ckpt.policy),
    fromWeightDocument(ckpt.value),
    ckpt.config.learningRate);
  learner.policyOpt.restore(ckpt.policyOpt);
  learner.valueOpt.restore(ckpt.valueOpt);
  return { learner, cfg: ckpt.config, steps: ckpt.steps, episodeIndex: ckpt.episodeIndex };
}

export async function train(cfg: TrainConfig, outDir: string, resumeFrom?: string,
                            pythonBin?: string): Promise<void> {
  fs.mkdirSync(outDir, { recursive: true });
  const curvePath = path.join(outDir, 'curve.csv');
  const ckptPath = path.join(outDir, 'checkpoint.json');
  const policyPath = path.join(outDir, 'policy.json');

  let learner: PpoLearner;
  let steps = 0;
  let episodeIndex = 0;
  const rand = mulberry32(cfg.seed + 1);
  if (resumeFrom) {
    const target = cfg.totalSteps;
    ({ learner, cfg, steps, episodeIndex } = loadCheckpoint(resumeFrom));
    cfg = { ...cfg, totalSteps: target };
    console.error(`resumed at ${steps} steps`);
  } else {
    learner = makeLearner(cfg, rand);
    fs.writeFileSync(curvePath,
      'steps,episodes,reward_mean,goodput,overhead,broadcast_rate,' +
      'policy_loss,value_loss,entropy,clip_fraction\n');
  }

  const env = new EnvClient(pythonBin);
  const ppoCfg = {
    clip: cfg.clip, epochs: cfg.epochs, minibatch: cfg.minibatch,
    entropyCoef: cfg.entropyCoef, valueCoef: cfg.valueCoef,
    maxGradNorm: cfg.maxGradNorm,
  };
  let lastCheckpoint = steps;
  try {
    while (steps < cfg.totalSteps) {
      const rollout = await collectRollout(env, learner, cfg, rand,
        () => cfg.seed * 1_000_003 + episodeIndex++);
      steps += rollout.steps;
      const stats = learner.update(rollout.transitions, ppoCfg, rand);

      const mean = (xs: (number | null)[]) => {
        const vals = xs.filter((x): x is number => x !== null);
        return vals.length ? vals.reduce((a, b) => a + b, 0) / vals.length : NaN;
      };
      const goodput = mean(rollout.episodes.map((e) => e.goodput));
      const overhead = mean(rollout.episodes.map((e) => e.overhead));
      const bcRate = mean(rollout.episodes.map((e) => e.broadcastRate));
      const rewardMean = mean(rollout.episodes.map((e) => e.rewardMean));
      fs.appendFileSync(curvePath,
        `${steps},${episodeIndex},${rewardMean},${goodput},${overhead},${bcRate},` +
        `${stats.policyLoss},${stats.valueLoss},${stats.entropy},${stats.clipFraction}\n`);
      console.error(
        `steps=${steps} goodput=${goodput.toFixed(3)} overhead=${overhead.toFixed(3)} ` +
        `bc=${bcRate.toFixed(3)} H=${stats.entropy.toFixed(3)}`);

      if (steps - lastCheckpoint >= cfg.checkpointEvery || steps >= cfg.totalSteps) {
        saveCheckpoint(ckptPath, learner, cfg, steps, episodeIndex);
        fs.writeFileSync(policyPath,
          JSON.stringify(toWeightDocument(learner.policy, cfg.kNeighbors)));
        lastCheckpoint = steps;
      }
    }
  } finally {
    saveCheckpoint(ckptPath, learner, cfg, steps, episodeIndex);
    fs.writeFileSync(policyPath,
      JSON.stringify(toWeightDocument(learner.policy, cfg.kNeighbors)));
    await env.close();
  }
}

function parseArgs(argv: string[]): { cfg: TrainConfig; out: string; resume?: string;
                                      python?: string } {
  const cfg = { ...DEFAULT_CONFIG };
  let out = 'runs/default';
  let resume: string | undefined;
  let python: string | undefined;
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    switch (key) {
      case '--steps': cfg.totalSteps = Number(val); break;
      case '--rollout': cfg.rolloutLength = Number(val); break;
      case '--lr': cfg.learningRate = Number(val); break;
      case '--seed': cfg.seed = Number(val); break;
      case '--reward': cfg.rewardKind = val as TrainConfig['rewardKind']; break;
      case '--w1': cfg.rewardWeights = { ...cfg.rewardWeights, w1: Number(val) }; break;
      case '--w2': cfg.rewardWeights = { ...cfg.rewardWeights, w2: Number(val) }; break;
      case '--w3': cfg.rewardWeights = { ...cfg.rewardWeights, w3: Number(val) }; break;
      case '--entropy': cfg.entropyCoef = Number(val); break;
      case '--nodes': cfg.nodeCounts = val.split(',').map(Number); break;
      case '--area-scales': cfg.areaScales = val.split(',').map(Number); break;
      case '--dynamic-scales': cfg.dynamicScales = val.split(',').map(Number); break;
      case '--flow-counts': cfg.flowCounts = val.split(',').map(Number); break;
      case '--traffic-slots': cfg.trafficSlots = Number(val); break;
      case '--out': out = val; break;
      case '--resume': resume = val; break;
      case '--python': python = val; break;
      default: throw new Error(`unknown flag ${key}`);
    }
  }
  return { cfg, out, resume, python };
}

const isMain = process.argv[1] &&
  path.resolve(process.argv[1]).replace(/\.ts$/, '.js').endsWith('train.js');
if (isMain) {
  const { cfg, out, resume, python } = parseArgs(process.argv.slice(2));
  train(cfg, out, resume, python).catch((err) => {
    console.error(err);
    process.exit(1);
  });
}
