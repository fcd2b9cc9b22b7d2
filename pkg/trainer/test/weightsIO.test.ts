import fs from 'node:fs';
import path from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { Mlp, mulberry32, softmax2 } from '../src/mlp.js';
import { fromWeightDocument, toWeightDocument, WeightDocument } from '../src/weightsIO.js';

const HERE = path.dirname(fileURLToPath(import.meta.url));
const GOLDEN = path.resolve(HERE, '..', '..', 'tests', 'data', 'golden_weights.json');

describe('weight document round trip', () => {
  it('preserves every parameter exactly', () => {
    const net = Mlp.seeded([18, 16, 16, 8, 8, 4, 2], mulberry32(1));
    const back = fromWeightDocument(toWeightDocument(net, 4));
    expect(back.sizes).toEqual(net.sizes);
    for (let l = 0; l < net.layers.length; l++) {
      expect(Array.from(back.layers[l].w)).toEqual(Array.from(net.layers[l].w));
      expect(Array.from(back.layers[l].b)).toEqual(Array.from(net.layers[l].b));
      expect(back.layers[l].activation).toBe(net.layers[l].activation);
    }
  });

  it('survives JSON text serialization', () => {
    const net = Mlp.seeded([10, 4, 2], mulberry32(2));
    const text = JSON.stringify(toWeightDocument(net, 2));
    const back = fromWeightDocument(JSON.parse(text));
    expect(back.forward([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]))
      .toEqual(net.forward([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]));
  });

  it('rejects shape mismatches and non-finite values', () => {
    const doc = toWeightDocument(Mlp.seeded([4, 3, 2], mulberry32(3)), 1);
    const broken = JSON.parse(JSON.stringify(doc)) as WeightDocument;
    broken.layers[0].b = broken.layers[0].b.slice(1);
    expect(() => fromWeightDocument(broken)).toThrow(/shape/);

    const nan = JSON.parse(JSON.stringify(doc)) as WeightDocument;
    nan.layers[1].w[0][0] = Number.NaN; // JSON.parse would reject NaN literals; set after
    expect(() => fromWeightDocument(nan)).toThrow(/non-finite/);
  });
});

describe('simulator golden fixture', () => {
  it('reproduces the frozen forward-pass probabilities', () => {
    const doc = JSON.parse(fs.readFileSync(GOLDEN, 'utf-8')) as WeightDocument;
    const net = fromWeightDocument(doc);
    const obs = [0.9, 0.5, 0.0, 0.0,
                 0.09375, 0.0625, 1.0, 1.0,
                 0.1, -0.05, 0.0, 0.0,
                 -0.03125, 0.0, 0.0, 0.0,
                 1.0, 0.0];
    const [pUnicast, pBroadcast] = softmax2(net.forward(obs));
    expect(pUnicast).toBeCloseTo(0.450356143639758, 6);
    expect(pBroadcast).toBeCloseTo(0.549643856360242, 6);
  });
});
