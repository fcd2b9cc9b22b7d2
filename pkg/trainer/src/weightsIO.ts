/**
 * Read/write the simulator's portable weight-file schema.  This file is the
 * bit-exact contract between the trainer and the simulator: row-major (out x
 * in) matrices, tanh hidden layers, a linear final layer feeding a 2-way
 * softmax.
 */

import { Mlp, LayerParams } from './mlp.js';

export interface WeightDocument {
  k_neighbors: number | null;
  layer_sizes: number[];
  layers: { w: number[][]; b: number[]; activation: 'tanh' | 'linear' }[];
  output: 'softmax-2';
}

export function toWeightDocument(net: Mlp, kNeighbors: number | null): WeightDocument {
  return {
    k_neighbors: kNeighbors,
    layer_sizes: net.sizes.slice(),
    layers: net.layers.map((l) => ({
      w: splitRows(l.w, l.nOut, l.nIn),
      b: Array.from(l.b),
      activation: l.activation,
    })),
    output: 'softmax-2',
  };
}

export function fromWeightDocument(doc: WeightDocument): Mlp {
  if (doc.output !== 'softmax-2') throw new Error(`unsupported output head ${doc.output}`);
  const sizes = doc.layer_sizes;
  if (doc.layers.length !== sizes.length - 1) throw new Error('layer count mismatch');
  const layers: LayerParams[] = doc.layers.map((raw, i) => {
    const nIn = sizes[i];
    const nOut = sizes[i + 1];
    if (raw.w.length !== nOut || raw.b.length !== nOut) {
      throw new Error(`layer ${i}: shape mismatch`);
    }
    const w = new Float64Array(nOut * nIn);
    for (let r = 0; r < nOut; r++) {
      if (raw.w[r].length !== nIn) throw new Error(`layer ${i}: row width mismatch`);
      w.set(raw.w[r], r * nIn);
    }
    for (const v of w) if (!Number.isFinite(v)) throw new Error(`layer ${i}: non-finite weight`);
    for (const v of raw.b) if (!Number.isFinite(v)) throw new Error(`layer ${i}: non-finite bias`);
    return { w, b: Float64Array.from(raw.b), nIn, nOut, activation: raw.activation };
  });
  return new Mlp(sizes, layers);
}

function splitRows(flat: Float64Array, rows: number, cols: number): number[][] {
  const out: number[][] = [];
  for (let r = 0; r < rows; r++) out.push(Array.from(flat.subarray(r * cols, (r + 1) * cols)));
  return out;
}
