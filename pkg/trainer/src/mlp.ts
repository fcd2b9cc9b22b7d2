/**
 * Small dense network with explicit forward/backward passes.
 *
 * Weight layout matches the simulator's portable format: each layer stores a
 * row-major (out x in) matrix and a bias vector, hidden layers are tanh and
 * the final layer is linear.  Gradients are accumulated by `backward` and
 * applied with Adam.
 */

export interface LayerParams {
  w: Float64Array; // (out*in), row-major over output units
  b: Float64Array; // (out)
  nIn: number;
  nOut: number;
  activation: 'tanh' | 'linear';
}

export class Mlp {
  readonly sizes: number[];
  readonly layers: LayerParams[];

  constructor(sizes: number[], layers?: LayerParams[]) {
    if (sizes.length < 2) throw new Error('need at least input and output sizes');
    this.sizes = sizes.slice();
    if (layers) {
      this.layers = layers;
      return;
    }
    this.layers = [];
    for (let l = 0; l < sizes.length - 1; l++) {
      this.layers.push({
        w: new Float64Array(sizes[l + 1] * sizes[l]),
        b: new Float64Array(sizes[l + 1]),
        nIn: sizes[l],
        nOut: sizes[l + 1],
        activation: l < sizes.length - 2 ? 'tanh' : 'linear',
      });
    }
  }

  /** He-style small random init; biases stay zero. */
  static seeded(sizes: number[], rand: () => number, scale = 0.5): Mlp {
    const net = new Mlp(sizes);
    for (const layer of net.layers) {
      const s = scale / Math.sqrt(layer.nIn);
      for (let i = 0; i < layer.w.length; i++) layer.w[i] = gaussian(rand) * s;
    }
    return net;
  }

  clone(): Mlp {
    return new Mlp(this.sizes, this.layers.map((l) => ({
      w: l.w.slice(), b: l.b.slice(), nIn: l.nIn, nOut: l.nOut, activation: l.activation,
    })));
  }

  paramCount(): number {
    return this.layers.reduce((n, l) => n + l.w.length + l.b.length, 0);
  }

  /** Forward pass; keeps per-layer activations for backprop. */
  forwardTrace(x: ArrayLike<number>): { out: Float64Array; acts: Float64Array[] } {
    if (x.length !== this.sizes[0]) {
      throw new Error(`input width ${x.length} != ${this.sizes[0]}`);
    }
    const acts: Float64Array[] = [Float64Array.from(x)];
    let cur = acts[0];
    for (const layer of this.layers) {
      const next = new Float64Array(layer.nOut);
      for (let r = 0; r < layer.nOut; r++) {
        let acc = layer.b[r];
        const base = r * layer.nIn;
        for (let c = 0; c < layer.nIn; c++) acc += layer.w[base + c] * cur[c];
        next[r] = layer.activation === 'tanh' ? Math.tanh(acc) : acc;
      }
      acts.push(next);
      cur = next;
    }
    return { out: cur, acts };
  }

  forward(x: ArrayLike<number>): Float64Array {
    return this.forwardTrace(x).out;
  }

  /**
   * Backpropagate d(loss)/d(output) for one sample, adding parameter
   * gradients into `grads` (same shapes as the layers).
   */
  backward(acts: Float64Array[], dOut: ArrayLike<number>, grads: Grads): void {
    let delta = Float64Array.from(dOut);
    for (let l = this.layers.length - 1; l >= 0; l--) {
      const layer = this.layers[l];
      const input = acts[l];
      const output = acts[l + 1];
      if (layer.activation === 'tanh') {
        for (let r = 0; r < layer.nOut; r++) delta[r] *= 1 - output[r] * output[r];
      }
      const gw = grads.layers[l].w;
      const gb = grads.layers[l].b;
      for (let r = 0; r < layer.nOut; r++) {
        gb[r] += delta[r];
        const base = r * layer.nIn;
        for (let c = 0; c < layer.nIn; c++) gw[base + c] += delta[r] * input[c];
      }
      if (l > 0) {
        const prev = new Float64Array(layer.nIn);
        for (let c = 0; c < layer.nIn; c++) {
          let acc = 0;
          for (let r = 0; r < layer.nOut; r++) acc += layer.w[r * layer.nIn + c] * delta[r];
          prev[c] = acc;
        }
        delta = prev;
      }
    }
  }
}

export interface Grads {
  layers: { w: Float64Array; b: Float64Array }[];
}

export function zeroGrads(net: Mlp): Grads {
  return {
    layers: net.layers.map((l) => ({
      w: new Float64Array(l.w.length),
      b: new Float64Array(l.b.length),
    })),
  };
}

export function scaleGrads(grads: Grads, factor: number): void {
  for (const g of grads.layers) {
    for (let i = 0; i < g.w.length; i++) g.w[i] *= factor;
    for (let i = 0; i < g.b.length; i++) g.b[i] *= factor;
  }
}

/** Adam with per-parameter moments; `step` ascends (pass negated grads to descend). */
export class Adam {
  private m: Grads;
  private v: Grads;
  t = 0;

  constructor(
    net: Mlp,
    readonly lr: number,
    readonly beta1 = 0.9,
    readonly beta2 = 0.999,
    readonly eps = 1e-8,
  ) {
    this.m = zeroGrads(net);
    this.v = zeroGrads(net);
  }

  step(net: Mlp, grads: Grads): void {
    this.t += 1;
    const bc1 = 1 - Math.pow(this.beta1, this.t);
    const bc2 = 1 - Math.pow(this.beta2, this.t);
    for (let l = 0; l < net.layers.length; l++) {
      this.apply(net.layers[l].w, grads.layers[l].w, this.m.layers[l].w, this.v.layers[l].w, bc1, bc2);
      this.apply(net.layers[l].b, grads.layers[l].b, this.m.layers[l].b, this.v.layers[l].b, bc1, bc2);
    }
  }

  private apply(p: Float64Array, g: Float64Array, m: Float64Array, v: Float64Array,
                bc1: number, bc2: number): void {
    for (let i = 0; i < p.length; i++) {
      m[i] = this.beta1 * m[i] + (1 - this.beta1) * g[i];
      v[i] = this.beta2 * v[i] + (1 - this.beta2) * g[i] * g[i];
      p[i] += this.lr * (m[i] / bc1) / (Math.sqrt(v[i] / bc2) + this.eps);
    }
  }

  state(): { m: number[][][]; v: number[][][]; t: number } {
    const dump = (g: Grads) => g.layers.map((l) => [Array.from(l.w), Array.from(l.b)]);
    return { m: dump(this.m), v: dump(this.v), t: this.t };
  }

  restore(state: { m: number[][][]; v: number[][][]; t: number }): void {
    const load = (g: Grads, src: number[][][]) => {
      for (let l = 0; l < g.layers.length; l++) {
        g.layers[l].w.set(src[l][0]);
        g.layers[l].b.set(src[l][1]);
      }
    };
    load(this.m, state.m);
    load(this.v, state.v);
    this.t = state.t;
  }
}

export function softmax2(logits: ArrayLike<number>): [number, number] {
  const m = Math.max(logits[0], logits[1]);
  const a = Math.exp(logits[0] - m);
  const b = Math.exp(logits[1] - m);
  const z = a + b;
  return [a / z, b / z];
}

export function logSoftmax2(logits: ArrayLike<number>): [number, number] {
  const m = Math.max(logits[0], logits[1]);
  const lz = m + Math.log(Math.exp(logits[0] - m) + Math.exp(logits[1] - m));
  return [logits[0] - lz, logits[1] - lz];
}

/** Deterministic mulberry32 PRNG for reproducible init and sampling. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function gaussian(rand: () => number): number {
  // Box-Muller; rand() is in [0, 1)
  let u = 0;
  while (u === 0) u = rand();
  return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * rand());
}
