/**
 * Line-protocol client for the simulator's environment server, spoken over
 * the stdio of a spawned `python3 -m cqsim.envserver --stdio` child process.
 * One request is outstanding at a time; responses carrying {"error": ...}
 * reject the pending call but keep the session alive.
 */

import { ChildProcess, spawn } from 'node:child_process';
import { createInterface, Interface } from 'node:readline';
import path from 'node:path';
import { fileURLToPath } from 'node:url';

export interface ResetResponse {
  obs: Record<string, number[]>;
  cbest: Record<string, number>;
  slot: number;
}

export interface StepResponse extends ResetResponse {
  rewards: Record<string, number>;
  done: boolean;
  info: Record<string, unknown>;
}

const REPO_ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), '..', '..');

export class EnvClient {
  private child: ChildProcess;
  private lines: Interface;
  private queue: { resolve: (v: unknown) => void; reject: (e: Error) => void }[] = [];
  private closed = false;

  constructor(pythonBin = process.env.CQSIM_PYTHON ?? 'python3', configPath?: string) {
    const args = ['-m', 'cqsim.envserver', '--stdio'];
    if (configPath) args.push('--config', configPath);
    this.child = spawn(pythonBin, args, {
      cwd: REPO_ROOT,
      env: { ...process.env, PYTHONPATH: path.join(REPO_ROOT, 'src') },
      stdio: ['pipe', 'pipe', 'inherit'],
    });
    this.lines = createInterface({ input: this.child.stdout! });
    this.lines.on('line', (line) => {
      const pending = this.queue.shift();
      if (!pending) return;
      try {
        const parsed = JSON.parse(line);
        if (parsed.error) pending.reject(new Error(`env error: ${parsed.error}`));
        else pending.resolve(parsed);
      } catch (err) {
        pending.reject(err as Error);
      }
    });
    this.child.on('exit', () => {
      this.closed = true;
      for (const pending of this.queue.splice(0)) {
        pending.reject(new Error('environment process exited'));
      }
    });
  }

  private call(message: object): Promise<unknown> {
    if (this.closed) return Promise.reject(new Error('client closed'));
    return new Promise((resolve, reject) => {
      this.queue.push({ resolve, reject });
      this.child.stdin!.write(JSON.stringify(message) + '\n');
    });
  }

  async reset(cfg: object): Promise<ResetResponse> {
    return (await this.call({ cmd: 'reset', cfg })) as ResetResponse;
  }

  async step(actions: Record<string, 0 | 1>): Promise<StepResponse> {
    return (await this.call({ cmd: 'step', actions })) as StepResponse;
  }

  async close(): Promise<void> {
    if (this.closed) return;
    try {
      await this.call({ cmd: 'close' });
    } finally {
      this.closed = true;
      this.child.stdin!.end();
      this.child.kill();
    }
  }
}
