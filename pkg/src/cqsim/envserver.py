"""Multi-agent reset/step environment over newline-delimited JSON.

Exposes the engine to an external trainer (centralized training,
decentralized execution, one shared policy for all agents).  One protocol
round-trip covers one simulation slot: the response batches every node that
has to pick broadcast/unicast this slot, keyed by node id.

    -> {"cmd": "reset", "cfg": {...config overrides...}}
    <- {"obs": {"3": [floats]}, "cbest": {"3": 0.0}, "slot": 1, "done": false}
    -> {"cmd": "step", "actions": {"3": 1}}
    <- {"obs": {...}, "cbest": {...}, "rewards": {"3": 0.95},
        "done": false, "info": {...metrics snapshot...}}
    -> {"cmd": "close"}
    <- {"ok": true}

`cbest` mirrors the confidence of each agent's best next hop so rule-based
baselines can be driven externally with bit-identical results; neural
clients only need `obs`.  Malformed requests get {"error": "..."} and leave
the session untouched.  Transport is stdio or a TCP socket (one session per
connection, sessions fully isolated).
"""

from __future__ import annotations

import argparse
import json
import socketserver
import sys

from .config import SimConfig, config_from_dict, config_to_dict, load_config
from .engine import DecisionRequest, Engine


def _merge(base: dict, overrides: dict) -> dict:
    out = dict(base)
    for key, val in overrides.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _request_payload(requests: list[DecisionRequest], slot: int) -> dict:
    return {
        "obs": {str(r.node): r.obs.as_vector() for r in requests},
        "cbest": {str(r.node): r.c_best for r in requests},
        "slot": slot,
    }


class EnvSession:
    """One externally driven episode at a time."""

    def __init__(self, base_cfg: SimConfig):
        self._base = config_to_dict(base_cfg)
        self._engine: Engine | None = None
        self._outstanding: list[DecisionRequest] = []

    def reset(self, cfg_overrides: dict | None = None) -> dict:
        # an in-progress episode is abandoned; trainers may truncate rollouts
        cfg = config_from_dict(_merge(self._base, cfg_overrides or {}))
        self._engine = Engine(cfg)
        self._outstanding = self._engine.start()
        self._engine.take_rewards()  # no consumer for pre-decision slots
        out = _request_payload(self._outstanding, self._engine.slot)
        out["done"] = self._engine.done
        return out

    def step(self, actions: dict) -> dict:
        if self._engine is None or not self._outstanding:
            raise ValueError("no outstanding decisions; call reset first")
        parsed = {int(k): int(v) for k, v in actions.items()}
        self._outstanding = self._engine.apply_actions(parsed)
        eng = self._engine
        info = eng.metrics.summarize(eng.cfg.node_count)
        out = _request_payload(self._outstanding, eng.slot)
        out["rewards"] = {str(n): r for n, r in sorted(eng.take_rewards().items())}
        out["done"] = eng.done
        out["info"] = info
        return out

    def handle(self, message: dict) -> dict | None:
        """Dispatch one protocol message; None means close the connection."""
        cmd = message.get("cmd")
        if cmd == "reset":
            return self.reset(message.get("cfg") or {})
        if cmd == "step":
            if "actions" not in message:
                raise ValueError("step requires an actions map")
            return self.step(message["actions"])
        if cmd == "close":
            return None
        raise ValueError(f"unknown command {cmd!r}")

    def handle_line(self, line: str) -> tuple[str | None, bool]:
        """(response line, keep-going).  Errors never tear down the session."""
        try:
            message = json.loads(line)
            if not isinstance(message, dict):
                raise ValueError("message must be a JSON object")
            response = self.handle(message)
        except (ValueError, KeyError, TypeError) as exc:
            return json.dumps({"error": str(exc)}), True
        if response is None:
            return json.dumps({"ok": True}), False
        return json.dumps(response), True


def serve_stdio(base_cfg: SimConfig, stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    session = EnvSession(base_cfg)
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        response, keep_going = session.handle_line(line)
        stdout.write(response + "\n")
        stdout.flush()
        if not keep_going:
            break


class _TcpHandler(socketserver.StreamRequestHandler):
    def handle(self):
        session = EnvSession(self.server.base_cfg)
        for raw in self.rfile:
            line = raw.decode("utf-8").strip()
            if not line:
                continue
            response, keep_going = session.handle_line(line)
            self.wfile.write((response + "\n").encode("utf-8"))
            if not keep_going:
                break


class EnvServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, base_cfg: SimConfig, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), _TcpHandler)
        self.base_cfg = base_cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cqsim-env", description="serve the routing simulator as an RL environment")
    parser.add_argument("--config", help="base config JSON (default: built-in benchmark)")
    parser.add_argument("--stdio", action="store_true", help="speak the protocol on stdin/stdout")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=9723)
    args = parser.parse_args(argv)

    from .config import benchmark_config
    base = load_config(args.config) if args.config else benchmark_config()
    if args.stdio:
        serve_stdio(base)
        return 0
    with EnvServer(base, args.host, args.port) as server:
        print(f"listening on {server.server_address[0]}:{server.server_address[1]}",
              file=sys.stderr)
        server.serve_forever()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
