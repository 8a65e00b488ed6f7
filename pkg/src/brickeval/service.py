"""Streaming reward service: newline-delimited JSON over stdio or TCP.

Each request line is a JSON object {"id", "completion", and exactly one
of "target_voxels" (codec string) or "target_points" (point-token
text)}. Each response line echoes the id with the reward breakdown, or
{"id", "error_code"} where error_code is "bad_request" (unreadable or
mistyped request; id is null when it cannot be recovered) or
"bad_target_encoding" (target failed to decode). Scoring is pure, so
responses are byte-identical for identical request lines; with more
than one worker thread they may leave in a different order than they
arrived. In-flight requests are capped, so a slow reader throttles
intake. End of input flushes pending responses and exits cleanly.
"""

from __future__ import annotations

import io
import json
import socketserver
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from typing import Callable, Iterable

from .core import WorldConfig, DEFAULT_WORLD
from .dataset import CodecError, decode_target_voxels
from .rewards import RewardBreakdown, score_completion
from .tokens import MalformedPointToken, OutOfWorldCoordinate, parse_pointcloud

_RESPONSE_FIELDS = (
    "total",
    "r_col",
    "r_shape",
    "r_inter",
    "r_conn",
    "iou",
    "n_col",
    "parse_failed",
    "feasible",
    "in_bounds",
    "brick_count",
)


def _error(request_id: str | None, code: str) -> str:
    return json.dumps({"id": request_id, "error_code": code})


def _response(request_id: str, breakdown: RewardBreakdown) -> str:
    record: dict = {"id": request_id}
    fields = asdict(breakdown)
    for name in _RESPONSE_FIELDS:
        record[name] = fields[name]
    return json.dumps(record)


def handle_request_line(line: str, world: WorldConfig) -> str:
    """Score one request line; never raises."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError:
        return _error(None, "bad_request")
    if not isinstance(obj, dict):
        return _error(None, "bad_request")
    request_id = obj.get("id")
    if not isinstance(request_id, str):
        return _error(None, "bad_request")
    completion = obj.get("completion")
    voxels = obj.get("target_voxels")
    points = obj.get("target_points")
    if not isinstance(completion, str):
        return _error(request_id, "bad_request")
    if (voxels is None) == (points is None):
        return _error(request_id, "bad_request")
    try:
        if voxels is not None:
            if not isinstance(voxels, str):
                return _error(request_id, "bad_request")
            target = decode_target_voxels(voxels, world)
        else:
            if not isinstance(points, str):
                return _error(request_id, "bad_request")
            target = parse_pointcloud(points, world)
    except (CodecError, MalformedPointToken, OutOfWorldCoordinate):
        return _error(request_id, "bad_target_encoding")
    try:
        return _response(request_id, score_completion(completion, target, world))
    except Exception:
        return _error(request_id, "bad_request")


def serve_lines(
    lines: Iterable[str],
    write_line: Callable[[str], None],
    world: WorldConfig = DEFAULT_WORLD,
    threads: int = 1,
    max_pending: int = 128,
) -> None:
    """Pump request lines through the scorer; blocks until input ends.

    Blank lines are skipped. With threads > 1 responses are written as
    they finish; the bounded in-flight window provides backpressure.
    """
    lock = threading.Lock()

    def emit(text: str) -> None:
        with lock:
            write_line(text)

    if threads <= 1:
        for line in lines:
            if line.strip():
                emit(handle_request_line(line, world))
        return

    budget = threading.BoundedSemaphore(max(max_pending, threads))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        def finish(future) -> None:
            try:
                emit(future.result())
            finally:
                budget.release()

        for line in lines:
            if not line.strip():
                continue
            budget.acquire()
            pool.submit(handle_request_line, line, world).add_done_callback(finish)


def serve_stdio(world: WorldConfig = DEFAULT_WORLD, threads: int = 1) -> int:
    """Serve requests from stdin to stdout until end of input."""
    out = sys.stdout

    def write_line(text: str) -> None:
        out.write(text + "\n")
        out.flush()

    serve_lines(sys.stdin, write_line, world, threads)
    out.flush()
    return 0


class RewardTCPServer(socketserver.ThreadingTCPServer):
    """One scoring stream per connection; responses stay on their connection."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: tuple[str, int], world: WorldConfig, threads: int):
        super().__init__(address, _TCPHandler)
        self.world = world
        self.threads = threads


class _TCPHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        server: RewardTCPServer = self.server  # type: ignore[assignment]
        reader = io.TextIOWrapper(self.rfile, encoding="utf-8")

        def write_line(text: str) -> None:
            self.wfile.write((text + "\n").encode("utf-8"))

        try:
            serve_lines(reader, write_line, server.world, server.threads)
        except (BrokenPipeError, ConnectionResetError):
            pass


def serve_rewards(
    transport: str = "stdio",
    port: int = 0,
    host: str = "127.0.0.1",
    world: WorldConfig = DEFAULT_WORLD,
    threads: int = 1,
) -> int:
    """Run the service until end of input (stdio) or interrupt (tcp)."""
    if transport == "stdio":
        return serve_stdio(world, threads)
    if transport == "tcp":
        with RewardTCPServer((host, port), world, threads) as server:
            print(f"listening on {server.server_address[0]}:{server.server_address[1]}",
                  file=sys.stderr, flush=True)
            try:
                server.serve_forever()
            except KeyboardInterrupt:
                pass
        return 0
    raise ValueError(f"unknown transport {transport!r}")
