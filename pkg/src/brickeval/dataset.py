"""Dataset record formats and the target-voxel codec.

Codec, fixed so independent implementations interoperate: the grid is
flattened to one byte per voxel (0 or 1) at linear index
(x * dim_y + y) * dim_z + z, i.e. C order over axes (x, y, z),
compressed with zlib-framed DEFLATE, then encoded as standard padded
base64.

Records are newline-delimited JSON objects. An SFT record holds
system/user/assistant strings (assistant is one brick token per line);
a GRPO record replaces the assistant text with the encoded target
occupancy under "target_voxels". Only feasible structures (non-empty,
collision-free, fully in bounds) may become training records.
"""

from __future__ import annotations

import base64
import binascii
import json
import logging
import zlib
from dataclasses import asdict, dataclass

import numpy as np

from .analysis import analyze_with_occupancy
from .core import DEFAULT_WORLD, BrickStructure, WorldConfig
from .tokens import build_prompt, parse_structure, serialize_structure

logger = logging.getLogger(__name__)

SYSTEM_PROMPT = "You are a helpful assistant."


class CodecError(ValueError):
    """Base class for target-voxel decoding failures."""


class BadBase64(CodecError):
    pass


class BadCompression(CodecError):
    pass


class BadLength(CodecError):
    pass


class BadValue(CodecError):
    pass


class InfeasibleStructure(ValueError):
    """Structure is empty, colliding, or out of bounds; unfit for training data."""


def encode_target_voxels(grid: np.ndarray) -> str:
    """Encode a binary grid to base64(zlib(one byte per voxel))."""
    raw = np.ascontiguousarray(grid, dtype=np.uint8).tobytes()
    return base64.b64encode(zlib.compress(raw)).decode("ascii")


def decode_target_voxels(s: str, world: WorldConfig = DEFAULT_WORLD) -> np.ndarray:
    """Exact inverse of encode_target_voxels for the given world size."""
    try:
        compressed = base64.b64decode(s, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise BadBase64(str(exc)) from None
    try:
        raw = zlib.decompress(compressed)
    except zlib.error as exc:
        raise BadCompression(str(exc)) from None
    if len(raw) != world.n_voxels:
        raise BadLength(f"expected {world.n_voxels} voxel bytes, got {len(raw)}")
    flat = np.frombuffer(raw, dtype=np.uint8)
    if flat.max(initial=0) > 1:
        raise BadValue("voxel bytes must be 0 or 1")
    return flat.reshape(world.shape).astype(bool)


@dataclass(frozen=True)
class SftRecord:
    system: str
    user: str
    assistant: str


@dataclass(frozen=True)
class GrpoRecord:
    system: str
    user: str
    target_voxels: str


def _feasible_occupancy(structure: BrickStructure, world: WorldConfig) -> np.ndarray:
    if len(structure) == 0:
        raise InfeasibleStructure("empty structure")
    a, occupied = analyze_with_occupancy(structure, world)
    if a.n_col > 0:
        raise InfeasibleStructure(f"{a.n_col} colliding voxels")
    if not a.fully_in_bounds:
        raise InfeasibleStructure("brick out of world bounds")
    return occupied


def build_sft_record(structure: BrickStructure, world: WorldConfig) -> SftRecord:
    occupied = _feasible_occupancy(structure, world)
    return SftRecord(
        system=SYSTEM_PROMPT,
        user=build_prompt(occupied),
        assistant=serialize_structure(structure, "one_per_line"),
    )


def build_grpo_record(structure: BrickStructure, world: WorldConfig) -> GrpoRecord:
    occupied = _feasible_occupancy(structure, world)
    return GrpoRecord(
        system=SYSTEM_PROMPT,
        user=build_prompt(occupied),
        target_voxels=encode_target_voxels(occupied),
    )


def convert_corpus(
    input_path: str,
    output_path: str,
    mode: str = "sft",
    world: WorldConfig = DEFAULT_WORLD,
) -> int:
    """Convert a corpus of brick layouts into training records.

    Input: newline-delimited JSON objects with a "bricks" field holding
    brick-sequence text. Streams line by line; records that fail to
    parse or are infeasible are logged and skipped. Returns the number
    of records written.
    """
    if mode not in ("sft", "grpo"):
        raise ValueError(f"unknown mode {mode!r}")
    build = build_sft_record if mode == "sft" else build_grpo_record
    count = 0
    with open(input_path, "r", encoding="utf-8") as src, open(
        output_path, "w", encoding="utf-8"
    ) as dst:
        for line_number, line in enumerate(src, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                text = obj["bricks"]
            except (json.JSONDecodeError, TypeError, KeyError) as exc:
                logger.warning("line %d: unreadable record (%s), skipped", line_number, exc)
                continue
            structure, report = parse_structure(str(text))
            if not report.parsed_ok:
                logger.warning("line %d: brick text did not parse, skipped", line_number)
                continue
            try:
                record = build(structure, world)
            except InfeasibleStructure as exc:
                logger.warning("line %d: infeasible structure (%s), skipped", line_number, exc)
                continue
            dst.write(json.dumps(asdict(record)) + "\n")
            count += 1
    return count
