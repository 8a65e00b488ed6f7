"""Structure geometry: rasterization, collisions, support, grounding, seams.

Definitions used throughout:

* A voxel collides when more than one brick occupies it.
* Brick j supports brick i when j sits exactly one layer below i and
  their footprints overlap; edges are undirected in the support graph.
* A brick is grounded when its support-graph component contains some
  brick at z = 0. The disconnected voxel set D holds occupied voxels
  covered only by ungrounded bricks; conn_score = 1 - |D| / max(|O|, 1).
* A brick interlocks when it is off the ground layer and rests on at
  least two distinct supporting bricks; interlock_score averages this
  indicator over non-ground bricks (denominator clamped to 1).
* A seam is a pair of horizontally adjacent occupied voxels in one
  layer owned by different bricks (ownership of a colliding voxel goes
  to the lowest-index brick). It is covered when a single brick in the
  layer above occupies both cells directly over the pair. The topmost
  layer has no layer above and is excluded from the seam total.

The heavy passes are vectorized: every library variant's footprint
offsets sit in a padded lookup table, so all cell coordinates come from
one broadcast add, and per-layer support tests are array comparisons
rather than Python pair loops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BRICK_LIBRARY, Brick, BrickStructure, WorldConfig

_PAD = max(d.h * d.w for d in BRICK_LIBRARY)
_PAD_RANGE = np.arange(_PAD, dtype=np.int64)


def _build_offset_tables() -> dict[int | None, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Padded per-variant footprint offsets, indexed by (h << 4) | w.

    For pair axis 0/1 the footprint is shortened by one along that axis
    so each emitted cell has its +axis neighbor inside the same brick.
    """
    size = max(((d.h << 4) | d.w) for d in BRICK_LIBRARY) + 1
    tables = {}
    for axis in (None, 0, 1):
        offx = np.zeros((size, _PAD), dtype=np.int64)
        offy = np.zeros((size, _PAD), dtype=np.int64)
        cnt = np.zeros(size, dtype=np.int64)
        for d in BRICK_LIBRARY:
            span_h = d.h - 1 if axis == 0 else d.h
            span_w = d.w - 1 if axis == 1 else d.w
            k = span_h * span_w
            code = (d.h << 4) | d.w
            offx[code, :k] = np.repeat(np.arange(span_h, dtype=np.int64), span_w)
            offy[code, :k] = np.tile(np.arange(span_w, dtype=np.int64), span_h)
            cnt[code] = k
        tables[axis] = (offx, offy, cnt)
    return tables


_OFFSETS = _build_offset_tables()


@dataclass
class OccupancyField:
    """Per-voxel brick multiplicity over the world grid."""

    counts: np.ndarray
    world: WorldConfig

    @property
    def occupied(self) -> np.ndarray:
        return self.counts > 0


@dataclass(frozen=True)
class StructureAnalysis:
    """All structural predicates of one brick structure."""

    n_col: int
    fully_in_bounds: bool
    occupied_count: int
    disconnected_count: int
    conn_score: float
    is_connected: bool
    interlock_score: float
    seam_coverage: float
    brick_count: int


class _Geometry:
    """Per-structure arrays shared by the analysis passes.

    Anchor coordinates are clamped to the world extent before entering
    int64 arrays. Everything at or past the upper bound is outside the
    world either way, so clamping preserves clipped-footprint semantics
    while keeping adversarially huge parsed integers finite. Layer keys
    stay exact Python ints so far-away layers never alias.
    """

    def __init__(self, structure: BrickStructure, world: WorldConfig):
        bricks = structure.bricks
        n = len(bricks)
        self.n = n
        self.world = world
        dim_x, dim_y, dim_z = world.shape
        dims, xs, ys, zs = zip(*bricks)
        hs = np.fromiter((d.h for d in dims), np.int64, n)
        ws = np.fromiter((d.w for d in dims), np.int64, n)
        try:
            ax = np.array(xs, dtype=np.int64)
            ay = np.array(ys, dtype=np.int64)
        except OverflowError:
            ax = np.fromiter((min(v, dim_x) for v in xs), np.int64, n)
            ay = np.fromiter((min(v, dim_y) for v in ys), np.int64, n)
        self.x0 = np.minimum(ax, dim_x)
        self.x1 = np.minimum(self.x0 + hs, dim_x)
        self.y0 = np.minimum(ay, dim_y)
        self.y1 = np.minimum(self.y0 + ws, dim_y)
        self.nonempty = (self.x0 < self.x1) & (self.y0 < self.y1)
        self.total_area = int(np.dot(hs, ws))
        self.hs = hs
        self.ws = ws

        layer_lists: dict[int, list[int]] = {}
        in_layer = np.zeros(n, dtype=bool)
        zc = np.zeros(n, dtype=np.int64)
        ground = np.zeros(n, dtype=bool)
        for i, z in enumerate(zs):
            layer_lists.setdefault(z, []).append(i)
            if 0 <= z < dim_z:
                in_layer[i] = True
                zc[i] = z
            if z == 0:
                ground[i] = True
        self.layers = {z: np.asarray(v, dtype=np.intp) for z, v in layer_lists.items()}
        self.in_layer = in_layer
        self.zc = zc
        self.ground = ground
        self._cells: tuple[np.ndarray, np.ndarray] | None = None

    def cells(self) -> tuple[np.ndarray, np.ndarray]:
        """Linear indices of all in-bounds voxels plus owning brick ids."""
        if self._cells is None:
            self._cells = self._scatter(pair_axis=None)
        return self._cells

    def pair_cells(self, pair_axis: int) -> np.ndarray:
        """Linear indices of cells whose +axis neighbor lies in the same brick."""
        return self._scatter(pair_axis=pair_axis)[0]

    def _scatter(self, pair_axis: int | None) -> tuple[np.ndarray, np.ndarray]:
        dim_y, dim_z = self.world.dim_y, self.world.dim_z
        offx, offy, cnt = _OFFSETS[pair_axis]
        code = (self.hs << 4) | self.ws
        gx = self.x0[:, None] + offx[code]
        gy = self.y0[:, None] + offy[code]
        # A pair cell needs its neighbor in bounds too, hence the -1.
        limx = self.x1 - 1 if pair_axis == 0 else self.x1
        limy = self.y1 - 1 if pair_axis == 1 else self.y1
        valid = (
            (_PAD_RANGE < cnt[code][:, None])
            & (gx < limx[:, None])
            & (gy < limy[:, None])
            & self.in_layer[:, None]
        )
        lin = (gx * dim_y + gy) * dim_z + self.zc[:, None]
        ids = np.broadcast_to(np.arange(self.n, dtype=np.intp)[:, None], valid.shape)
        return lin[valid], ids[valid]

    def support(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Distinct-lower-support counts and the support edge list."""
        sup = np.zeros(self.n, dtype=np.int64)
        eu_parts: list[np.ndarray] = []
        el_parts: list[np.ndarray] = []
        for z, up in self.layers.items():
            low = self.layers.get(z - 1)
            if low is None:
                continue
            ov = (
                (self.x0[up][:, None] < self.x1[low][None, :])
                & (self.x0[low][None, :] < self.x1[up][:, None])
                & (self.y0[up][:, None] < self.y1[low][None, :])
                & (self.y0[low][None, :] < self.y1[up][:, None])
                & self.nonempty[up][:, None]
                & self.nonempty[low][None, :]
            )
            sup[up] += ov.sum(axis=1)
            ui, lj = np.nonzero(ov)
            if ui.size:
                eu_parts.append(up[ui])
                el_parts.append(low[lj])
        if not eu_parts:
            empty = np.empty(0, dtype=np.intp)
            return sup, empty, empty
        return sup, np.concatenate(eu_parts), np.concatenate(el_parts)


def rasterize(structure: BrickStructure, world: WorldConfig) -> OccupancyField:
    """Count, per voxel, how many bricks occupy it (clipped to the world)."""
    counts = np.zeros(world.n_voxels, dtype=np.int64)
    if len(structure):
        geom = _Geometry(structure, world)
        lin, _ = geom.cells()
        counts = np.bincount(lin, minlength=world.n_voxels)
    return OccupancyField(counts.reshape(world.shape), world)


def collision_stats(field: OccupancyField) -> tuple[int, list[tuple[int, int, int]]]:
    """Colliding-voxel count and their coordinates in ascending order."""
    coords = np.argwhere(field.counts > 1)
    return len(coords), [tuple(int(c) for c in v) for v in coords]


def _clipped_interval(lo: int, size: int, bound: int | None) -> tuple[int, int]:
    if bound is None:
        return lo, lo + size
    lo = min(lo, bound)
    return lo, min(lo + size, bound)


def _footprints_overlap(a: Brick, b: Brick, world: WorldConfig | None) -> bool:
    ax0, ax1 = _clipped_interval(a.x, a.h, world.dim_x if world else None)
    bx0, bx1 = _clipped_interval(b.x, b.h, world.dim_x if world else None)
    ay0, ay1 = _clipped_interval(a.y, a.w, world.dim_y if world else None)
    by0, by1 = _clipped_interval(b.y, b.w, world.dim_y if world else None)
    return ax0 < bx1 and bx0 < ax1 and ay0 < by1 and by0 < ay1


def support_graph(
    structure: BrickStructure, world: WorldConfig | None = None
) -> list[list[int]]:
    """Undirected support adjacency over brick indices.

    Edge (i, j) iff the bricks sit on vertically adjacent layers and
    their footprints intersect. With a world given, footprints are
    clipped to it first, so bricks sticking out sideways only support
    through their in-world cells; without one, raw footprints are used.
    """
    n = len(structure)
    adj: list[list[int]] = [[] for _ in range(n)]
    by_layer: dict[int, list[int]] = {}
    for i, b in enumerate(structure):
        by_layer.setdefault(b.z, []).append(i)
    for z, uppers in by_layer.items():
        lowers = by_layer.get(z - 1)
        if lowers is None:
            continue
        for i in uppers:
            for j in lowers:
                if _footprints_overlap(structure[i], structure[j], world):
                    adj[i].append(j)
                    adj[j].append(i)
    return [sorted(neighbors) for neighbors in adj]


def _find(parent: list[int], i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


_EMPTY_ANALYSIS = StructureAnalysis(
    n_col=0,
    fully_in_bounds=True,
    occupied_count=0,
    disconnected_count=0,
    conn_score=1.0,
    is_connected=False,
    interlock_score=0.0,
    seam_coverage=1.0,
    brick_count=0,
)


def analyze(structure: BrickStructure, world: WorldConfig) -> StructureAnalysis:
    """Run every analysis pass once over shared geometry."""
    return analyze_with_occupancy(structure, world)[0]


def analyze_with_occupancy(
    structure: BrickStructure, world: WorldConfig
) -> tuple[StructureAnalysis, np.ndarray]:
    """analyze() plus the occupied grid, sharing a single rasterization."""
    n = len(structure)
    if n == 0:
        return _EMPTY_ANALYSIS, np.zeros(world.shape, dtype=bool)
    geom = _Geometry(structure, world)
    n_voxels = world.n_voxels
    lin, ids = geom.cells()
    counts = np.bincount(lin, minlength=n_voxels)
    n_col = int((counts > 1).sum())
    occupied = counts > 0
    occupied_count = int(occupied.sum())
    fully_in_bounds = lin.size == geom.total_area

    sup_counts, edge_up, edge_low = geom.support()
    nonground = ~geom.ground
    n_nonground = int(nonground.sum())
    interlock = float(
        ((sup_counts >= 2) & nonground).sum() / max(n_nonground, 1)
    )

    parent = list(range(n))
    for u, l in zip(edge_up.tolist(), edge_low.tolist()):
        ru, rl = _find(parent, u), _find(parent, l)
        if ru != rl:
            parent[ru] = rl
    roots = [_find(parent, i) for i in range(n)]
    grounded_roots = {roots[i] for i in np.flatnonzero(geom.ground)}
    if grounded_roots:
        grounded_mask = np.fromiter((r in grounded_roots for r in roots), bool, n)
        grounded_occ = np.zeros(n_voxels, dtype=bool)
        grounded_occ[lin[grounded_mask[ids]]] = True
        disconnected = int((occupied & ~grounded_occ).sum())
    else:
        disconnected = occupied_count
    conn_score = 1.0 - disconnected / max(occupied_count, 1)
    is_connected = (
        disconnected == 0 and len(set(roots)) == 1 and bool(grounded_roots)
    )

    seam = _seam_score(geom, lin, ids, occupied)
    result = StructureAnalysis(
        n_col=n_col,
        fully_in_bounds=fully_in_bounds,
        occupied_count=occupied_count,
        disconnected_count=disconnected,
        conn_score=conn_score,
        is_connected=is_connected,
        interlock_score=interlock,
        seam_coverage=seam,
        brick_count=n,
    )
    return result, occupied.reshape(world.shape)


def _seam_score(
    geom: _Geometry, lin: np.ndarray, ids: np.ndarray, occupied: np.ndarray
) -> float:
    world = geom.world
    dim_z = world.dim_z
    owner = np.full(world.n_voxels, -1, dtype=np.int64)
    # Write cells in descending brick id so the lowest index wins ties.
    order = np.argsort(ids)[::-1]
    owner[lin[order]] = ids[order]
    o3 = owner.reshape(world.shape)

    covered = 0
    total = 0
    for axis in (0, 1):
        cov = np.zeros(world.n_voxels, dtype=bool)
        cov[geom.pair_cells(axis)] = True
        c3 = cov.reshape(world.shape)
        if axis == 0:
            a, b, c = o3[:-1, :, :], o3[1:, :, :], c3[:-1, :, :]
        else:
            a, b, c = o3[:, :-1, :], o3[:, 1:, :], c3[:, :-1, :]
        seams = (a != -1) & (b != -1) & (a != b)
        seams = seams[:, :, : dim_z - 1]
        total += int(seams.sum())
        covered += int((seams & c[:, :, 1:dim_z]).sum())
    return 1.0 if total == 0 else covered / total


def grounded_components(
    structure: BrickStructure, world: WorldConfig
) -> tuple[int, int, bool]:
    """(occupied voxels, voxels owned only by ungrounded bricks, all-grounded-and-connected)."""
    a = analyze(structure, world)
    return a.occupied_count, a.disconnected_count, a.is_connected


def interlock_score(
    structure: BrickStructure, world: WorldConfig | None = None
) -> float:
    """Fraction of non-ground bricks resting on two or more distinct supports.

    With a world given, support uses world-clipped footprints to match
    analyze(); without one, raw footprints.
    """
    if world is not None:
        return analyze(structure, world).interlock_score
    adj = support_graph(structure)
    nonground = [i for i, b in enumerate(structure) if b.z > 0]
    if not structure:
        return 0.0
    hits = 0
    for i in nonground:
        below = sum(1 for j in adj[i] if structure[j].z == structure[i].z - 1)
        if below >= 2:
            hits += 1
    return hits / max(len(nonground), 1)


def seam_coverage(structure: BrickStructure, world: WorldConfig) -> float:
    """Fraction of covered seams; 1.0 when no seams exist."""
    return analyze(structure, world).seam_coverage
