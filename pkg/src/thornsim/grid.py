"""Uniform Cartesian grid driver: decomposition, ghosts, boundaries, reductions.

The global grid is split into contiguous slabs along its longest axis.  Each
partition owns an interior index box and stores every grid function with a
halo of ghost points on all axes.  Ghost synchronization copies neighbour
interior values (wrapping on periodic axes); physical-boundary ghosts belong
to the boundary operators.

Reductions gather interior data to ascending global index order before
accumulating, so their results are bitwise independent of the partition
count.  The whole module is shaped around that reproducibility contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ActivationError, MissingTimelevel, TooManyPartitions, UnknownVariable

REDUCTION_KINDS = ("sum", "min", "max", "norm2", "norm_inf")


@dataclass(frozen=True)
class GridSpec:
    """Global uniform Cartesian grid description.

    Parameters
    ----------
    dimensions : int
        1, 2, or 3.
    global_n : tuple of int
        Interior points per axis.
    lower, upper : tuple of float
        Physical extent per axis.  Point ``i`` sits at ``lower + i*h`` with
        ``h = (upper - lower)/global_n``; on periodic axes the domain is
        ``[lower, upper)`` and the point at ``upper`` is identified with
        ``lower``.
    boundary : tuple of str
        Per-axis, ``"periodic"`` or ``"physical"``.
    ghost : int
        Widest halo any stored group needs (bounds the decomposition).
    """

    dimensions: int
    global_n: tuple[int, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    boundary: tuple[str, ...]
    ghost: int = 1

    def __post_init__(self):
        if self.dimensions not in (1, 2, 3):
            raise ActivationError("grid dimensions must be 1, 2, or 3")
        for seq in (self.global_n, self.lower, self.upper, self.boundary):
            if len(seq) != self.dimensions:
                raise ActivationError("per-axis grid fields must match dimensions")
        for a in range(self.dimensions):
            if self.upper[a] <= self.lower[a]:
                raise ActivationError(f"axis {a}: upper must exceed lower")
            if self.global_n[a] < max(2 * self.ghost + 1, 1):
                raise ActivationError(
                    f"axis {a}: need at least {2 * self.ghost + 1} points for ghost width {self.ghost}"
                )
            if self.boundary[a] not in ("periodic", "physical"):
                raise ActivationError(f"axis {a}: boundary must be periodic or physical")

    @property
    def h(self) -> tuple[float, ...]:
        return tuple(
            (self.upper[a] - self.lower[a]) / self.global_n[a] for a in range(self.dimensions)
        )

    def coord(self, axis: int, index) -> np.ndarray | float:
        return self.lower[axis] + np.asarray(index) * self.h[axis]


@dataclass
class Partition:
    """One slab of the global grid plus its local variable storage."""

    rank: int
    spec: GridSpec
    lo: tuple[int, ...]  # inclusive global interior start per axis
    hi: tuple[int, ...]  # exclusive global interior end per axis
    # (low, high) neighbour rank per axis; None marks a physical boundary face
    neighbors: tuple[tuple[int | None, int | None], ...] = ()
    variables: dict[str, list[np.ndarray]] = field(default_factory=dict)
    ghosts: dict[str, int] = field(default_factory=dict)

    @property
    def interior_shape(self) -> tuple[int, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    def add_variable(self, name: str, timelevels: int, ghost: int) -> None:
        shape = tuple(n + 2 * ghost for n in self.interior_shape)
        self.variables[name] = [np.zeros(shape) for _ in range(timelevels)]
        self.ghosts[name] = ghost

    def data(self, name: str, timelevel: int = 0) -> np.ndarray:
        try:
            return self.variables[name][timelevel]
        except KeyError:
            raise UnknownVariable(f"no local storage for {name!r}") from None

    def interior(self, name: str, timelevel: int = 0) -> np.ndarray:
        g = self.ghosts[name]
        sl = tuple(slice(g, g + n) for n in self.interior_shape)
        return self.data(name, timelevel)[sl]

    def interior_coords(self, axis: int) -> np.ndarray:
        """Coordinates of owned interior points along one axis."""
        return np.asarray(self.spec.coord(axis, np.arange(self.lo[axis], self.hi[axis])))

    def coord_mesh(self) -> tuple[np.ndarray, ...]:
        """Per-axis interior coordinates shaped for broadcasting."""
        dims = self.spec.dimensions
        out = []
        for a in range(dims):
            c = self.interior_coords(a)
            shape = [1] * dims
            shape[a] = c.size
            out.append(c.reshape(shape))
        return tuple(out)


def decompose(spec: GridSpec, n_partitions: int) -> list[Partition]:
    """Split the global interior into contiguous slabs along the longest axis.

    Slab sizes differ by at most one, with the larger slabs at lower ranks.
    Raises TooManyPartitions when a slab would be thinner than the ghost
    width (or empty).
    """
    if n_partitions < 1:
        raise TooManyPartitions("need at least one partition")
    axis = max(range(spec.dimensions), key=lambda a: (spec.global_n[a], -a))
    n = spec.global_n[axis]
    base, rem = divmod(n, n_partitions)
    widths = [base + (1 if r < rem else 0) for r in range(n_partitions)]
    if min(widths) < max(spec.ghost, 1):
        raise TooManyPartitions(
            f"{n_partitions} slabs over {n} points leave a slab thinner than "
            f"ghost width {spec.ghost}"
        )

    partitions: list[Partition] = []
    start = 0
    for rank, width in enumerate(widths):
        lo = [0] * spec.dimensions
        hi = list(spec.global_n)
        lo[axis] = start
        hi[axis] = start + width
        start += width

        neighbors: list[tuple[int | None, int | None]] = []
        for a in range(spec.dimensions):
            periodic = spec.boundary[a] == "periodic"
            if a != axis:
                me = rank if periodic else None
                neighbors.append((me, me))
                continue
            low = rank - 1 if rank > 0 else (n_partitions - 1 if periodic else None)
            high = rank + 1 if rank < n_partitions - 1 else (0 if periodic else None)
            neighbors.append((low, high))

        partitions.append(
            Partition(
                rank=rank,
                spec=spec,
                lo=tuple(lo),
                hi=tuple(hi),
                neighbors=tuple(neighbors),
            )
        )
    return partitions


# ---------------------------------------------------------------------------
# Ghost synchronization


def _full_slices(ndim: int) -> list[slice]:
    return [slice(None)] * ndim


def sync_ghosts(partitions: list[Partition], members: list[str], timelevel: int = 0) -> None:
    """Refresh ghost points of the named variables from neighbour interiors.

    Axes are swept in ascending order so corner ghosts pick up already-synced
    data; the copied slabs span the full local extent of the other axes.
    Physical-boundary ghosts are left untouched.
    """
    if not partitions:
        return
    spec = partitions[0].spec
    for name in members:
        ghost = partitions[0].ghosts.get(name, 0)
        if ghost == 0:
            continue
        for axis in range(spec.dimensions):
            n = spec.global_n[axis]
            for part in partitions:
                dst = part.data(name, timelevel)
                for side, neighbor in zip((0, 1), part.neighbors[axis]):
                    if neighbor is None:
                        continue
                    src_part = partitions[neighbor]
                    src = src_part.data(name, timelevel)
                    # global index range this ghost slab covers (pre-wrap)
                    if side == 0:
                        g_lo = part.lo[axis] - ghost
                        dst_sl = slice(0, ghost)
                    else:
                        g_lo = part.hi[axis]
                        dst_sl = slice(dst.shape[axis] - ghost, dst.shape[axis])
                    src_start = (g_lo % n) - src_part.lo[axis] + src_part.ghosts[name]
                    dsl = _full_slices(spec.dimensions)
                    ssl = _full_slices(spec.dimensions)
                    dsl[axis] = dst_sl
                    ssl[axis] = slice(src_start, src_start + ghost)
                    dst[tuple(dsl)] = src[tuple(ssl)]


# ---------------------------------------------------------------------------
# Physical boundary conditions


def apply_boundary(
    partitions: list[Partition],
    members: list[str],
    parities: dict[str, str],
    kind: str,
    timelevels: int = 1,
    timelevel: int = 0,
) -> None:
    """Fill physical-boundary ghosts of the named variables.

    reflective
        Mirror about the boundary face: the k-th ghost takes the k-th
        interior value counted from the face, times +1 (even parity) or
        -1 (odd parity).
    radiative
        First-order outgoing-wave fill by linear extrapolation:
        ``ghost_k = edge + k*(edge - inner)``.  Requires two timelevels on
        the group (the nominal outgoing-wave form consumes the past level).
    """
    if kind == "radiative" and timelevels < 2:
        raise MissingTimelevel("radiative boundaries need at least 2 timelevels")
    if kind not in ("reflective", "radiative"):
        raise ActivationError(f"unknown boundary kind {kind!r}")
    if not partitions:
        return
    spec = partitions[0].spec
    for name in members:
        sign = -1.0 if parities.get(name, "even") == "odd" else 1.0
        for part in partitions:
            ghost = part.ghosts[name]
            if ghost == 0:
                continue
            arr = part.data(name, timelevel)
            for axis in range(spec.dimensions):
                n_int = part.interior_shape[axis]
                for side, neighbor in zip((0, 1), part.neighbors[axis]):
                    if neighbor is not None:
                        continue
                    for k in range(1, ghost + 1):
                        dsl = _full_slices(spec.dimensions)
                        if side == 0:
                            dsl[axis] = slice(ghost - k, ghost - k + 1)
                            edge, inner, mirror = ghost, ghost + 1, ghost + k - 1
                        else:
                            last = ghost + n_int - 1
                            dsl[axis] = slice(last + k, last + k + 1)
                            edge, inner, mirror = last, last - 1, last - (k - 1)
                        if kind == "reflective":
                            ssl = _full_slices(spec.dimensions)
                            ssl[axis] = slice(mirror, mirror + 1)
                            arr[tuple(dsl)] = sign * arr[tuple(ssl)]
                        else:
                            esl = _full_slices(spec.dimensions)
                            isl = _full_slices(spec.dimensions)
                            esl[axis] = slice(edge, edge + 1)
                            isl[axis] = slice(inner, inner + 1)
                            arr[tuple(dsl)] = (k + 1.0) * arr[tuple(esl)] - float(k) * arr[
                                tuple(isl)
                            ]


# ---------------------------------------------------------------------------
# Gather / scatter / reductions


def gather(partitions: list[Partition], name: str, timelevel: int = 0) -> np.ndarray:
    """Assemble the global interior array (ascending global index order)."""
    spec = partitions[0].spec
    out = np.empty(spec.global_n)
    for part in partitions:
        box = tuple(slice(l, h) for l, h in zip(part.lo, part.hi))
        out[box] = part.interior(name, timelevel)
    return out


def scatter(partitions: list[Partition], name: str, values: np.ndarray, timelevel: int = 0) -> None:
    """Distribute a global interior array back onto the partitions."""
    for part in partitions:
        box = tuple(slice(l, h) for l, h in zip(part.lo, part.hi))
        part.interior(name, timelevel)[...] = values[box]


@dataclass(frozen=True)
class ReductionResult:
    kind: str
    value: float


def _ordered_sum(flat: np.ndarray) -> float:
    # strict left-to-right accumulation: identical bits for any partitioning
    if flat.size == 0:
        return 0.0
    return float(np.cumsum(flat)[-1])


def reduce_variable(partitions: list[Partition], name: str, kind: str) -> ReductionResult:
    """Reduce over the global interior.

    sum and norm2 accumulate in ascending global index order regardless of
    the partition count; norm2 is the RMS value sqrt(sum(x^2)/count).
    """
    if kind not in REDUCTION_KINDS:
        raise ActivationError(f"unknown reduction kind {kind!r}")
    if not partitions or name not in partitions[0].variables:
        raise UnknownVariable(f"cannot reduce unknown variable {name!r}")
    flat = gather(partitions, name).ravel()
    if kind == "sum":
        value = _ordered_sum(flat)
    elif kind == "min":
        value = float(np.min(flat))
    elif kind == "max":
        value = float(np.max(flat))
    elif kind == "norm_inf":
        value = float(np.max(np.abs(flat)))
    else:  # norm2
        value = float(np.sqrt(_ordered_sum(flat * flat) / flat.size))
    return ReductionResult(kind, value)


__all__ = [
    "REDUCTION_KINDS",
    "GridSpec",
    "Partition",
    "ReductionResult",
    "decompose",
    "sync_ghosts",
    "apply_boundary",
    "gather",
    "scatter",
    "reduce_variable",
]
