"""Simplex combinatorics: barycentric points, multi-indices, Bernstein bases.

Everything here is pure and immutable; values can be shared freely across
threads. The canonical enumeration order for multi-indices (and for grid
points, which reuse it) is reverse-lexicographic: indices are listed in
decreasing lexicographic order, so ``(d, 0, ..., 0)`` comes first and
``(0, ..., 0, d)`` last. Serialized models rely on this order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

#: Absolute tolerance on the sum-to-one constraint of barycentric points.
SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class WeightVector:
    """A point of the standard simplex in barycentric coordinates.

    Components are non-negative and sum to one within ``SUM_TOLERANCE``.
    """

    components: tuple[float, ...]

    def __post_init__(self) -> None:
        comps = tuple(float(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("weight vector needs at least one component")
        for k, c in enumerate(comps):
            if not math.isfinite(c):
                raise ValueError(f"weight component {k + 1} is not finite: {c!r}")
            if c < 0.0:
                raise ValueError(f"weight component {k + 1} is negative: {c!r}")
        total = math.fsum(comps)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"weight components sum to {total!r}, not 1")

    @property
    def m(self) -> int:
        return len(self.components)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.components, dtype=float)

    def __getitem__(self, k: int) -> float:
        return self.components[k]

    def __iter__(self) -> Iterator[float]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)


def as_weight(w: WeightVector | Sequence[float], m: int | None = None) -> WeightVector:
    """Coerce a sequence to a validated WeightVector, optionally checking its dimension."""
    wv = w if isinstance(w, WeightVector) else WeightVector(tuple(w))
    if m is not None and wv.m != m:
        raise ValueError(f"expected a weight vector of dimension {m}, got {wv.m}")
    return wv


@dataclass(frozen=True)
class FaceIndex:
    """A non-empty subset of vertex labels {1..m}, strictly increasing."""

    members: tuple[int, ...]

    def __post_init__(self) -> None:
        members = tuple(int(i) for i in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("face index must be non-empty")
        if any(i < 1 for i in members):
            raise ValueError("face members are 1-based and must be >= 1")
        if any(a >= b for a, b in zip(members, members[1:])):
            raise ValueError("face members must be strictly increasing")

    @property
    def size(self) -> int:
        return len(self.members)

    def validate_ambient(self, m: int) -> None:
        if self.members[-1] > m:
            raise ValueError(f"face member {self.members[-1]} exceeds ambient dimension {m}")


@dataclass(frozen=True)
class MultiIndex:
    """An m-tuple of non-negative integer exponents; its degree is their sum."""

    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        exps = tuple(int(e) for e in self.exponents)
        object.__setattr__(self, "exponents", exps)
        if not exps:
            raise ValueError("multi-index needs at least one exponent")
        if any(e < 0 for e in exps):
            raise ValueError("multi-index exponents must be non-negative")

    @property
    def m(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def _compositions(m: int, d: int) -> Iterator[tuple[int, ...]]:
    # Reverse-lexicographic: leading entry descends from d to 0.
    if m == 1:
        yield (d,)
        return
    for head in range(d, -1, -1):
        for tail in _compositions(m - 1, d - head):
            yield (head,) + tail


@lru_cache(maxsize=None)
def exponent_matrix(m: int, d: int) -> np.ndarray:
    """All multi-indices of degree d in m variables as a read-only (count, m) int array."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if d < 0:
        raise ValueError("d must be >= 0")
    mat = np.array(list(_compositions(m, d)), dtype=np.int64)
    mat.setflags(write=False)
    return mat


def enumerate_multi_indices(m: int, d: int) -> list[MultiIndex]:
    """All multi-indices of degree d in m variables, reverse-lexicographic order.

    The count is C(d + m - 1, m - 1).
    """
    return [MultiIndex(tuple(row)) for row in exponent_matrix(m, d).tolist()]


def multi_index_count(m: int, d: int) -> int:
    return math.comb(d + m - 1, m - 1)


def multinomial_coefficient(d: int, i: MultiIndex | Sequence[int]) -> int:
    """d! / (i_1! ... i_m!) as an exact integer.

    Computed as a running product of binomial coefficients, which never forms
    an intermediate larger than the result. Python integers are unbounded, so
    overflow cannot occur silently.
    """
    exps = i.exponents if isinstance(i, MultiIndex) else tuple(int(e) for e in i)
    if any(e < 0 for e in exps):
        raise ValueError("exponents must be non-negative")
    if sum(exps) != d:
        raise ValueError(f"exponents sum to {sum(exps)}, expected degree {d}")
    coeff = 1
    running = 0
    for e in exps:
        running += e
        coeff *= math.comb(running, e)
    return coeff


@lru_cache(maxsize=None)
def multinomial_coefficients(m: int, d: int) -> np.ndarray:
    """Multinomial coefficients for all indices of exponent_matrix(m, d), as floats."""
    coeffs = np.array(
        [multinomial_coefficient(d, tuple(row)) for row in exponent_matrix(m, d).tolist()],
        dtype=float,
    )
    coeffs.setflags(write=False)
    return coeffs


def bernstein_value(d: int, i: MultiIndex | Sequence[int], w: WeightVector | Sequence[float]) -> float:
    """The Bernstein basis value C(d, i) * w^i, with the convention 0**0 = 1.

    The convention makes evaluation at simplex vertices exact.
    """
    exps = i.exponents if isinstance(i, MultiIndex) else tuple(int(e) for e in i)
    wv = as_weight(w)
    if len(exps) != wv.m:
        raise ValueError(f"multi-index has {len(exps)} entries but weight has {wv.m}")
    coeff = float(multinomial_coefficient(d, exps))
    value = coeff
    for e, c in zip(exps, wv.components):
        value *= c**e  # 0.0**0 == 1.0
    return value


def bernstein_design(d: int, weights: np.ndarray) -> np.ndarray:
    """Design matrix of all Bernstein basis values.

    ``weights`` has shape (N, m); the result has shape (N, C(d+m-1, m-1)) with
    columns in the canonical reverse-lexicographic index order.
    """
    W = np.asarray(weights, dtype=float)
    if W.ndim != 2:
        raise ValueError("weights must be a 2-D array of barycentric points")
    m = W.shape[1]
    exps = exponent_matrix(m, d)
    coeffs = multinomial_coefficients(m, d)
    # (N, 1, m) ** (1, count, m) -> product over the variable axis
    powers = W[:, None, :] ** exps[None, :, :]
    return coeffs[None, :] * powers.prod(axis=2)


def grid_points(m: int, resolution: int) -> list[WeightVector]:
    """The barycentric lattice (n_1, ..., n_m) / resolution with sum n_k = resolution.

    Points follow the canonical reverse-lexicographic order of their integer
    numerators; the count is C(resolution + m - 1, m - 1). Each component is a
    single exact rational n/resolution rounded once to binary, so sums stay
    within machine tolerance of one.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    res = float(resolution)
    return [
        WeightVector(tuple(n / res for n in row))
        for row in exponent_matrix(m, resolution).tolist()
    ]


def grid_array(m: int, resolution: int) -> np.ndarray:
    """grid_points as a plain (count, m) float array, same order."""
    return exponent_matrix(m, resolution).astype(float) / float(resolution)


def embed_face(face: FaceIndex | Iterable[int], w_face: WeightVector | Sequence[float], m: int) -> WeightVector:
    """Embed a barycentric point of a face into the ambient m-simplex.

    Components listed in ``face`` receive the entries of ``w_face``; all other
    components are exactly zero.
    """
    fi = face if isinstance(face, FaceIndex) else FaceIndex(tuple(face))
    fi.validate_ambient(m)
    wf = as_weight(w_face)
    if wf.m != fi.size:
        raise ValueError(f"face has {fi.size} members but the point has {wf.m} components")
    full = [0.0] * m
    for label, value in zip(fi.members, wf.components):
        full[label - 1] = value
    return WeightVector(tuple(full))


def face_coordinates(face: FaceIndex | Iterable[int], w: WeightVector | Sequence[float]) -> WeightVector:
    """Inverse of embed_face for points lying on the face.

    Off-face components must be exactly zero (up to SUM_TOLERANCE); the
    retained components are returned unchanged.
    """
    fi = face if isinstance(face, FaceIndex) else FaceIndex(tuple(face))
    wv = as_weight(w)
    fi.validate_ambient(wv.m)
    members = set(fi.members)
    for k, c in enumerate(wv.components, start=1):
        if k not in members and abs(c) > SUM_TOLERANCE:
            raise ValueError(f"component {k} = {c!r} is nonzero off the face")
    return WeightVector(tuple(wv.components[label - 1] for label in fi.members))
