"""Finite cubespaces: configurations, discrete-cube morphisms, axioms.

Conventions used everywhere in this package:

* A *k-configuration* is a plain tuple of ``2**k`` point ids.  The entry at
  index ``i`` holds the value at the vertex ``w = (w_1, ..., w_k)`` with
  ``i = sum(w_j * 2**(j-1))`` — the first coordinate is the least
  significant bit.  Serialization uses the same order.
* Points are hashable ids (ints or strings).  The global order on points is
  lexicographic on ``str(p)``; it drives every deterministic tie-break.
* Cube sets are frozensets of configurations; reports and witnesses always
  iterate sorted snapshots.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .caps import Caps, default_caps
from .errors import InternalConsistencyError, InvalidInput

Point = object
Config = tuple

# symbol codes for one output coordinate of a discrete-cube morphism:
# 0 -> constant 0, 1 -> constant 1, 2 + 2*(i-1) -> w_i, 3 + 2*(i-1) -> 1 - w_i
CONST0 = 0
CONST1 = 1


def var(i: int) -> int:
    return 2 + 2 * (i - 1)


def negvar(i: int) -> int:
    return 3 + 2 * (i - 1)


def point_key(p) -> str:
    return str(p)


def config_key(c: Config) -> tuple:
    return tuple(str(x) for x in c)


def config_dim(c: Sequence) -> int:
    n = len(c)
    k = n.bit_length() - 1
    if n != 1 << k:
        raise InvalidInput(f"configuration length {n} is not a power of two")
    return k


def vertex_weight(i: int) -> int:
    """Number of coordinates equal to 1 at vertex index ``i``."""
    return bin(i).count("1")


@dataclass(frozen=True)
class CubeMorphism:
    """A map {0,1}^k -> {0,1}^l whose coordinates are constants or (negated) variables."""

    k: int
    l: int
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.l:
            raise InvalidInput("coords length must equal target dimension")
        for sym in self.coords:
            if not (0 <= sym < 2 + 2 * self.k):
                raise InvalidInput(f"bad coordinate symbol {sym} for source dim {self.k}")

    def vertex_table(self) -> tuple:
        """table[w] = index of the image vertex of source vertex ``w``."""
        return _vertex_table(self.k, self.l, self.coords)

    def describe(self) -> str:
        names = []
        for sym in self.coords:
            if sym == CONST0:
                names.append("0")
            elif sym == CONST1:
                names.append("1")
            elif sym % 2 == 0:
                names.append(f"w{sym // 2}")
            else:
                names.append(f"~w{sym // 2}")
        return f"({', '.join(names)})" if names else "()"


@lru_cache(maxsize=None)
def _vertex_table(k: int, l: int, coords: tuple) -> tuple:
    table = []
    for w in range(1 << k):
        out = 0
        for j, sym in enumerate(coords):
            if sym == CONST1:
                bit = 1
            elif sym == CONST0:
                bit = 0
            else:
                i = sym // 2  # 1-based source coordinate
                bit = (w >> (i - 1)) & 1
                if sym % 2 == 1:
                    bit ^= 1
            out |= bit << j
        table.append(out)
    return tuple(table)


@lru_cache(maxsize=None)
def _morphism_list(k: int, l: int) -> tuple:
    alphabet = list(range(2 + 2 * k))
    return tuple(
        CubeMorphism(k, l, coords) for coords in itertools.product(alphabet, repeat=l)
    )


def enumerate_cube_morphisms(k: int, l: int, caps: Caps | None = None) -> tuple:
    """All ``(2 + 2k)**l`` discrete-cube morphisms {0,1}^k -> {0,1}^l, in a fixed order."""
    caps = caps or default_caps()
    if k < 0 or l < 0:
        raise InvalidInput("dimensions must be non-negative")
    if k > caps.max_dim or l > caps.max_dim:
        caps.check("morphism enumeration dimension", max(k, l), "max_dim")
    return _morphism_list(k, l)


def apply_morphism(c: Config, rho: CubeMorphism) -> Config:
    """Precompose the configuration ``c`` with ``rho`` (result dimension ``rho.k``)."""
    if config_dim(c) != rho.l:
        raise InvalidInput(f"configuration dim {config_dim(c)} != morphism target dim {rho.l}")
    table = rho.vertex_table()
    return tuple(c[t] for t in table)


# ---------------------------------------------------------------------------
# faces of {0,1}^n


@dataclass(frozen=True)
class Face:
    """The face of {0,1}^n fixing the coordinates in ``mask`` to ``vals``."""

    n: int
    mask: int
    vals: int

    @property
    def dim(self) -> int:
        return self.n - bin(self.mask).count("1")

    def __contains__(self, w: int) -> bool:
        return (w & self.mask) == self.vals

    def vertices(self) -> tuple:
        return tuple(w for w in range(1 << self.n) if (w & self.mask) == self.vals)


@lru_cache(maxsize=None)
def faces_of_dim(n: int, d: int) -> tuple:
    """All d-faces of {0,1}^n, ordered by (fixed-coordinate mask asc, fixed values asc)."""
    out = []
    for mask in range(1 << n):
        if n - bin(mask).count("1") != d:
            continue
        fixed_bits = [j for j in range(n) if mask >> j & 1]
        for assign in range(1 << len(fixed_bits)):
            vals = 0
            for t, j in enumerate(fixed_bits):
                if assign >> t & 1:
                    vals |= 1 << j
            out.append(Face(n, mask, vals))
    out.sort(key=lambda f: (f.mask, f.vals))
    return tuple(out)


@lru_cache(maxsize=None)
def all_faces(n: int) -> tuple:
    """Faces of every dimension, sorted by (dimension desc, mask asc, values asc)."""
    out = []
    for d in range(n, -1, -1):
        out.extend(faces_of_dim(n, d))
    return tuple(out)


def hyperfaces(n: int) -> tuple:
    return faces_of_dim(n, n - 1)


# ---------------------------------------------------------------------------
# cubespaces


class CubeSpace:
    """A finite point set with explicit cube sets up to a dimension cap.

    ``cubes[k]`` holds the k-cubes for ``1 <= k <= max_dim``; the 0-cubes are
    the points themselves.  Instances are immutable; derived data (index
    arrays, corner-completion tables) is cached on first use.
    """

    def __init__(self, points: Iterable, cubes: Mapping[int, Iterable[Config]],
                 max_dim: int, name: str = "", caps: Caps | None = None):
        caps = caps or default_caps()
        pts = sorted(set(points), key=point_key)
        if not pts:
            raise InvalidInput("a cubespace needs at least one point")
        caps.check("cubespace points", len(pts), "max_points")
        keys = [point_key(p) for p in pts]
        if len(set(keys)) != len(keys):
            raise InvalidInput("point ids must have distinct string forms")
        if max_dim < 1:
            raise InvalidInput("max_dim must be at least 1")
        caps.check("cubespace max_dim", max_dim, "max_dim")
        self.points: tuple = tuple(pts)
        self.max_dim = max_dim
        self.name = name or "cubespace"
        pset = set(pts)
        store = {}
        for k in range(1, max_dim + 1):
            if k not in cubes:
                raise InvalidInput(f"cube set for dimension {k} is missing")
            level = frozenset(tuple(c) for c in cubes[k])
            caps.check(f"cube set C^{k}", len(level), "cube_set")
            for c in level:
                if len(c) != 1 << k:
                    raise InvalidInput(
                        f"{self.name}: a {k}-cube has length {len(c)}, expected {1 << k}")
                for x in c:
                    if x not in pset:
                        raise InvalidInput(f"{self.name}: cube value {x!r} is not a point")
            store[k] = level
        self.cubes: dict = store
        self._index = {p: i for i, p in enumerate(self.points)}
        self._cache: dict = {}

    # -- basic accessors ----------------------------------------------------

    def __repr__(self):
        sizes = ", ".join(f"|C^{k}|={len(self.cubes[k])}" for k in sorted(self.cubes))
        return f"CubeSpace({self.name}: {len(self.points)} points, {sizes})"

    def point_index(self, p) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise InvalidInput(f"{p!r} is not a point of {self.name}") from None

    def cube_set(self, k: int) -> frozenset:
        if k == 0:
            return frozenset((p,) for p in self.points)
        if k not in self.cubes:
            raise InvalidInput(f"dimension {k} exceeds max_dim {self.max_dim}")
        return self.cubes[k]

    def has_cube(self, c: Config) -> bool:
        k = config_dim(c)
        if k == 0:
            return c[0] in self._index
        return c in self.cube_set(k)

    def sorted_cubes(self, k: int) -> tuple:
        key = ("sorted", k)
        if key not in self._cache:
            self._cache[key] = tuple(sorted(self.cube_set(k), key=config_key))
        return self._cache[key]

    # -- numpy views ---------------------------------------------------------

    def index_array(self, k: int) -> np.ndarray:
        """Cubes of dim k as an (N, 2**k) int array of point indices, rows sorted."""
        key = ("arr", k)
        if key not in self._cache:
            rows = [tuple(self._index[x] for x in c) for c in self.sorted_cubes(k)]
            arr = np.array(rows, dtype=np.int64) if rows else np.empty((0, 1 << k), np.int64)
            self._cache[key] = arr
        return self._cache[key]

    def encoded_set(self, k: int) -> set:
        """Set of base-|points| encodings of the k-cubes (python ints)."""
        key = ("enc", k)
        if key not in self._cache:
            base = len(self.points)
            out = set()
            for c in self.cube_set(k):
                code = 0
                for x in reversed(c):
                    code = code * base + self._index[x]
                out.add(code)
            self._cache[key] = out
        return self._cache[key]

    def encode(self, c: Config) -> int:
        base = len(self.points)
        code = 0
        for x in reversed(c):
            code = code * base + self._index[x]
        return code

    def contains_rows(self, k: int, rows: np.ndarray) -> np.ndarray:
        """Vectorized membership of index rows (shape (N, 2**k)) in C^k."""
        base = len(self.points)
        v = 1 << k
        if rows.size == 0:
            return np.ones(0, dtype=bool)
        if base ** v < (1 << 62):
            weights = (base ** np.arange(v, dtype=np.int64))
            codes = rows @ weights
            key = ("encarr", k)
            if key not in self._cache:
                own = self.index_array(k) @ weights
                own.sort()
                self._cache[key] = own
            own = self._cache[key]
            pos = np.searchsorted(own, codes)
            pos = np.clip(pos, 0, len(own) - 1)
            return (own[pos] == codes) if len(own) else np.zeros(len(rows), dtype=bool)
        enc = self.encoded_set(k)
        base_i = base
        out = np.empty(len(rows), dtype=bool)
        for i, row in enumerate(rows):
            code = 0
            for x in row[::-1]:
                code = code * base_i + int(x)
            out[i] = code in enc
        return out

    # -- corner-completion tables -------------------------------------------

    def completion_table(self, k: int) -> dict:
        """Map from corner restriction (first 2**k - 1 entries) to sorted completions."""
        key = ("completions", k)
        if key not in self._cache:
            table: dict = {}
            for c in self.sorted_cubes(k):
                table.setdefault(c[:-1], []).append(c[-1])
            for prefix in table:
                table[prefix].sort(key=point_key)
            self._cache[key] = table
        return self._cache[key]


# ---------------------------------------------------------------------------
# verdict containers


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    space: str
    checked_dim: int
    failures: tuple = ()

    def __bool__(self):
        return self.ok

    def first_witness(self):
        return self.failures[0] if self.failures else None


@dataclass(frozen=True)
class GluingReport:
    ok: bool
    checked_dim: int
    witness: tuple | None = None  # (k, c1, c2, c3)

    def __bool__(self):
        return self.ok


def validate_cubespace(X: CubeSpace, caps: Caps | None = None,
                       first_failure_only: bool = True) -> ValidationReport:
    """Check the closure axiom by full morphism enumeration up to ``max_dim``.

    Reports PASS or the first violating triple ``(l, cube, morphism)`` in a
    deterministic scan order (l asc, then k asc, then morphism order, then
    sorted cubes).
    """
    caps = caps or default_caps()
    K = X.max_dim
    failures = []
    for l in range(0, K + 1):
        if l == 0:
            # closure of 0-cubes: every constant configuration is a cube
            for k in range(1, K + 1):
                for p in X.points:
                    if tuple([p] * (1 << k)) not in X.cube_set(k):
                        failures.append((0, (p,), _morphism_list(k, 0)[0]))
                        if first_failure_only:
                            return ValidationReport(False, X.name, K, tuple(failures))
            continue
        arr = X.index_array(l)
        for k in range(1, K + 1):
            # k = 0 images are single points, always cubes
            for rho in enumerate_cube_morphisms(k, l, caps):
                table = np.array(rho.vertex_table(), dtype=np.int64)
                images = arr[:, table]
                ok = X.contains_rows(k, images)
                if not ok.all():
                    bad = np.flatnonzero(~ok)
                    cubes_sorted = X.sorted_cubes(l)
                    c = cubes_sorted[int(bad[0])]
                    failures.append((l, c, rho))
                    if first_failure_only:
                        return ValidationReport(False, X.name, K, tuple(failures))
    return ValidationReport(not failures, X.name, K, tuple(failures))


def is_ergodic(X: CubeSpace) -> bool:
    """True iff every ordered pair of points is a 1-cube."""
    return len(X.cube_set(1)) == len(X.points) ** 2


def is_gluing(X: CubeSpace) -> GluingReport:
    """Concatenation transitivity at every dimension below the cap.

    Returns the first witness triple ``(k, c1, c2, c3)`` such that
    ``[c1,c2]`` and ``[c2,c3]`` are cubes but ``[c1,c3]`` is not.
    """
    key = "gluing"
    if key in X._cache:
        return X._cache[key]
    report = None
    for k in range(0, X.max_dim):
        half = 1 << k
        succ: dict = {}
        for c in X.sorted_cubes(k + 1):
            succ.setdefault(c[:half], []).append(c[half:])
        level = X.cube_set(k + 1)
        for c1 in sorted(succ, key=config_key):
            for c2 in succ[c1]:
                for c3 in succ.get(c2, ()):
                    if c1 + c3 not in level:
                        report = GluingReport(False, X.max_dim, (k, c1, c2, c3))
                        X._cache[key] = report
                        return report
    report = GluingReport(True, X.max_dim)
    X._cache[key] = report
    return report


# ---------------------------------------------------------------------------
# elementary configuration operations


def concatenate(c1: Config, c2: Config, axis: int | None = None) -> Config:
    """Concatenation along ``axis`` (1-based); defaults to the new last axis."""
    d = config_dim(c1)
    if config_dim(c2) != d:
        raise InvalidInput("concatenation needs equal dimensions")
    if axis is None:
        axis = d + 1
    if not 1 <= axis <= d + 1:
        raise InvalidInput(f"axis {axis} out of range 1..{d + 1}")
    if axis == d + 1:
        return tuple(c1) + tuple(c2)
    low_mask = (1 << (axis - 1)) - 1
    out = []
    for w in range(1 << (d + 1)):
        src = (w & low_mask) | ((w >> axis) << (axis - 1))
        out.append(c2[src] if (w >> (axis - 1)) & 1 else c1[src])
    return tuple(out)


def generalized_corner(c1: Config, c2: Config, l: int) -> Config:
    """Configuration of dim n+l equal to c2 on the top face (w, 1...1) and c1 elsewhere."""
    n = config_dim(c1)
    if config_dim(c2) != n:
        raise InvalidInput("generalized corner needs equal dimensions")
    if l < 0:
        raise InvalidInput("l must be non-negative")
    mask = (1 << n) - 1
    top = (1 << l) - 1
    return tuple(
        (c2 if (w >> n) == top else c1)[w & mask] for w in range(1 << (n + l))
    )


def corner_pair(x, x_prime, k: int) -> Config:
    """The k-configuration with ``x_prime`` at the all-ones vertex and ``x`` elsewhere."""
    return generalized_corner((x,), (x_prime,), k)


def product(X: CubeSpace, Y: CubeSpace, caps: Caps | None = None) -> CubeSpace:
    """Categorical product; cubes are pairs of cubes taken vertex-wise."""
    caps = caps or default_caps()
    if X.max_dim != Y.max_dim:
        raise InvalidInput("product requires equal max_dim")
    caps.check("product points", len(X.points) * len(Y.points), "max_points")
    points = [(p, q) for p in X.points for q in Y.points]
    cubes = {}
    for k in range(1, X.max_dim + 1):
        caps.check(f"product C^{k}", len(X.cube_set(k)) * len(Y.cube_set(k)), "cube_set")
        cubes[k] = {
            tuple(zip(cx, cy))
            for cx in X.cube_set(k)
            for cy in Y.cube_set(k)
        }
    Z = CubeSpace(points, cubes, X.max_dim, name=f"{X.name}x{Y.name}", caps=caps)
    report = validate_cubespace(Z, caps)
    if not report.ok:
        raise InternalConsistencyError(f"product of valid spaces failed validation: {report.first_witness()}")
    return Z


def subcubespace(X: CubeSpace, S: Iterable) -> CubeSpace:
    """Restriction to the points in S; closure is preserved by restriction."""
    S = set(S)
    if not S:
        raise InvalidInput("subcubespace needs a non-empty point set")
    for p in S:
        X.point_index(p)
    cubes = {
        k: {c for c in X.cube_set(k) if all(x in S for x in c)}
        for k in range(1, X.max_dim + 1)
    }
    return CubeSpace(S, cubes, X.max_dim, name=f"{X.name}|{len(S)}pts")


def one_point_space(max_dim: int = 4, label="*") -> CubeSpace:
    cubes = {k: {tuple([label] * (1 << k))} for k in range(1, max_dim + 1)}
    return CubeSpace([label], cubes, max_dim, name="point")
