"""Cubespace maps: morphisms, corners, completion, fibration verdicts, fibers.

Corner enumeration is a depth-first search over the vertices of the punctured
cube in index order, pruning with every face of the partial assignment that
does not contain the all-ones vertex (restrictions of a corner's lower faces
are cubes, so those checks are exact).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .caps import Caps, default_caps
from .core import (CubeSpace, Config, config_key, point_key,
                   faces_of_dim, subcubespace)
from .errors import CapExceeded, InternalConsistencyError, InvalidInput


@dataclass(frozen=True)
class CubeMap:
    """A total point map between two cubespaces (morphism-ness is checked, not assumed)."""

    domain: CubeSpace
    codomain: CubeSpace
    assign: dict
    name: str = "map"

    def __post_init__(self):
        if self.domain.max_dim != self.codomain.max_dim:
            raise InvalidInput("domain and codomain must share max_dim")
        missing = [p for p in self.domain.points if p not in self.assign]
        if missing:
            raise InvalidInput(f"{self.name}: map not defined at {missing[0]!r}")
        for p in self.domain.points:
            self.codomain.point_index(self.assign[p])

    def __call__(self, x):
        return self.assign[x]

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other

    def image_config(self, c: Config) -> Config:
        return tuple(self.assign[x] for x in c)

    def fibers(self) -> dict:
        out: dict = {y: [] for y in self.codomain.points}
        for x in self.domain.points:
            out[self.assign[x]].append(x)
        return {y: tuple(xs) for y, xs in out.items()}

    def is_surjective(self) -> bool:
        return all(len(v) for v in self.fibers().values())

    @classmethod
    def identity(cls, X: CubeSpace) -> "CubeMap":
        return cls(X, X, {p: p for p in X.points}, name=f"id_{X.name}")

    @classmethod
    def constant(cls, X: CubeSpace, Y: CubeSpace, y) -> "CubeMap":
        return cls(X, Y, {p: y for p in X.points}, name="const")


def compose(g: CubeMap, f: CubeMap, name: str = "") -> CubeMap:
    """g after f."""
    if f.codomain is not g.domain and f.codomain.points != g.domain.points:
        raise InvalidInput("composition undefined: codomain/domain mismatch")
    return CubeMap(f.domain, g.codomain, {p: g.assign[f.assign[p]] for p in f.domain.points},
                   name=name or f"{g.name}*{f.name}")


@dataclass(frozen=True)
class MorphismReport:
    ok: bool
    witness: tuple | None = None  # (k, cube)

    def __bool__(self):
        return self.ok


def is_morphism(f: CubeMap, caps: Caps | None = None) -> MorphismReport:
    """True iff the image of every cube set lands in the codomain's cube set."""
    key = ("morphism", id(f))
    if key in f.domain._cache:
        return f.domain._cache[key]
    lookup = np.array([f.codomain.point_index(f.assign[p]) for p in f.domain.points],
                      dtype=np.int64)
    report = MorphismReport(True)
    for k in range(1, f.domain.max_dim + 1):
        arr = f.domain.index_array(k)
        if not len(arr):
            continue
        images = lookup[arr]
        ok = f.codomain.contains_rows(k, images)
        if not ok.all():
            bad = int(np.flatnonzero(~ok)[0])
            report = MorphismReport(False, (k, f.domain.sorted_cubes(k)[bad]))
            break
    f.domain._cache[key] = report
    return report


# ---------------------------------------------------------------------------
# corners


@dataclass(frozen=True)
class Corner:
    """A configuration on the punctured cube (all vertices except all-ones)."""

    dim: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != (1 << self.dim) - 1:
            raise InvalidInput(
                f"a {self.dim}-corner needs {(1 << self.dim) - 1} values, got {len(self.values)}")

    def lower_face(self, i: int) -> Config:
        """The face w_i = 0 as a (dim-1)-configuration."""
        n = self.dim
        out = []
        for w in range(1 << n):
            if not (w >> (i - 1)) & 1:
                out.append(self.values[w])
        return tuple(out)

    def completed(self, x) -> Config:
        return self.values + (x,)


def validate_corner(X: CubeSpace, corner: Corner):
    """Every lower face must be a cube; returns the first failing face index or None."""
    for i in range(1, corner.dim + 1):
        if not X.has_cube(corner.lower_face(i)):
            return i
    return None


@lru_cache(maxsize=None)
def _check_faces_by_vertex(n: int) -> tuple:
    """For each vertex v of the punctured cube: faces (as vertex tuples) not
    containing the all-ones vertex whose maximal vertex is v, dimension >= 1."""
    top = (1 << n) - 1
    buckets = [[] for _ in range(top)]
    for d in range(1, n):
        for face in faces_of_dim(n, d):
            verts = face.vertices()
            if top in verts:
                continue
            buckets[max(verts)].append(verts)
    return tuple(tuple(b) for b in buckets)


def enumerate_corners(X: CubeSpace, k: int, caps: Caps | None = None):
    """Yield every valid k-corner value tuple, in deterministic DFS order."""
    caps = caps or default_caps()
    if k == 0:
        yield ()
        return
    if k == 1:
        for p in X.points:
            yield (p,)
        return
    n_vertices = (1 << k) - 1
    buckets = _check_faces_by_vertex(k)
    points = X.points
    nodes = 0
    values: list = [None] * n_vertices

    def cube_ok(verts) -> bool:
        cfg = tuple(values[w] for w in verts)
        return X.has_cube(cfg)

    def rec(v: int):
        nonlocal nodes
        if v == n_vertices:
            yield tuple(values)
            return
        for p in points:
            values[v] = p
            nodes += 1
            if nodes > caps.search_nodes:
                raise CapExceeded("corner enumeration", nodes, caps.search_nodes)
            if all(cube_ok(verts) for verts in buckets[v]):
                yield from rec(v + 1)
        values[v] = None

    yield from rec(0)


def complete_corner(X: CubeSpace, corner: Corner) -> tuple:
    """All points completing the corner to a cube, in global order."""
    if corner.dim > X.max_dim:
        raise InvalidInput(f"corner dimension {corner.dim} exceeds max_dim {X.max_dim}")
    bad = validate_corner(X, corner)
    if bad is not None:
        raise InvalidInput(f"invalid corner: lower face w_{bad}=0 is not a cube")
    if corner.dim == 0:
        return tuple(X.points)
    return tuple(X.completion_table(corner.dim).get(corner.values, ()))


@dataclass(frozen=True)
class FibrancyReport:
    ok: bool
    checked_dim: int
    witness: Corner | None = None

    def __bool__(self):
        return self.ok


def is_fibrant(X: CubeSpace, caps: Caps | None = None) -> FibrancyReport:
    """Corner completion at every dimension up to max_dim (bound recorded)."""
    caps = caps or default_caps()
    if "fibrant" in X._cache:
        return X._cache["fibrant"]
    report = FibrancyReport(True, X.max_dim)
    for k in range(1, X.max_dim + 1):
        table = X.completion_table(k)
        for values in enumerate_corners(X, k, caps):
            if values not in table:
                report = FibrancyReport(False, X.max_dim, Corner(k, values))
                X._cache["fibrant"] = report
                return report
    X._cache["fibrant"] = report
    return report


# ---------------------------------------------------------------------------
# uniqueness and degree


@dataclass(frozen=True)
class UniquenessReport:
    ok: bool
    k: int
    relative: bool
    witness: tuple | None = None  # (cube1, cube2)

    def __bool__(self):
        return self.ok


def has_k_uniqueness(subject, k: int, caps: Caps | None = None) -> UniquenessReport:
    """No two distinct k-cubes share their corner restriction (and image, for maps)."""
    if isinstance(subject, CubeSpace):
        key = ("uniq", k)
        if key in subject._cache:
            return subject._cache[key]
        table = subject.completion_table(k)
        report = UniquenessReport(True, k, False)
        for prefix in sorted(table, key=config_key):
            comps = table[prefix]
            if len(comps) > 1:
                report = UniquenessReport(
                    False, k, False, (prefix + (comps[0],), prefix + (comps[1],)))
                break
        subject._cache[key] = report
        return report
    f: CubeMap = subject
    groups: dict = {}
    for c in f.domain.sorted_cubes(k):
        groups.setdefault((c[:-1], f.image_config(c)), []).append(c)
    for key in sorted(groups, key=lambda t: (config_key(t[0]), config_key(t[1]))):
        bunch = groups[key]
        if len(bunch) > 1:
            bunch.sort(key=config_key)
            return UniquenessReport(False, k, True, (bunch[0], bunch[1]))
    return UniquenessReport(True, k, True)


@dataclass(frozen=True)
class DegreeReport:
    degree: int | None
    fibrant: FibrancyReport
    checked_dim: int

    @property
    def capped(self) -> bool:
        return self.degree is None and self.fibrant.ok


def nilspace_degree(X: CubeSpace, caps: Caps | None = None) -> DegreeReport:
    """Smallest s with fibrancy and (s+1)-uniqueness, searched up to max_dim."""
    caps = caps or default_caps()
    if "degree" in X._cache:
        return X._cache["degree"]
    fib = is_fibrant(X, caps)
    degree = None
    if fib.ok:
        for s in range(0, X.max_dim):
            if has_k_uniqueness(X, s + 1, caps).ok:
                degree = s
                break
    report = DegreeReport(degree, fib, X.max_dim)
    X._cache["degree"] = report
    return report


# ---------------------------------------------------------------------------
# relative ergodicity


def is_relatively_k_ergodic(f: CubeMap, k: int, caps: Caps | None = None) -> bool:
    """Every configuration inside the vertex-wise preimage of a codomain cube is a cube."""
    caps = caps or default_caps()
    rep = is_morphism(f, caps)
    if not rep.ok:
        raise InvalidInput(f"{f.name} is not a morphism: witness {rep.witness}")
    import itertools

    fibers = f.fibers()
    for c in f.codomain.sorted_cubes(k):
        total = 1
        for y in c:
            total *= len(fibers[y])
        caps.check("relative ergodicity preimage configurations", total, "preimage_configs")
        for cfg in itertools.product(*[fibers[y] for y in c]):
            if not f.domain.has_cube(cfg):
                return False
    return True


# ---------------------------------------------------------------------------
# fibration certificates


@dataclass(frozen=True)
class FibrationCertificate:
    map: CubeMap
    ok: bool
    completion_evidence: tuple  # per-dimension (k, ok, witness)
    uniqueness_evidence: tuple  # per-dimension UniquenessReport
    degree: int | None
    checked_dim: int

    def __bool__(self):
        return self.ok

    def witness(self):
        for k, ok, wit in self.completion_evidence:
            if not ok:
                return (k, wit)
        return None


def is_fibration(f: CubeMap, caps: Caps | None = None) -> FibrationCertificate:
    """Relative corner completion at every dimension, plus a degree search.

    For each k-corner of the domain and each completion of its image corner in
    the codomain, some preimage point must complete the corner with the
    prescribed image.
    """
    caps = caps or default_caps()
    key = ("fibration", id(f))
    if key in f.domain._cache:
        return f.domain._cache[key]
    rep = is_morphism(f, caps)
    if not rep.ok:
        raise InvalidInput(f"{f.name} is not a morphism: witness {rep.witness}")
    fibers = f.fibers()
    completion_evidence = []
    ok = True
    # k = 0: the empty corner must complete over every codomain point
    missing = sorted((y for y in f.codomain.points if not fibers[y]), key=point_key)
    ev0 = (0, not missing, missing[0] if missing else None)
    ok = ok and ev0[1]
    completion_evidence.append(ev0)
    for k in range(1, f.domain.max_dim + 1):
        dom_table = f.domain.completion_table(k)
        cod_table = f.codomain.completion_table(k)
        level_ok = True
        witness = None
        for values in enumerate_corners(f.domain, k, caps):
            image = tuple(f.assign[x] for x in values)
            targets = cod_table.get(image, ())
            if not targets:
                continue
            comps = dom_table.get(values, ())
            reached = {f.assign[x] for x in comps}
            for y in targets:
                if y not in reached:
                    level_ok = False
                    witness = (Corner(k, values), y)
                    break
            if not level_ok:
                break
        ok = ok and level_ok
        completion_evidence.append((k, level_ok, witness))
    uniqueness_evidence = tuple(
        has_k_uniqueness(f, k, caps) for k in range(1, f.domain.max_dim + 1))
    degree = None
    for rep_u in uniqueness_evidence:
        if rep_u.ok:
            degree = rep_u.k - 1
            break
    cert = FibrationCertificate(f, ok, tuple(completion_evidence),
                                uniqueness_evidence, degree, f.domain.max_dim)
    f.domain._cache[key] = cert
    return cert


def certify_s_fibration(f: CubeMap, s: int, caps: Caps | None = None) -> FibrationCertificate:
    """A fibration certificate whose degree is at most s, or InvalidInput."""
    cert = is_fibration(f, caps)
    if not cert.ok:
        raise InvalidInput(f"{f.name} is not a fibration: witness {cert.witness()}")
    if cert.degree is None or cert.degree > s:
        raise InvalidInput(
            f"{f.name} is not an s-fibration for s={s} (degree {cert.degree})")
    return cert


@dataclass(frozen=True)
class UniversalPropertyReport:
    consistent: bool
    f_ok: bool
    gf_ok: bool
    g_ok: bool
    witness: tuple | None = None


def universal_property_check(f: CubeMap, g: CubeMap,
                             caps: Caps | None = None) -> UniversalPropertyReport:
    """If f and g∘f are fibrations then g must be; report the three verdicts."""
    caps = caps or default_caps()
    gf = compose(g, f)
    cert_f = is_fibration(f, caps)
    cert_gf = is_fibration(gf, caps)
    cert_g = is_fibration(g, caps)
    consistent = not (cert_f.ok and cert_gf.ok and not cert_g.ok)
    witness = None if consistent else cert_g.witness()
    if not consistent:
        raise InternalConsistencyError(
            f"universal property violated: f and g∘f are fibrations but g is not "
            f"(witness {witness})")
    return UniversalPropertyReport(consistent, cert_f.ok, cert_gf.ok, cert_g.ok, witness)


def fiber_subcubespace(f: CubeMap, y, s: int | None = None,
                       caps: Caps | None = None) -> CubeSpace:
    """The fiber over y as a subcubespace; degree asserted when s is given."""
    caps = caps or default_caps()
    f.codomain.point_index(y)
    fiber = f.fibers()[y]
    if not fiber:
        raise InvalidInput(f"empty fiber over {y!r}: fibrations are surjective")
    sub = subcubespace(f.domain, fiber)
    sub.name = f"{f.name}^-1({y})"
    if s is not None:
        dr = nilspace_degree(sub, caps)
        if dr.degree is None or dr.degree > s:
            raise InternalConsistencyError(
                f"fiber over {y!r} is not an s-nilspace for s={s} (degree {dr.degree})")
    return sub


# ---------------------------------------------------------------------------
# isomorphism search


@dataclass(frozen=True)
class IsoSearchResult:
    mapping: dict | None
    exhausted: bool   # False when the node cap stopped the search
    nodes: int

    def __bool__(self):
        return self.mapping is not None


def _degree_signature(X: CubeSpace) -> dict:
    """Per-point invariant: for each k, the number of k-cubes containing the point."""
    sig: dict = {p: [] for p in X.points}
    for k in range(1, X.max_dim + 1):
        counts = {p: 0 for p in X.points}
        for c in X.cube_set(k):
            for x in set(c):
                counts[x] += 1
        for p in X.points:
            sig[p].append(counts[p])
    return {p: tuple(v) for p, v in sig.items()}


def find_isomorphism(X: CubeSpace, Y: CubeSpace, caps: Caps | None = None) -> IsoSearchResult:
    """Backtracking search for a point bijection carrying every cube set onto
    the corresponding one, pruned by per-point cube-degree statistics."""
    caps = caps or default_caps()
    if X.max_dim != Y.max_dim:
        raise InvalidInput("isomorphism search requires equal max_dim")
    if len(X.points) != len(Y.points):
        return IsoSearchResult(None, True, 0)
    for k in range(1, X.max_dim + 1):
        if len(X.cube_set(k)) != len(Y.cube_set(k)):
            return IsoSearchResult(None, True, 0)
    sig_x = _degree_signature(X)
    sig_y = _degree_signature(Y)
    from collections import Counter

    if Counter(sig_x.values()) != Counter(sig_y.values()):
        return IsoSearchResult(None, True, 0)
    xs = sorted(X.points, key=lambda p: (sig_x[p], point_key(p)))
    candidates = {
        p: tuple(sorted((q for q in Y.points if sig_y[q] == sig_x[p]), key=point_key))
        for p in xs
    }
    # cubes checkable once their latest point (in assignment order) is placed
    rank = {p: i for i, p in enumerate(xs)}
    check_at: list = [[] for _ in xs]
    for k in range(1, X.max_dim + 1):
        for c in X.sorted_cubes(k):
            check_at[max(rank[x] for x in c)].append(c)
    assign: dict = {}
    used: set = set()
    nodes = 0
    capped = False

    def rec(i: int):
        nonlocal nodes, capped
        if i == len(xs):
            yield dict(assign)
            return
        p = xs[i]
        for q in candidates[p]:
            if q in used:
                continue
            nodes += 1
            if nodes > caps.search_nodes:
                capped = True
                return
            assign[p] = q
            used.add(q)
            if all(Y.has_cube(tuple(assign[x] for x in c)) for c in check_at[i]):
                yield from rec(i + 1)
            used.discard(q)
            del assign[p]

    for mapping in rec(0):
        # one-way cube preservation plus equal cardinalities makes this an isomorphism
        return IsoSearchResult(mapping, True, nodes)
    return IsoSearchResult(None, not capped, nodes)
