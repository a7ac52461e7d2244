"""Finite filtered groups and their cube structures.

Groups are validated Cayley tables over elements ``0..n-1`` with printable
labels.  Subgroups are sorted index tuples.  The cube-group construction is a
breadth-first closure over face generators, with a hard element cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from .caps import Caps, default_caps
from .core import CubeSpace, Face, all_faces, validate_cubespace, vertex_weight
from .errors import CapExceeded, InternalConsistencyError, InvalidInput


class FiniteGroup:
    """A finite group given by a multiplication table on indices 0..n-1."""

    def __init__(self, labels, mul, name: str = "", inv=None, identity: int | None = None,
                 caps: Caps | None = None, validate: bool = True):
        caps = caps or default_caps()
        self.labels = tuple(str(x) for x in labels)
        self.order = len(self.labels)
        caps.check("group order", self.order, "max_group")
        if len(set(self.labels)) != self.order:
            raise InvalidInput("group element labels must be distinct")
        self.mul = tuple(tuple(int(x) for x in row) for row in mul)
        self.name = name or f"group{self.order}"
        if len(self.mul) != self.order or any(len(r) != self.order for r in self.mul):
            raise InvalidInput(f"{self.name}: Cayley table must be {self.order}x{self.order}")
        for row in self.mul:
            for x in row:
                if not 0 <= x < self.order:
                    raise InvalidInput(f"{self.name}: table entry {x} out of range")
        if validate:
            self.identity = self._find_identity() if identity is None else int(identity)
            self._validate(self.identity)
        else:
            self.identity = int(identity)
        if inv is None:
            inv_table = [None] * self.order
            for a in range(self.order):
                for b in range(self.order):
                    if self.mul[a][b] == self.identity:
                        inv_table[a] = b
                        break
            if any(v is None for v in inv_table):
                raise InvalidInput(f"{self.name}: some element has no inverse")
            self.inv = tuple(inv_table)
        else:
            self.inv = tuple(int(x) for x in inv)
            for a in range(self.order):
                if self.mul[a][self.inv[a]] != self.identity:
                    raise InvalidInput(f"{self.name}: inverse table wrong at {a}")
        self._np_mul = np.array(self.mul, dtype=np.int64)
        self._cache: dict = {}

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.mul[e][a] == a and self.mul[a][e] == a for a in range(self.order)):
                return e
        raise InvalidInput(f"{self.name}: no identity element")

    def _validate(self, e: int) -> None:
        m = np.array(self.mul, dtype=np.int64)
        left = m[m, :]              # left[a,b,c] = (a*b)*c
        right = m[:, m.reshape(-1)].reshape(self.order, self.order, self.order)
        if not np.array_equal(left, right):
            bad = np.argwhere(left != right)[0]
            a, b, c = (int(x) for x in bad)
            raise InvalidInput(
                f"{self.name}: not associative at ({self.labels[a]},{self.labels[b]},{self.labels[c]})")
        if self.mul[e][e] != e:
            raise InvalidInput(f"{self.name}: identity is wrong")

    # -- basic ops ------------------------------------------------------------

    def __repr__(self):
        return f"FiniteGroup({self.name}, order {self.order})"

    def op(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def inverse(self, a: int) -> int:
        return self.inv[a]

    def conjugate(self, a: int, b: int) -> int:
        """b^-1 a b"""
        return self.mul[self.mul[self.inv[b]][a]][b]

    def commutator(self, a: int, b: int) -> int:
        """a^-1 b^-1 a b"""
        return self.mul[self.mul[self.inv[a]][self.inv[b]]][self.mul[a][b]]

    def element_order(self, a: int) -> int:
        x, n = a, 1
        while x != self.identity:
            x = self.mul[x][a]
            n += 1
        return n

    def is_abelian(self) -> bool:
        if "abelian" not in self._cache:
            self._cache["abelian"] = all(
                self.mul[a][b] == self.mul[b][a]
                for a in range(self.order) for b in range(self.order))
        return self._cache["abelian"]

    def center(self) -> tuple:
        out = [a for a in range(self.order)
               if all(self.mul[a][b] == self.mul[b][a] for b in range(self.order))]
        return tuple(out)

    def subgroup_generated(self, gens) -> tuple:
        seen = {self.identity}
        frontier = [self.identity]
        gens = [g for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return tuple(sorted(seen))

    def is_subgroup(self, S) -> bool:
        S = set(S)
        if self.identity not in S:
            return False
        return all(self.mul[a][b] in S for a in S for b in S)

    def commutator_subgroup(self, A=None, B=None) -> tuple:
        A = range(self.order) if A is None else A
        B = range(self.order) if B is None else B
        gens = {self.commutator(a, b) for a in A for b in B}
        return self.subgroup_generated(gens)

    def trivial_subgroup(self) -> tuple:
        return (self.identity,)

    # -- constructions ---------------------------------------------------------

    @classmethod
    def cyclic(cls, n: int, name: str | None = None) -> "FiniteGroup":
        if n <= 0:
            raise InvalidInput("cyclic group order must be positive")
        mul = [[(a + b) % n for b in range(n)] for a in range(n)]
        return cls([str(i) for i in range(n)], mul, name=name or f"Z{n}")

    @classmethod
    def direct_product(cls, G: "FiniteGroup", H: "FiniteGroup",
                       name: str | None = None) -> "FiniteGroup":
        labels = []
        for a in range(G.order):
            for b in range(H.order):
                labels.append(f"({G.labels[a]},{H.labels[b]})")
        n2 = H.order

        def enc(a, b):
            return a * n2 + b

        mul = [[0] * (G.order * H.order) for _ in range(G.order * H.order)]
        for a1 in range(G.order):
            for b1 in range(H.order):
                for a2 in range(G.order):
                    for b2 in range(H.order):
                        mul[enc(a1, b1)][enc(a2, b2)] = enc(G.mul[a1][a2], H.mul[b1][b2])
        return cls(labels, mul, name=name or f"{G.name}x{H.name}")

    @classmethod
    def heisenberg(cls, p: int, name: str | None = None) -> "FiniteGroup":
        """Upper unitriangular 3x3 matrices over Z_p (order p^3, class 2)."""
        items = [(a, b, c) for a in range(p) for b in range(p) for c in range(p)]
        index = {t: i for i, t in enumerate(items)}
        labels = [f"({a},{b},{c})" for a, b, c in items]
        mul = [[0] * len(items) for _ in items]
        for i, (a, b, c) in enumerate(items):
            for j, (a2, b2, c2) in enumerate(items):
                mul[i][j] = index[((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p)]
        return cls(labels, mul, name=name or f"heis{p}")

    @classmethod
    def dihedral(cls, n: int, name: str | None = None) -> "FiniteGroup":
        """Symmetries of the n-gon, order 2n; elements r0..r(n-1), s0..s(n-1)."""
        labels = [f"r{i}" for i in range(n)] + [f"s{i}" for i in range(n)]
        mul = [[0] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            for j in range(n):
                mul[i][j] = (i + j) % n
                mul[i][j + n] = n + (i + j) % n
                mul[i + n][j] = n + (i - j) % n
                mul[i + n][j + n] = (i - j) % n
        return cls(labels, mul, name=name or f"D{n}")

    @classmethod
    def quaternion(cls, name: str | None = None) -> "FiniteGroup":
        """The order-8 quaternion group."""
        labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
        table = {
            ("1", "1"): ("+", "1"), ("1", "i"): ("+", "i"), ("1", "j"): ("+", "j"), ("1", "k"): ("+", "k"),
            ("i", "1"): ("+", "i"), ("i", "i"): ("-", "1"), ("i", "j"): ("+", "k"), ("i", "k"): ("-", "j"),
            ("j", "1"): ("+", "j"), ("j", "i"): ("-", "k"), ("j", "j"): ("-", "1"), ("j", "k"): ("+", "i"),
            ("k", "1"): ("+", "k"), ("k", "i"): ("+", "j"), ("k", "j"): ("-", "i"), ("k", "k"): ("-", "1"),
        }
        def decode(lbl):
            return ("-" if lbl.startswith("-") else "+", lbl.lstrip("-"))
        def encode(sign, unit):
            return ("-" + unit if sign == "-" else unit)
        idx = {lbl: i for i, lbl in enumerate(labels)}
        mul = [[0] * 8 for _ in range(8)]
        for x in labels:
            for y in labels:
                sx, ux = decode(x)
                sy, uy = decode(y)
                sp, up = table[(ux, uy)]
                sign = "+" if (sx == sy) == (sp == "+") else "-"
                mul[idx[x]][idx[y]] = idx[encode(sign, up)]
        return cls(labels, mul, name=name or "Q8")


def parse_group_spec(spec: str, caps: Caps | None = None) -> FiniteGroup:
    """Build a group from a short spec: Z4, Z2xZ2, heis2, D4, Q8."""
    s = spec.replace(" ", "")
    parts = s.split("x")
    built = []
    for part in parts:
        low = part.lower()
        if low.startswith("z") and low[1:].isdigit():
            built.append(FiniteGroup.cyclic(int(low[1:])))
        elif low.startswith("heis") and low[4:].isdigit():
            built.append(FiniteGroup.heisenberg(int(low[4:])))
        elif low.startswith("d") and low[1:].isdigit():
            built.append(FiniteGroup.dihedral(int(low[1:])))
        elif low == "q8":
            built.append(FiniteGroup.quaternion())
        else:
            raise InvalidInput(f"unknown group spec {part!r}")
    G = built[0]
    for H in built[1:]:
        G = FiniteGroup.direct_product(G, H)
    if len(built) > 1:
        G.name = s
    return G


# ---------------------------------------------------------------------------
# filtrations


@dataclass(frozen=True)
class Filtration:
    """A degree-s filtration G = G_0 >= G_1 >= ... >= G_{s+1} = {e}.

    ``levels[i]`` is the sorted index tuple of G_i for ``0 <= i <= degree``;
    deeper levels are the trivial subgroup.  The commutator condition
    [G_i, G_j] <= G_{i+j} is checked exhaustively at construction.
    """

    group: FiniteGroup
    levels: tuple
    name: str = ""

    def __post_init__(self):
        G = self.group
        levels = tuple(tuple(sorted(set(level))) for level in self.levels)
        if not levels:
            raise InvalidInput("a filtration needs at least level 0")
        if levels[0] != tuple(range(G.order)):
            raise InvalidInput("level 0 of a filtration must be the whole group")
        # normalize: drop trailing trivial levels (they are implicit)
        while len(levels) > 1 and levels[-1] == (G.identity,):
            levels = levels[:-1]
        object.__setattr__(self, "levels", levels)
        prev = None
        for i, level in enumerate(levels):
            if not G.is_subgroup(level):
                raise InvalidInput(f"filtration level {i} is not a subgroup")
            if prev is not None and not set(level) <= set(prev):
                raise InvalidInput(f"filtration level {i} is not nested in level {i - 1}")
            prev = level
        d = self.degree
        for i in range(d + 2):
            for j in range(d + 2):
                target = set(self.level(i + j))
                for a in self.level(i):
                    for b in self.level(j):
                        if G.commutator(a, b) not in target:
                            raise InvalidInput(
                                f"commutator condition fails: [G_{i}, G_{j}] not in G_{i + j} "
                                f"(witness {G.labels[a]}, {G.labels[b]})")

    @property
    def degree(self) -> int:
        # smallest s with G_{s+1} trivial; levels beyond the stored ones are trivial
        d = len(self.levels) - 1
        if self.levels[d] == (self.group.identity,) and d > 0:
            return d - 1
        return d

    def level(self, i: int) -> tuple:
        if i < 0:
            raise InvalidInput("filtration level index must be non-negative")
        if i < len(self.levels):
            return self.levels[i]
        return (self.group.identity,)

    @classmethod
    def one_filtration(cls, G: FiniteGroup) -> "Filtration":
        full = tuple(range(G.order))
        return cls(G, (full, full), name=f"{G.name}[1-filt]")

    @classmethod
    def s_filtration(cls, A: FiniteGroup, s: int) -> "Filtration":
        """A = A_0 = ... = A_s, A_{s+1} = {0}; requires A abelian for s >= 1."""
        if s < 0:
            raise InvalidInput("filtration degree must be non-negative")
        full = tuple(range(A.order))
        return cls(A, tuple([full] * (s + 1)), name=f"{A.name}[deg{s}]")

    @classmethod
    def lower_central(cls, G: FiniteGroup) -> "Filtration":
        levels = [tuple(range(G.order)), tuple(range(G.order))]
        while levels[-1] != (G.identity,):
            nxt = G.commutator_subgroup(range(G.order), levels[-1])
            if nxt == levels[-1]:
                raise InvalidInput(f"{G.name} is not nilpotent")
            levels.append(nxt)
        return cls(G, tuple(levels), name=f"{G.name}[lcs]")


# ---------------------------------------------------------------------------
# Host-Kra cube groups


@dataclass(frozen=True)
class HKCubeGroup:
    """The subgroup of G^(2^k) generated by face insertions of filtration elements."""

    filtration: Filtration
    k: int
    elements: frozenset
    generator_count: int

    def sorted_elements(self) -> tuple:
        return tuple(sorted(self.elements))

    def __len__(self):
        return len(self.elements)


def _face_generators(F: Filtration, k: int):
    """Yield (face, element) pairs in the canonical order, identity skipped."""
    G = F.group
    for face in all_faces(k):
        level = F.level(k - face.dim)
        for x in level:
            if x == G.identity:
                continue
            yield face, x


@lru_cache(maxsize=None)
def _hk_cube_group_cached(F: Filtration, k: int, cap: int) -> HKCubeGroup:
    G = F.group
    V = 1 << k
    gens = []
    for face, x in _face_generators(F, k):
        t = tuple(x if w in face else G.identity for w in range(V))
        gens.append(t)
    mul = G._np_mul
    identity = tuple([G.identity] * V)
    gen_arr = [np.array(g, dtype=np.int64) for g in gens]
    if G.order ** V >= (1 << 62):
        # pure-python closure for ambient groups too large for int64 encoding
        known = {identity}
        frontier_t = [identity]
        while frontier_t:
            nxt = []
            for t in frontier_t:
                for g in gens:
                    prod = tuple(G.mul[a][b] for a, b in zip(t, g))
                    if prod not in known:
                        known.add(prod)
                        if len(known) > cap:
                            raise CapExceeded("HK cube group closure", len(known), cap)
                        nxt.append(prod)
            frontier_t = nxt
        return HKCubeGroup(F, k, frozenset(known), len(gens))

    weights = G.order ** np.arange(V, dtype=np.int64)
    known_rows = np.array([identity], dtype=np.int64)
    known_codes = known_rows @ weights
    frontier = known_rows
    all_rows = [known_rows]
    while len(frontier):
        prods = [mul[frontier, g[None, :]] for g in gen_arr]
        if not prods:
            break
        stacked = np.vstack(prods)
        codes = stacked @ weights
        codes, first = np.unique(codes, return_index=True)
        stacked = stacked[first]
        pos = np.searchsorted(known_codes, codes)
        pos = np.clip(pos, 0, len(known_codes) - 1)
        fresh_mask = known_codes[pos] != codes
        fresh = stacked[fresh_mask]
        if not len(fresh):
            break
        known_codes = np.union1d(known_codes, codes[fresh_mask])
        if len(known_codes) > cap:
            raise CapExceeded("HK cube group closure", len(known_codes), cap)
        all_rows.append(fresh)
        frontier = fresh
    elements = frozenset(tuple(int(v) for v in row) for row in np.vstack(all_rows))
    return HKCubeGroup(F, k, elements, len(gens))


def hk_cube_group(F: Filtration, k: int, caps: Caps | None = None) -> HKCubeGroup:
    """Breadth-first closure of the face generators inside G^(2^k)."""
    caps = caps or default_caps()
    return _hk_cube_group_cached(F, k, caps.bfs_elements)


def hk_cubespace(F: Filtration, K: int, caps: Caps | None = None,
                 validate: bool = True) -> CubeSpace:
    """The cubespace on G whose k-cubes are the Host-Kra k-cube group elements."""
    caps = caps or default_caps()
    G = F.group
    cubes = {}
    for k in range(1, K + 1):
        hk = hk_cube_group(F, k, caps)
        cubes[k] = {tuple(G.labels[i] for i in t) for t in hk.elements}
    X = CubeSpace(G.labels, cubes, K, name=f"hk({F.name})", caps=caps)
    if validate:
        report = validate_cubespace(X, caps)
        if not report.ok:
            raise InternalConsistencyError(
                f"Host-Kra cubespace failed the closure axiom: {report.first_witness()}")
    return X


def _alternating_sum_indices(n: int, face: Face):
    """(vertex, sign) pairs for the alternating sum over a face."""
    out = []
    for w in face.vertices():
        free_bits = vertex_weight(w & ~face.mask)
        out.append((w, -1 if free_bits % 2 else 1))
    return out


def _satisfies_degree_predicate(cfg_idx, A: FiniteGroup, s: int, n: int) -> bool:
    """Every (s+1)-face of the configuration has alternating sum zero in A."""
    if s + 1 > n:
        return True
    for face in all_faces(n):
        if face.dim != s + 1:
            continue
        total = A.identity
        for w, sign in _alternating_sum_indices(n, face):
            x = cfg_idx[w] if sign > 0 else A.inv[cfg_idx[w]]
            total = A.mul[total][x]
        if total != A.identity:
            return False
    return True


def d_s_cubespace(A: FiniteGroup, s: int, K: int, caps: Caps | None = None) -> CubeSpace:
    """The degree-s cubespace of an abelian group, cross-checked against the
    alternating-sum predicate whenever full enumeration is affordable."""
    caps = caps or default_caps()
    if not A.is_abelian():
        raise InvalidInput(f"{A.name} is not abelian")
    F = Filtration.s_filtration(A, s)
    X = hk_cubespace(F, K, caps)
    X.name = f"D_{s}({A.name})"
    label_index = {lbl: i for i, lbl in enumerate(A.labels)}
    for k in range(1, K + 1):
        level = X.cube_set(k)
        if A.order ** (1 << k) <= caps.bfs_elements:
            predicate = {
                tuple(A.labels[i] for i in cfg)
                for cfg in itertools.product(range(A.order), repeat=1 << k)
                if _satisfies_degree_predicate(cfg, A, s, k)
            }
            if predicate != level:
                raise InternalConsistencyError(
                    f"D_{s}({A.name}): closure and alternating-sum predicate disagree at k={k}")
        else:
            for c in level:
                cfg = tuple(label_index[x] for x in c)
                if not _satisfies_degree_predicate(cfg, A, s, k):
                    raise InternalConsistencyError(
                        f"D_{s}({A.name}): cube violates the alternating-sum predicate at k={k}")
    return X


def coset_map(G: FiniteGroup, gamma) -> dict:
    """Map each element index to the minimal index in its coset g*Gamma."""
    gamma = tuple(gamma)
    if not G.is_subgroup(gamma):
        raise InvalidInput("Gamma is not a subgroup")
    out = {}
    for g in range(G.order):
        members = sorted(G.mul[g][t] for t in gamma)
        out[g] = members[0]
    return out


def hk_quotient_cubespace(F: Filtration, gamma, K: int, caps: Caps | None = None):
    """Quotient of the Host-Kra cubespace by the cosets g*Gamma.

    Returns ``(space, projection, compatibility)`` where ``projection`` maps
    group labels to coset labels and ``compatibility`` records the sizes
    ``|Gamma  intersect  G_i|`` for the report.
    """
    caps = caps or default_caps()
    G = F.group
    cmap = coset_map(G, gamma)
    proj_label = {G.labels[g]: G.labels[cmap[g]] for g in range(G.order)}
    points = sorted(set(proj_label.values()))
    cubes = {}
    for k in range(1, K + 1):
        hk = hk_cube_group(F, k, caps)
        cubes[k] = {tuple(G.labels[cmap[i]] for i in t) for t in hk.elements}
    X = CubeSpace(points, cubes, K, name=f"hk({F.name})/{len(points)}cosets", caps=caps)
    report = validate_cubespace(X, caps)
    if not report.ok:
        raise InternalConsistencyError(
            f"quotient cubespace failed the closure axiom: {report.first_witness()}")
    compatibility = tuple(
        (i, len(set(gamma) & set(F.level(i)))) for i in range(F.degree + 2))
    return X, proj_label, compatibility


# ---------------------------------------------------------------------------
# abelian structure: invariant factors and explicit coordinates


def _order_multiset(G: FiniteGroup) -> tuple:
    return tuple(sorted(G.element_order(a) for a in range(G.order)))


def _factor_order_multiset(factors) -> tuple:
    orders = []
    for combo in itertools.product(*[range(m) for m in factors]):
        # order of combo = lcm of per-coordinate orders
        o = 1
        for a, m in zip(combo, factors):
            om = m // gcd(a, m) if a else 1
            o = o * om // gcd(o, om)
        orders.append(o)
    return tuple(sorted(orders))


def _candidate_types(n: int):
    """All abelian groups of order n as invariant-factor tuples m_1 | m_2 | ..."""
    # primary decomposition: partitions of each prime exponent
    def prime_factors(n):
        out = {}
        d = 2
        while d * d <= n:
            while n % d == 0:
                out[d] = out.get(d, 0) + 1
                n //= d
            d += 1
        if n > 1:
            out[n] = out.get(n, 0) + 1
        return out

    def partitions(e):
        if e == 0:
            yield ()
            return
        def gen(e, maxpart):
            if e == 0:
                yield ()
                return
            for first in range(min(e, maxpart), 0, -1):
                for rest in gen(e - first, first):
                    yield (first,) + rest
        yield from gen(e, e)

    pf = prime_factors(n)
    per_prime = []
    for p, e in pf.items():
        per_prime.append([(p, part) for part in partitions(e)])
    for combo in itertools.product(*per_prime):
        # combine primary parts into invariant factors (largest parts align)
        maxlen = max(len(part) for _, part in combo) if combo else 0
        factors = []
        for i in range(maxlen):
            f = 1
            for p, part in combo:
                if i < len(part):
                    f *= p ** part[i]
            factors.append(f)
        factors.reverse()  # ascending, m_1 | m_2 | ...
        yield tuple(factors)


def abelian_invariant_factors(G: FiniteGroup) -> tuple:
    """Invariant-factor type (m_1 | m_2 | ... | m_r) of an abelian group."""
    if not G.is_abelian():
        raise InvalidInput(f"{G.name} is not abelian")
    if G.order == 1:
        return ()
    key = "invfactors"
    if key in G._cache:
        return G._cache[key]
    target = _order_multiset(G)
    for cand in _candidate_types(G.order):
        if _factor_order_multiset(cand) == target:
            G._cache[key] = cand
            return cand
    raise InternalConsistencyError(
        f"{G.name}: no abelian type matches the element-order multiset")


def abelian_coordinates(G: FiniteGroup):
    """Explicit decomposition of an abelian group.

    Returns ``(factors, to_coords, from_coords)`` where ``factors`` is the
    invariant-factor tuple (ascending divisibility), ``to_coords`` maps an
    element index to its coordinate tuple, and ``from_coords`` is the inverse.
    """
    key = "abcoords"
    if key in G._cache:
        return G._cache[key]
    factors = abelian_invariant_factors(G)
    if not factors:
        result = ((), {G.identity: ()}, {(): G.identity})
        G._cache[key] = result
        return result
    slots = tuple(sorted(factors, reverse=True))  # pick largest orders first
    basis: list = []

    def extend(i: int, span_size: int) -> bool:
        if i == len(slots):
            return True
        m = slots[i]
        for g in range(G.order):
            if G.element_order(g) != m:
                continue
            new = G.subgroup_generated([*basis, g])
            if len(new) == span_size * m:
                basis.append(g)
                if extend(i + 1, span_size * m):
                    return True
                basis.pop()
        return False

    if not extend(0, 1):
        raise InternalConsistencyError(f"{G.name}: abelian basis search failed")

    # slots are descending; re-order the basis to match ascending factors
    order = sorted(range(len(slots)), key=lambda i: slots[i])
    ordered_factors = tuple(slots[i] for i in order)
    ordered_basis = [basis[i] for i in order]
    if ordered_factors != tuple(factors):
        raise InternalConsistencyError("invariant factor bookkeeping mismatch")

    from_coords = {}
    to_coords = {}
    for combo in itertools.product(*[range(m) for m in ordered_factors]):
        x = G.identity
        for a, g in zip(combo, ordered_basis):
            y = G.identity
            for _ in range(a):
                y = G.mul[y][g]
            x = G.mul[x][y]
        from_coords[combo] = x
        to_coords[x] = combo
    if len(to_coords) != G.order:
        raise InternalConsistencyError(f"{G.name}: coordinate map is not bijective")
    result = (tuple(ordered_factors), to_coords, from_coords)
    G._cache[key] = result
    return result


def isomorphic_abelian(G: FiniteGroup, H: FiniteGroup) -> bool:
    return abelian_invariant_factors(G) == abelian_invariant_factors(H)
