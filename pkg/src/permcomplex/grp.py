"""Finite groups by multiplication table: SD16, Q8, G24, D6 and the tower N_k.

Element labels follow fixed normal forms so that transversals and
serialisations are reproducible:

* SD16: ``(a, b)`` meaning ω^a φ^b, with φ ω φ^-1 = ω^3.
* Q8 inside SD16: the labels ``(a, b)`` with ``a ≡ b (mod 2)``; generated by
  ωφ = (1, 1) and ω² = (2, 0).
* G24 = C3 ⋊ Q8: ``(c, q)`` with q a Q8 label; ω² inverts c, ωφ centralises it.
* N_k = (C3 × C_{3^k}) ⋊ Q8: ``(c, z, q)``, both cyclic factors twisted the
  same way as in G24.

The action of Q8 on the abelian normal factors is through the character
θ(ω^a φ^b) = (-1)^(a // 2), which is +1 on ωφ and -1 on ω².
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Sequence

import numpy as np

EXHAUSTIVE_ASSOCIATIVITY_MAX = 1000


class GroupError(ValueError):
    pass


class FiniteGroup:
    """A group given by its full multiplication table.

    ``mult[x, y]`` is the index of the product x·y.  ``gens`` maps generator
    names to element indices.  ``subgroups`` holds named embeddings into this
    group and ``maps`` named homomorphisms out of it (filled in by the
    constructors below).  ``sylow_gens``/``complement`` describe a normal
    Sylow p-subgroup and a p'-complement when one is registered.
    """

    def __init__(
        self,
        name: str,
        labels: Sequence[Hashable],
        mult: np.ndarray,
        gens: dict[str, int],
        params: dict | None = None,
        check: bool = True,
    ):
        self.name = name
        self.params = dict(params or {})
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.mult = np.ascontiguousarray(mult, dtype=np.int32)
        self.mult.flags.writeable = False
        self.order = len(self.labels)
        self.gens = dict(gens)
        self.subgroups: dict[str, GroupHom] = {}
        self.maps: dict[str, GroupHom] = {}
        self.sylow_p: int | None = None
        self.sylow_gens: list[int] = []
        self.complement: GroupHom | None = None
        self.retraction: GroupHom | None = None
        ident = [i for i in range(self.order) if np.array_equal(self.mult[i], np.arange(self.order))]
        if len(ident) != 1:
            raise GroupError(f"{name}: no unique identity")
        self.id = ident[0]
        inv = np.full(self.order, -1, dtype=np.int32)
        rows, cols = np.nonzero(self.mult == self.id)
        inv[rows] = cols
        self.inv = inv
        self.inv.flags.writeable = False
        if check:
            self.validate()

    def __repr__(self) -> str:
        return f"<FiniteGroup {self.name} order={self.order}>"

    def validate(self) -> None:
        n = self.order
        m = self.mult
        if m.shape != (n, n) or m.min() < 0 or m.max() >= n:
            raise GroupError(f"{self.name}: table not closed")
        for row in m:
            if len(np.unique(row)) != n:
                raise GroupError(f"{self.name}: table row is not a permutation")
        if np.any(self.inv < 0) or np.any(m[self.inv, np.arange(n)] != self.id):
            raise GroupError(f"{self.name}: inverse table inconsistent")
        left = range(n) if n <= EXHAUSTIVE_ASSOCIATIVITY_MAX else self.gens.values()
        for a in left:
            if not np.array_equal(m[m[a]], m[a][m]):
                raise GroupError(f"{self.name}: associativity fails for left factor {self.labels[a]}")

    # -- queries ------------------------------------------------------------

    def __getitem__(self, label) -> int:
        return self.index[label]

    def gen(self, name: str) -> int:
        return self.gens[name]

    def mul(self, *xs: int) -> int:
        out = self.id
        for x in xs:
            out = int(self.mult[out, x])
        return out

    def power(self, x: int, e: int) -> int:
        if e < 0:
            x, e = int(self.inv[x]), -e
        out = self.id
        for _ in range(e):
            out = int(self.mult[out, x])
        return out

    def word(self, names: Sequence[str]) -> int:
        """Element of a word in generator names, e.g. ``["ω", "φ"]``."""
        return self.mul(*(self.gens[n] for n in names))

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.id:
            y = int(self.mult[y, x])
            k += 1
        return k

    def conj(self, g: int, x: int) -> int:
        """g x g^-1"""
        return self.mul(g, x, int(self.inv[g]))

    def closure(self, elems: Sequence[int]) -> list[int]:
        seen = {self.id}
        frontier = [self.id]
        elems = list(elems)
        while frontier:
            nxt = []
            for y in frontier:
                for g in elems:
                    z = int(self.mult[g, y])
                    if z not in seen:
                        seen.add(z)
                        nxt.append(z)
            frontier = nxt
        return sorted(seen)

    def center(self) -> list[int]:
        m = self.mult
        return [x for x in range(self.order) if np.array_equal(m[x], m[:, x])]

    def is_abelian(self) -> bool:
        return np.array_equal(self.mult, self.mult.T)

    def is_normal(self, subset: Sequence[int]) -> bool:
        s = set(subset)
        return all(self.conj(g, x) in s for g in self.gens.values() for x in s)

    def bfs_words(self) -> list[tuple[int, int, int]]:
        """Spanning tree over generators: (element, generator, parent) with element = gen·parent."""
        gen_idx = list(self.gens.values())
        seen = {self.id}
        order = []
        frontier = [self.id]
        while frontier:
            nxt = []
            for y in frontier:
                for g in gen_idx:
                    z = int(self.mult[g, y])
                    if z not in seen:
                        seen.add(z)
                        order.append((z, g, y))
                        nxt.append(z)
            frontier = nxt
        if len(seen) != self.order:
            raise GroupError(f"{self.name}: generators do not generate")
        return order


@dataclass
class GroupHom:
    """Homomorphism given by an element-index map; validated on construction."""

    src: FiniteGroup
    dst: FiniteGroup
    map: np.ndarray
    name: str = ""
    _pre: dict | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.map = np.asarray(self.map, dtype=np.int32)
        if self.map.shape != (self.src.order,):
            raise GroupError("homomorphism map has wrong length")
        if self.map[self.src.id] != self.dst.id:
            raise GroupError(f"{self.name}: identity not preserved")
        f = self.map
        if self.src.order <= EXHAUSTIVE_ASSOCIATIVITY_MAX:
            ok = np.array_equal(f[self.src.mult], self.dst.mult[np.ix_(f, f)])
        else:
            gens = list(self.src.gens.values())
            ok = all(np.array_equal(f[self.src.mult[g]], self.dst.mult[f[g]][f]) for g in gens)
        if not ok:
            raise GroupError(f"{self.name}: map is not a homomorphism")

    def __call__(self, x: int) -> int:
        return int(self.map[x])

    def is_injective(self) -> bool:
        return len(np.unique(self.map)) == self.src.order

    def is_surjective(self) -> bool:
        return len(np.unique(self.map)) == self.dst.order

    def image(self) -> list[int]:
        return sorted(set(int(x) for x in self.map))

    def kernel(self) -> list[int]:
        return [x for x in range(self.src.order) if self.map[x] == self.dst.id]

    def preimage_index(self) -> dict[int, int]:
        """dst index -> src index for an injective map."""
        if self._pre is None:
            if not self.is_injective():
                raise GroupError(f"{self.name}: not an embedding")
            self._pre = {int(y): x for x, y in enumerate(self.map)}
        return self._pre

    def compose(self, first: "GroupHom") -> "GroupHom":
        """self ∘ first"""
        if first.dst is not self.src:
            raise GroupError("homomorphisms are not composable")
        return GroupHom(first.src, self.dst, self.map[first.map], f"{self.name}∘{first.name}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupHom)
            and self.src is other.src
            and self.dst is other.dst
            and np.array_equal(self.map, other.map)
        )


def table_from_rule(labels: Sequence[Hashable], rule: Callable) -> np.ndarray:
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    m = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            m[i, j] = index[rule(a, b)]
    return m


def hom_from_labels(src: FiniteGroup, dst: FiniteGroup, f: Callable, name: str = "") -> GroupHom:
    return GroupHom(src, dst, np.array([dst.index[f(lab)] for lab in src.labels]), name)


def subgroup(G: FiniteGroup, gen_names: dict[str, int], name: str) -> tuple[FiniteGroup, GroupHom]:
    """Subgroup generated by the given elements, as a new table group plus its embedding."""
    elems = G.closure(list(gen_names.values()))
    pos = {x: i for i, x in enumerate(elems)}
    mult = np.array([[pos[int(G.mult[x, y])] for y in elems] for x in elems], dtype=np.int32)
    H = FiniteGroup(name, [G.labels[x] for x in elems], mult, {k: pos[v] for k, v in gen_names.items()})
    return H, GroupHom(H, G, np.array(elems), f"{name}->{G.name}")


def quotient(G: FiniteGroup, normal: Sequence[int], name: str) -> tuple[FiniteGroup, GroupHom]:
    """G / N for a normal subset N, with the projection.  Cosets are labelled by least element."""
    nset = sorted(set(normal))
    if not G.is_normal(nset):
        raise GroupError("subgroup is not normal")
    rep = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for x in range(G.order):
        if rep[x] < 0:
            coset = [int(G.mult[x, n]) for n in nset]
            r = min(coset)
            reps.append(r)
            rep[coset] = r
    pos = {r: i for i, r in enumerate(sorted(reps))}
    reps = sorted(reps)
    mult = np.array([[pos[int(rep[G.mult[a, b]])] for b in reps] for a in reps], dtype=np.int32)
    gens = {k: pos[int(rep[v])] for k, v in G.gens.items()}
    Q = FiniteGroup(name, [G.labels[r] for r in reps], mult, gens)
    proj = GroupHom(G, Q, np.array([pos[int(rep[x])] for x in range(G.order)]), f"{G.name}->{name}")
    return Q, proj


def is_dihedral(G: FiniteGroup) -> bool:
    """Order 2n with an element r of order n and an involution s outside <r> inverting r."""
    if G.order % 2:
        return False
    n = G.order // 2
    for r in range(G.order):
        if G.element_order(r) != n:
            continue
        rot = set(G.closure([r]))
        for s in range(G.order):
            if s in rot or G.element_order(s) != 2:
                continue
            if G.conj(s, r) == int(G.inv[r]):
                return True
    return False


def cyclic(n: int, gen_name: str = "g") -> FiniteGroup:
    labels = list(range(n))
    mult = (np.add.outer(np.arange(n), np.arange(n)) % n).astype(np.int32)
    return FiniteGroup(f"C{n}", labels, mult, {gen_name: 1 % n}, {"n": n})


# ---------------------------------------------------------------------------
# The groups of the construction
# ---------------------------------------------------------------------------


def _sd16_rule(x, y):
    (a, b), (c, d) = x, y
    return ((a + (3**b) * c) % 8, (b + d) % 2)


def theta_sign(q: tuple[int, int]) -> int:
    """The character θ of Q8 on an SD16 label: +1 on ωφ, -1 on ω²."""
    return -1 if (q[0] // 2) % 2 else 1


@lru_cache(maxsize=None)
def sd16() -> FiniteGroup:
    """Semidihedral group of order 16: 𝔽₉^× (ω = multiplication by a generator) ⋊ Frobenius (φ)."""
    labels = [(a, b) for a in range(8) for b in range(2)]
    G = FiniteGroup("SD16", labels, table_from_rule(labels, _sd16_rule), {"ω": labels.index((1, 0)), "φ": labels.index((0, 1))})
    G.sylow_p = 3
    G.complement = GroupHom(G, G, np.arange(G.order), "SD16=SD16")
    G.retraction = G.complement
    return G


Q8_LABELS = [(a, b) for a in range(8) for b in range(2) if a % 2 == b]


@lru_cache(maxsize=None)
def q8() -> FiniteGroup:
    """Quaternion group generated by ωφ and ω² inside SD16 (labels are SD16 labels)."""
    G = FiniteGroup("Q8", Q8_LABELS, table_from_rule(Q8_LABELS, _sd16_rule), {"ωφ": Q8_LABELS.index((1, 1)), "ω²": Q8_LABELS.index((2, 0))})
    G.sylow_p = 3
    G.complement = GroupHom(G, G, np.arange(G.order), "Q8=Q8")
    G.retraction = G.complement
    return G


@lru_cache(maxsize=None)
def q8_in_sd16() -> GroupHom:
    return hom_from_labels(q8(), sd16(), lambda lab: lab, "Q8->SD16")


@lru_cache(maxsize=None)
def c3() -> FiniteGroup:
    return cyclic(3, "c")


def _g24_rule(x, y):
    (c1, q1), (c2, q2) = x, y
    return ((c1 + theta_sign(q1) * c2) % 3, _sd16_rule(q1, q2))


@lru_cache(maxsize=None)
def g24() -> FiniteGroup:
    """G24 = C3 ⋊ Q8; subgroups "C3", "Q8", map "Q8" (quotient by C3) and "D6" (quotient by <ωφ>)."""
    labels = [(c, q) for c in range(3) for q in Q8_LABELS]
    gens = {"c": labels.index((1, (0, 0))), "ωφ": labels.index((0, (1, 1))), "ω²": labels.index((0, (2, 0)))}
    G = FiniteGroup("G24", labels, table_from_rule(labels, _g24_rule), gens)
    Q = q8()
    G.subgroups["Q8"] = hom_from_labels(Q, G, lambda q: (0, q), "Q8->G24")
    G.subgroups["C3"] = hom_from_labels(c3(), G, lambda c: (c, (0, 0)), "C3->G24")
    G.maps["Q8"] = hom_from_labels(G, Q, lambda x: x[1], "G24->Q8")
    G.sylow_p = 3
    G.sylow_gens = [gens["c"]]
    G.complement = G.subgroups["Q8"]
    G.retraction = G.maps["Q8"]
    return G


@lru_cache(maxsize=None)
def d6_quotient() -> tuple[FiniteGroup, GroupHom]:
    """G24 / <ωφ>, dihedral of order 6."""
    G = g24()
    return quotient(G, G.closure([G.gen("ωφ")]), "G24/<ωφ>")


def _n_rule(k: int):
    z_mod = 3**k

    def rule(x, y):
        (c1, z1, q1), (c2, z2, q2) = x, y
        s = theta_sign(q1)
        return ((c1 + s * c2) % 3, (z1 + s * z2) % z_mod, _sd16_rule(q1, q2))

    return rule


def _n_table(k: int, labels) -> np.ndarray:
    """Vectorised table for N_k with labels ordered (c, z, q) lexicographically."""
    zm = 3**k
    nq = len(Q8_LABELS)
    qt = table_from_rule(Q8_LABELS, _sd16_rule)
    qs = np.array([theta_sign(q) for q in Q8_LABELS])
    idx = np.arange(len(labels))
    c = idx // (zm * nq)
    z = (idx // nq) % zm
    qi = idx % nq
    s = qs[qi][:, None]
    cc = (c[:, None] + s * c[None, :]) % 3
    zz = (z[:, None] + s * z[None, :]) % zm
    qq = qt[qi[:, None], qi[None, :]]
    return ((cc * zm + zz) * nq + qq).astype(np.int32)


@lru_cache(maxsize=None)
def n_level(k: int) -> FiniteGroup:
    """N_k = (C3 × C_{3^k}) ⋊ Q8 with embeddings "G24", "Q8", "C3", "D" and quotient map "Q8"."""
    if k < 1:
        raise GroupError("n_level needs k >= 1")
    zm = 3**k
    labels = [(c, z, q) for c in range(3) for z in range(zm) for q in Q8_LABELS]
    e = (0, 0)
    gens = {
        "c": labels.index((1, 0, e)),
        "g": labels.index((0, 1 % zm, e)),
        "ωφ": labels.index((0, 0, (1, 1))),
        "ω²": labels.index((0, 0, (2, 0))),
    }
    G = FiniteGroup(f"N{k}", labels, _n_table(k, labels), gens, {"k": k})
    G.subgroups["G24"] = hom_from_labels(g24(), G, lambda x: (x[0], 0, x[1]), f"G24->N{k}")
    G.subgroups["Q8"] = hom_from_labels(q8(), G, lambda q: (0, 0, q), f"Q8->N{k}")
    G.subgroups["C3"] = hom_from_labels(c3(), G, lambda c: (c, 0, e), f"C3->N{k}")
    D, d_emb = subgroup(G, {"c": gens["c"], "ωφ": gens["ωφ"]}, "D")
    G.subgroups["D"] = d_emb
    G.maps["Q8"] = hom_from_labels(G, q8(), lambda x: x[2], f"N{k}->Q8")
    G.sylow_p = 3
    G.sylow_gens = [gens["c"], gens["g"]]
    G.complement = G.subgroups["Q8"]
    G.retraction = G.maps["Q8"]
    return G


def n_mod_d(k: int) -> tuple[FiniteGroup, GroupHom]:
    G = n_level(k)
    return quotient(G, list(G.subgroups["D"].map), f"N{k}/D")


@dataclass
class TowerOfGroups:
    levels: list[FiniteGroup]
    down: list[GroupHom]  # down[i]: levels[i+1] -> levels[i]

    def composite(self, upper: int, lower: int) -> GroupHom:
        """levels[upper] -> levels[lower] (0-based indices, upper > lower)."""
        h = self.down[upper - 1]
        for i in range(upper - 2, lower - 1, -1):
            h = self.down[i].compose(h)
        return h


@lru_cache(maxsize=None)
def down_map(k: int) -> GroupHom:
    """N_{k+1} -> N_k reducing the C_{3^(k+1)} coordinate mod 3^k."""
    src, dst = n_level(k + 1), n_level(k)
    zm = 3**k
    hom = hom_from_labels(src, dst, lambda x: (x[0], x[1] % zm, x[2]), f"N{k+1}->N{k}")
    if not hom.is_surjective() or len(hom.kernel()) != 3:
        raise GroupError("tower map must be onto with kernel of order 3")
    for name in ("G24", "Q8", "C3"):
        if not hom.compose(src.subgroups[name]) == dst.subgroups[name]:
            raise GroupError(f"tower map incompatible with embedding {name}")
    return hom


def tower(k_max: int) -> TowerOfGroups:
    if k_max < 2:
        raise GroupError("tower needs k_max >= 2")
    return TowerOfGroups([n_level(k) for k in range(1, k_max + 1)], [down_map(k) for k in range(1, k_max)])


def cosets(G: FiniteGroup, emb: GroupHom) -> list[int]:
    """Left transversal of emb(H) in G: least element index of each coset gH, in increasing order."""
    if emb.dst is not G or not emb.is_injective():
        raise GroupError("cosets needs an embedding into G")
    h = emb.map
    seen = np.zeros(G.order, dtype=bool)
    reps = []
    for x in range(G.order):
        if not seen[x]:
            reps.append(x)
            seen[G.mult[x, h]] = True
    return reps


def coset_data(G: FiniteGroup, emb: GroupHom) -> tuple[list[int], np.ndarray, np.ndarray]:
    """Transversal T plus, for every x in G, (coset number i, H-index h) with x = T[i]·emb(h)."""
    T = cosets(G, emb)
    which = np.empty(G.order, dtype=np.int64)
    hpart = np.empty(G.order, dtype=np.int64)
    for i, t in enumerate(T):
        for hi, y in enumerate(G.mult[t, emb.map]):
            which[y] = i
            hpart[y] = hi
    return T, which, hpart


# built-in constructors, addressable by name for serialisation
CONSTRUCTORS: dict[str, Callable[..., FiniteGroup]] = {
    "SD16": sd16,
    "Q8": q8,
    "G24": g24,
    "C3": c3,
    "N": n_level,
}


def by_name(name: str, params: dict | None = None) -> FiniteGroup:
    params = params or {}
    if name.startswith("N") and name[1:].isdigit():
        return n_level(int(name[1:]))
    if name == "N":
        return n_level(int(params["k"]))
    if name.startswith("C") and name[1:].isdigit():
        n = int(name[1:])
        return c3() if n == 3 else cyclic(n)
    if name in CONSTRUCTORS:
        return CONSTRUCTORS[name]()
    raise GroupError(f"unknown group constructor {name!r}")
