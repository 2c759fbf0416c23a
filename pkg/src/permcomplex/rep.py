"""Modules over group algebras R[G] for R = F_p, Z/p^m or Z_(p).

A :class:`RepModule` stores the action of every group element, either as a
dense ``(|G|, n, n)`` array or, for signed permutation modules, as a pair of
``(|G|, n)`` arrays (``perm``, ``coef``) meaning ``g·e_j = coef[g, j] e_{perm[g, j]}``.
The monomial form keeps induced modules over the larger tower groups cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import exactla as la
from .exactla import PLOCAL, PRIME, TRUNCATION, RingSpec
from .grp import FiniteGroup, GroupHom, coset_data, sd16, q8, q8_in_sd16

# |G|^2 * cost-per-product below which the action audit runs over all pairs
FULL_AUDIT_BUDGET = 2 * 10**8


class ActionError(ValueError):
    """The stored matrices do not define a representation."""

    def __init__(self, msg: str, pair: tuple | None = None):
        super().__init__(msg)
        self.pair = pair


class EquivarianceError(ValueError):
    pass


class ModuleMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# ring-generic dense helpers
# ---------------------------------------------------------------------------


def inverse(ring: RingSpec, a: np.ndarray) -> np.ndarray:
    """Inverse of a square matrix that is invertible over ``ring``."""
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if ring.mode == PRIME:
        return la.inv_mod(a, ring.p)
    if ring.mode == TRUNCATION:
        return la.inv_mod_q(a, ring.p, ring.m)
    w = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a.tolist())]
    for c in range(n):
        piv = min(
            (i for i in range(c, n) if w[i][c] != 0),
            key=lambda i: la.valuation(w[i][c], ring.p),
            default=None,
        )
        if piv is None or la.valuation(w[piv][c], ring.p) > 0:
            raise la.RingError("matrix is not invertible over Z_(p)")
        w[c], w[piv] = w[piv], w[c]
        pv = w[c][c]
        w[c] = [x / pv for x in w[c]]
        for i in range(n):
            if i != c and w[i][c]:
                f = w[i][c]
                w[i] = [x - f * y for x, y in zip(w[i], w[c])]
    return ring.normalize(np.array([row[n:] for row in w], dtype=object))


def is_invertible(ring: RingSpec, a: np.ndarray) -> bool:
    """Square matrices over any of the local rings are invertible iff invertible mod p."""
    if a.shape[0] != a.shape[1]:
        return False
    return la.rank_mod(residue(ring, a), ring.p) == a.shape[0]


def residue(ring: RingSpec, a: np.ndarray) -> np.ndarray:
    """Entrywise reduction mod p as an int64 array."""
    if ring.mode != PLOCAL:
        return np.mod(a, ring.p).astype(np.int64)
    return la.PrimeField(ring.p).array(a.astype(object) if a.dtype != object else a)


def unit_rows(ring: RingSpec, K: np.ndarray) -> list[int]:
    """Rows of K whose square minor is invertible (K must have full column rank mod p)."""
    if K.shape[1] == 0:
        return []
    rows = la.rref_mod(residue(ring, K).T, ring.p)[1]
    if len(rows) != K.shape[1]:
        raise ValueError("columns are not independent mod p")
    return rows


def complete_basis(ring: RingSpec, K: np.ndarray) -> np.ndarray:
    """Extend columns independent mod p by standard vectors to a basis [K | E]."""
    n = K.shape[0]
    aug = np.hstack([residue(ring, K), np.eye(n, dtype=np.int64)])
    piv = la.rref_mod(aug, ring.p)[1]
    if piv[: K.shape[1]] != list(range(K.shape[1])):
        raise ValueError("columns are not independent mod p")
    extra = [j - K.shape[1] for j in piv[K.shape[1] :]]
    E = np.eye(n, dtype=np.int64)[:, extra]
    return np.hstack([K.astype(object) if K.dtype == object else K, E]) if K.size else E


# ---------------------------------------------------------------------------
# RepModule
# ---------------------------------------------------------------------------


class RepModule:
    """Finite free R-module with an audited action of a finite group."""

    def __init__(
        self,
        group: FiniteGroup,
        ring: RingSpec,
        rank: int,
        act: np.ndarray | None = None,
        *,
        perm: np.ndarray | None = None,
        coef: np.ndarray | None = None,
        name: str = "",
        audit: bool = True,
    ):
        self.group = group
        self.ring = ring
        self.rank = int(rank)
        self.name = name
        self.induced_from: tuple | None = None
        self._dense: np.ndarray | None = None
        n, N = self.rank, group.order
        if perm is not None:
            if act is not None:
                raise ValueError("give either dense action or monomial data")
            self.perm = np.asarray(perm, dtype=np.int64).reshape(N, n)
            c = np.ones((N, n), dtype=np.int64) if coef is None else np.asarray(coef)
            self.coef = ring.normalize(c.reshape(N, n))
            if self.coef.dtype == object or (ring.mode == PLOCAL and np.any(np.abs(self.coef) != 1)):
                raise ValueError("monomial coefficients must be ±1")
        else:
            self.perm = None
            self.coef = None
            a = np.asarray(act)
            if a.shape != (N, n, n):
                raise ValueError(f"action array has shape {a.shape}, expected {(N, n, n)}")
            if a.dtype == object or ring.is_modular:
                a = np.stack([ring.normalize(x) for x in a]) if N else a
            self._dense = a
        if audit:
            self.audit()

    # -- access -------------------------------------------------------------

    @property
    def is_monomial(self) -> bool:
        return self.perm is not None

    def mat(self, g: int) -> np.ndarray:
        if self._dense is not None:
            return self._dense[g]
        n = self.rank
        out = np.zeros((n, n), dtype=np.int64)
        out[self.perm[g], np.arange(n)] = self.coef[g]
        return out

    def dense(self) -> np.ndarray:
        if self._dense is None:
            self._dense = np.stack([self.mat(g) for g in range(self.group.order)])
        return self._dense

    def apply(self, g: int, X: np.ndarray) -> np.ndarray:
        """act(g) @ X"""
        if self.is_monomial:
            X = np.asarray(X)
            out = np.empty_like(X)
            c = self.coef[g]
            out[self.perm[g]] = (c[:, None] * X) if X.ndim == 2 else c * X
            return self.ring.normalize(out) if self.ring.is_modular else out
        return self.ring.matmul(self._dense[g], X)

    def gen_mats(self) -> dict[str, np.ndarray]:
        return {k: self.mat(v) for k, v in self.group.gens.items()}

    def __repr__(self) -> str:
        return f"<RepModule {self.name or '?'} rank={self.rank} over {self.ring}[{self.group.name}]>"

    # -- validation -----------------------------------------------------------

    def audit(self) -> None:
        """Check act(1) = I and act(x)act(y) = act(xy).

        All pairs are checked when affordable.  Otherwise the check runs over
        generators s and all y, which already implies the homomorphism
        property for every pair (induct on word length of x).
        """
        G, n, ring = self.group, self.rank, self.ring
        if n == 0:
            return
        if not np.array_equal(self.mat(G.id) if not self.is_monomial else self.mat(G.id), np.eye(n, dtype=np.int64)):
            raise ActionError("identity does not act as the identity", (G.id, G.id))
        cost = n if self.is_monomial else n**3
        lefts = range(G.order) if G.order**2 * cost <= FULL_AUDIT_BUDGET else sorted(set(G.gens.values()))
        if self.is_monomial:
            for x in lefts:
                px, cx = self.perm[x], self.coef[x]
                comp_p = px[self.perm]  # (|G|, n)
                comp_c = cx[self.perm] * self.coef
                comp_c = ring.normalize(comp_c) if ring.is_modular else comp_c
                rows = self.group.mult[x]
                bad = np.any(comp_p != self.perm[rows], axis=1) | np.any(comp_c != self.coef[rows], axis=1)
                if bad.any():
                    y = int(np.flatnonzero(bad)[0])
                    raise ActionError(f"act({G.labels[x]})act({G.labels[y]}) != act(product)", (x, y))
            return
        A = self._dense
        for x in lefts:
            if ring.is_modular and A.dtype == np.int64 and ring.modulus**2 * n < 2**62:
                prod = np.mod(np.einsum("ij,yjk->yik", A[x], A), ring.modulus)
            elif A.dtype == np.int64 and ring.mode == PLOCAL and int(np.abs(A).max()) ** 2 * n < 2**62:
                prod = np.einsum("ij,yjk->yik", A[x], A)
            else:
                prod = np.stack([ring.matmul(A[x], A[y]) for y in range(G.order)])
            target = A[G.mult[x]]
            bad = [y for y in range(G.order) if not _arr_eq(prod[y], target[y])]
            if bad:
                y = bad[0]
                raise ActionError(f"act({G.labels[x]})act({G.labels[y]}) != act(product)", (x, y))

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_generators(
        cls, group: FiniteGroup, ring: RingSpec, gens: dict[str, np.ndarray], name: str = ""
    ) -> "RepModule":
        """Reconstruct the full action from generator matrices and audit it.

        The action is propagated along a spanning tree of the Cayley graph;
        any inconsistency with the relations of ``group`` shows up in the audit
        as a failing (g, h) pair.
        """
        mats = {k: ring.array(np.asarray(v)) for k, v in gens.items()}
        if set(mats) != set(group.gens):
            raise ActionError(f"generator names {sorted(mats)} do not match {sorted(group.gens)}")
        n = next(iter(mats.values())).shape[0] if mats else 0
        for k, v in mats.items():
            if v.shape != (n, n):
                raise ActionError(f"generator {k} has shape {v.shape}")
        by_index = {}
        for k, v in group.gens.items():
            if v in by_index and not _arr_eq(by_index[v], mats[k]):
                raise ActionError(f"generator {k} disagrees with an equal generator", (v, group.id))
            by_index[v] = mats[k]
        proto = next(iter(mats.values())) if mats else np.zeros((0, 0), dtype=np.int64)
        A = np.zeros((group.order, n, n), dtype=proto.dtype)
        A[group.id] = ring.eye(n)
        for z, g, y in group.bfs_words():
            A[z] = ring.matmul(by_index[g], A[y])
        return cls(group, ring, n, A, name=name)


def _arr_eq(a: np.ndarray, b: np.ndarray) -> bool:
    if a.dtype == object or b.dtype == object:
        return bool(np.all(np.asarray(a, dtype=object) == np.asarray(b, dtype=object)))
    return np.array_equal(a, b)


# ---------------------------------------------------------------------------
# Characters and basic modules
# ---------------------------------------------------------------------------


@dataclass
class CharacterData:
    """A ±1-valued character, given on generators and extended over the table."""

    group: FiniteGroup
    values: dict[str, int]
    name: str = ""

    def __post_init__(self) -> None:
        G = self.group
        if set(self.values) != set(G.gens) or any(v not in (1, -1) for v in self.values.values()):
            raise ActionError("character values must be ±1 on every generator")
        s = np.zeros(G.order, dtype=np.int64)
        s[G.id] = 1
        gi = {G.gens[k]: v for k, v in self.values.items()}
        for z, g, y in G.bfs_words():
            s[z] = gi[g] * s[y]
        bad = np.flatnonzero((s[:, None] * s[None, :]) != s[G.mult])
        if bad.size:
            x, y = divmod(int(bad[0]), G.order)
            raise ActionError("values do not extend to a homomorphism to {±1}", (x, y))
        self.signs = s

    def __call__(self, g: int) -> int:
        return int(self.signs[g])

    def pullback(self, f: GroupHom, name: str | None = None) -> "CharacterData":
        s = self.signs[f.map]
        src = f.src
        return CharacterData(src, {k: int(s[v]) for k, v in src.gens.items()}, name or self.name)

    @classmethod
    def from_signs(cls, group: FiniteGroup, signs: Sequence[int], name: str = "") -> "CharacterData":
        return cls(group, {k: int(signs[v]) for k, v in group.gens.items()}, name)


def character_module(data: CharacterData, ring: RingSpec) -> RepModule:
    G = data.group
    return RepModule(
        G, ring, 1, perm=np.zeros((G.order, 1), dtype=np.int64), coef=data.signs.reshape(-1, 1), name=data.name
    )


def chi() -> CharacterData:
    """χ on SD16: χ(ω) = χ(φ) = -1."""
    return CharacterData(sd16(), {"ω": -1, "φ": -1}, "chi")


def theta() -> CharacterData:
    """θ on Q8: θ(ωφ) = 1, θ(ω²) = -1."""
    return CharacterData(q8(), {"ωφ": 1, "ω²": -1}, "theta")


def theta_on(G: FiniteGroup) -> CharacterData:
    """θ inflated along the registered retraction G -> Q8."""
    if G is q8():
        return theta()
    if G.retraction is None or G.retraction.dst is not q8():
        raise ModuleMismatch(f"{G.name} has no retraction onto Q8")
    return theta().pullback(G.retraction, "theta")


def trivial_character(G: FiniteGroup) -> CharacterData:
    return CharacterData(G, {k: 1 for k in G.gens}, "triv")


def trivial(G: FiniteGroup, ring: RingSpec) -> RepModule:
    return character_module(trivial_character(G), ring)


def regular(G: FiniteGroup, ring: RingSpec) -> RepModule:
    return RepModule(G, ring, G.order, perm=np.asarray(G.mult, dtype=np.int64), name="reg")


def zero_module(G: FiniteGroup, ring: RingSpec) -> RepModule:
    return RepModule(G, ring, 0, np.zeros((G.order, 0, 0), dtype=np.int64), name="0")


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------


class ModuleHom:
    """An R[G]-linear map, stored as a dst.rank × src.rank matrix."""

    def __init__(self, src: RepModule, dst: RepModule, matrix, *, check: bool = True, name: str = ""):
        if src.group is not dst.group or src.ring != dst.ring:
            raise ModuleMismatch("homomorphism between modules over different groups or rings")
        self.src, self.dst, self.name = src, dst, name
        m = np.asarray(matrix)
        if m.size == 0:
            m = np.zeros((dst.rank, src.rank), dtype=np.int64)
        self.matrix = src.ring.array(m)
        if self.matrix.shape != (dst.rank, src.rank):
            raise ModuleMismatch(f"matrix shape {self.matrix.shape} != {(dst.rank, src.rank)}")
        if check:
            self.check()

    def check(self) -> None:
        """act_dst(g) F = F act_src(g) for generators g (hence for every element)."""
        F = self.matrix
        for name, g in self.src.group.gens.items():
            lhs = self.dst.apply(g, F)
            rhs = self.src.ring.matmul(F, self.src.mat(g)) if not self.src.is_monomial else _right_apply(self.src, g, F)
            if not _arr_eq(lhs, rhs):
                raise EquivarianceError(f"map {self.name or ''} does not commute with {name}")

    def __matmul__(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(other.src, self.dst, self.src.ring.matmul(self.matrix, other.matrix), check=False)

    def is_zero(self) -> bool:
        return not np.any(self.matrix != 0)

    def as_matrix(self) -> la.Matrix:
        return la.Matrix(self.src.ring, self.matrix)

    @classmethod
    def identity(cls, M: RepModule) -> "ModuleHom":
        return cls(M, M, M.ring.eye(M.rank), check=False, name="id")

    @classmethod
    def zero(cls, src: RepModule, dst: RepModule) -> "ModuleHom":
        return cls(src, dst, np.zeros((dst.rank, src.rank), dtype=np.int64), check=False, name="0")


def _right_apply(M: RepModule, g: int, F: np.ndarray) -> np.ndarray:
    """F @ act(g) for monomial act: column j of the product is coef[g,j]·F[:, perm[g,j]]."""
    out = F[:, M.perm[g]] * M.coef[g][None, :]
    return M.ring.normalize(out) if M.ring.is_modular else out


def algebra_apply(M: RepModule, element: dict[int, int], X: np.ndarray) -> np.ndarray:
    """(Σ c_g g)·X for a group-algebra element given as {g: c_g}."""
    out = np.zeros_like(np.asarray(X), dtype=np.int64 if np.asarray(X).dtype != object else object)
    for g, c in element.items():
        out = out + c * M.apply(g, X)
    return M.ring.normalize(out) if M.ring.is_modular else out


def frobenius_map(src: RepModule, dst: RepModule, images: np.ndarray, name: str = "") -> ModuleHom:
    """The map Ind_H^G S -> dst extending S -> Res dst, s_a ↦ images[:, a].

    ``src`` must come from :func:`induce`; t_i ⊗ s_a goes to act_dst(t_i)·images[:, a].
    The H-linearity of ``images`` is not assumed: the result is checked.
    """
    if src.induced_from is None:
        raise ModuleMismatch("source is not an induced module")
    S, emb, T = src.induced_from
    images = src.ring.array(np.asarray(images).reshape(dst.rank, S.rank))
    blocks = [dst.apply(t, images) for t in T]
    F = np.hstack(blocks) if blocks else np.zeros((dst.rank, 0), dtype=np.int64)
    return ModuleHom(src, dst, F, name=name)


# ---------------------------------------------------------------------------
# Functors
# ---------------------------------------------------------------------------


def _same(*Ms: RepModule) -> None:
    G, R = Ms[0].group, Ms[0].ring
    for M in Ms[1:]:
        if M.group is not G:
            raise ModuleMismatch("modules over different groups")
        if M.ring != R:
            raise ModuleMismatch("modules over different rings")


def induce(M: RepModule, emb: GroupHom, name: str | None = None) -> RepModule:
    """Ind_H^G M with basis t_i ⊗ e_a at index i·rank(M) + a, T from grp.cosets."""
    if emb.src is not M.group:
        raise ModuleMismatch("embedding source is not the module's group")
    G = emb.dst
    T, which, hpart = coset_data(G, emb)
    n, k = M.rank, len(T)
    Tarr = np.asarray(T)
    y = G.mult[:, Tarr]  # (|G|, k): g·t_i
    j = which[y]
    h = hpart[y]
    nm = name if name is not None else f"Ind[{M.name}]"
    if M.is_monomial:
        perm = (j[:, :, None] * n + M.perm[h]).reshape(G.order, k * n)
        coef = M.coef[h].reshape(G.order, k * n)
        out = RepModule(G, M.ring, k * n, perm=perm, coef=coef, name=nm)
    else:
        A = M.dense()
        big = np.zeros((G.order, k * n, k * n), dtype=A.dtype)
        for i in range(k):
            for g in range(G.order):
                jj = j[g, i]
                big[g, jj * n : (jj + 1) * n, i * n : (i + 1) * n] = A[h[g, i]]
        out = RepModule(G, M.ring, k * n, big, name=nm)
    out.induced_from = (M, emb, T)
    return out


def induce_hom(f: ModuleHom, emb: GroupHom, src: RepModule | None = None, dst: RepModule | None = None) -> ModuleHom:
    src = src or induce(f.src, emb)
    dst = dst or induce(f.dst, emb)
    k = len(src.induced_from[2])
    return ModuleHom(src, dst, la.block_diag([f.matrix] * k) if k else None)


def restrict(M: RepModule, emb: GroupHom, name: str | None = None) -> RepModule:
    """Res along an embedding H -> G (or any homomorphism into M.group)."""
    if emb.dst is not M.group:
        raise ModuleMismatch("homomorphism target is not the module's group")
    nm = name if name is not None else M.name
    if M.is_monomial:
        return RepModule(emb.src, M.ring, M.rank, perm=M.perm[emb.map], coef=M.coef[emb.map], name=nm)
    return RepModule(emb.src, M.ring, M.rank, M.dense()[emb.map], name=nm)


def inflate(M: RepModule, proj: GroupHom, name: str | None = None) -> RepModule:
    """Pull back along a surjection G -> Q where M is a Q-module."""
    return restrict(M, proj, name)


def twist(M: RepModule, ch: CharacterData, name: str | None = None) -> RepModule:
    if ch.group is not M.group:
        raise ModuleMismatch("character lives on another group")
    s = ch.signs
    nm = name if name is not None else f"{M.name}⊗{ch.name}"
    if M.is_monomial:
        return RepModule(M.group, M.ring, M.rank, perm=M.perm, coef=M.coef * s[:, None], name=nm)
    return RepModule(M.group, M.ring, M.rank, M.dense() * s[:, None, None], name=nm)


def tensor(M: RepModule, N: RepModule, name: str | None = None) -> RepModule:
    _same(M, N)
    nm = name if name is not None else f"{M.name}⊗{N.name}"
    if M.is_monomial and N.is_monomial:
        perm = (M.perm[:, :, None] * N.rank + N.perm[:, None, :]).reshape(M.group.order, -1)
        coef = (M.coef[:, :, None] * N.coef[:, None, :]).reshape(M.group.order, -1)
        return RepModule(M.group, M.ring, M.rank * N.rank, perm=perm, coef=coef, name=nm)
    A = np.stack([np.kron(M.mat(g), N.mat(g)) for g in range(M.group.order)])
    return RepModule(M.group, M.ring, M.rank * N.rank, A, name=nm)


def dual(M: RepModule, name: str | None = None) -> RepModule:
    """Hom_R(M, R) with g acting by act(g^-1)^T in the dual basis."""
    G = M.group
    nm = name if name is not None else f"{M.name}*"
    if M.is_monomial:
        pi = M.perm[G.inv]
        c = M.coef[G.inv]
        inv_pi = np.argsort(pi, axis=1)
        coef = np.take_along_axis(c, inv_pi, axis=1)
        return RepModule(G, M.ring, M.rank, perm=inv_pi, coef=coef, name=nm)
    A = M.dense()[G.inv]
    return RepModule(G, M.ring, M.rank, np.ascontiguousarray(np.transpose(A, (0, 2, 1))), name=nm)


def direct_sum(*Ms: RepModule, name: str | None = None) -> RepModule:
    if not Ms:
        raise ValueError("direct_sum needs at least one module")
    _same(*Ms)
    G, R = Ms[0].group, Ms[0].ring
    nm = name if name is not None else "⊕".join(M.name for M in Ms)
    n = sum(M.rank for M in Ms)
    if all(M.is_monomial for M in Ms):
        offs = np.cumsum([0] + [M.rank for M in Ms[:-1]])
        perm = np.hstack([M.perm + o for M, o in zip(Ms, offs)])
        coef = np.hstack([M.coef for M in Ms])
        return RepModule(G, R, n, perm=perm, coef=coef, name=nm, audit=False)
    A = np.stack([la.block_diag([M.mat(g) for M in Ms]) for g in range(G.order)])
    return RepModule(G, R, n, A, name=nm, audit=False)


def reduce(M: RepModule, ring: RingSpec, name: str | None = None) -> RepModule:
    """Change coefficients along Z_(p) -> Z/p^m -> Z/p^m' -> F_p."""
    if ring.p != M.ring.p:
        raise ModuleMismatch("cannot change the prime")
    if M.ring.mode == PRIME and ring.mode != PRIME:
        raise ModuleMismatch("cannot lift F_p coefficients")
    if M.ring.mode == TRUNCATION and (ring.mode == PLOCAL or (ring.mode == TRUNCATION and ring.m > M.ring.m)):
        raise ModuleMismatch("cannot raise precision")
    nm = name if name is not None else M.name
    if M.is_monomial:
        return RepModule(M.group, ring, M.rank, perm=M.perm, coef=ring.normalize(M.coef), name=nm, audit=False)
    A = M.dense()
    if A.dtype == object:
        B = np.stack([ring.array(x) for x in A]) if len(A) else A
    else:
        B = ring.normalize(A) if ring.is_modular else A
    return RepModule(M.group, ring, M.rank, B, name=nm, audit=False)


def change_basis(M: RepModule, B: np.ndarray, name: str | None = None) -> RepModule:
    """Module with act'(g) = B^-1 act(g) B (columns of B are the new basis)."""
    R = M.ring
    B = R.array(np.asarray(B))
    Binv = inverse(R, B)
    A = M.dense()
    new = np.stack([R.matmul(Binv, R.matmul(A[g], B)) for g in range(M.group.order)])
    return RepModule(M.group, R, M.rank, new, name=name if name is not None else M.name)


def sub_action(M: RepModule, K: np.ndarray, name: str = "", check: bool = True) -> RepModule:
    """Action on the span of the columns of K (independent mod p and G-stable)."""
    R, G = M.ring, M.group
    K = R.array(np.asarray(K).reshape(M.rank, -1))
    d = K.shape[1]
    rows = unit_rows(R, K)
    Kinv = inverse(R, K[rows]) if d else np.zeros((0, 0), dtype=np.int64)
    mats = []
    for g in range(G.order):
        gk = M.apply(g, K)
        x = R.matmul(Kinv, gk[rows]) if d else np.zeros((0, 0), dtype=np.int64)
        if check and d and not _arr_eq(R.matmul(K, x), gk):
            raise ActionError(f"span is not stable under {G.labels[g]}", (g, G.id))
        mats.append(x)
    return RepModule(G, R, d, np.stack(mats) if mats else np.zeros((0, 0, 0)), name=name, audit=False)


def submodule(M: RepModule, K: np.ndarray, name: str = "") -> tuple[RepModule, ModuleHom]:
    """(U, inclusion) for a G-stable free summand spanned by the columns of K."""
    U = sub_action(M, K, name)
    return U, ModuleHom(U, M, M.ring.array(np.asarray(K).reshape(M.rank, -1)))


def quotient(M: RepModule, K: np.ndarray, name: str = "") -> tuple[RepModule, ModuleHom]:
    """(M/U, projection) for a G-stable free summand U spanned by K."""
    R, G = M.ring, M.group
    K = R.array(np.asarray(K).reshape(M.rank, -1))
    d = K.shape[1]
    B = complete_basis(R, K)
    Binv = inverse(R, R.array(B))
    n = M.rank
    mats = []
    for g in range(G.order):
        x = R.matmul(Binv, M.apply(g, R.array(B)))
        if d and np.any(x[d:, :d] != 0):
            raise ActionError("submodule is not G-stable", (g, G.id))
        mats.append(x[d:, d:])
    Q = RepModule(G, R, n - d, np.stack(mats), name=name, audit=False)
    return Q, ModuleHom(M, Q, Binv[d:], check=True)


# ---------------------------------------------------------------------------
# Hom spaces and multiplicities
# ---------------------------------------------------------------------------


def intertwiner_system(M: RepModule, N: RepModule, gens: Iterable[int] | None = None) -> np.ndarray:
    """Matrix of X ↦ (act_N(g) X - X act_M(g))_g acting on row-major vec(X), X: N.rank × M.rank."""
    gens = sorted(set(M.group.gens.values())) if gens is None else list(gens)
    dm, dn = M.rank, N.rank
    Im, In = np.eye(dm, dtype=np.int64), np.eye(dn, dtype=np.int64)
    blocks = []
    for g in gens:
        A, B = N.mat(g), M.mat(g)
        blocks.append(np.kron(A, Im) - np.kron(In, B.T))
    sysm = np.vstack(blocks) if blocks else np.zeros((0, dm * dn), dtype=np.int64)
    return M.ring.array(sysm) if M.ring.is_modular else sysm


def hom_space(M: RepModule, N: RepModule) -> list[ModuleHom]:
    """Basis of Hom_G(M, N) over F_p, or a saturated Z_(p)-basis in p-local mode."""
    _same(M, N)
    R = M.ring
    if R.mode == TRUNCATION:
        raise la.RingError("hom_space is not supported over Z/p^m (solution modules need not be free)")
    dm, dn = M.rank, N.rank
    if dm == 0 or dn == 0:
        return []
    sysm = intertwiner_system(M, N)
    K = la.kernel_basis(la.Matrix(R, sysm)).array
    return [ModuleHom(M, N, K[:, j].reshape(dn, dm), check=False) for j in range(K.shape[1])]


def hom_dim(M: RepModule, N: RepModule) -> int:
    return len(hom_space(M, N))


def hom_generators_truncated(M: RepModule, N: RepModule) -> list[np.ndarray]:
    """Howell generators of Hom_G(M, N) over Z/p^m (internal use: idempotent search)."""
    _same(M, N)
    R = M.ring
    if R.mode != TRUNCATION:
        raise la.RingError("expects Truncation mode")
    sysm = intertwiner_system(M, N)
    K = la.howell_kernel_array(sysm, R.p, R.m)
    return [K[:, j].reshape(N.rank, M.rank) for j in range(K.shape[1])]


@dataclass(frozen=True)
class Multiplicity:
    raw: int  # dim_k Hom_G(S, V)
    end_dim: int  # dim_k End_G(S)
    normalized: int  # raw / end_dim

    def to_dict(self) -> dict:
        return {"raw": self.raw, "end_dim": self.end_dim, "normalized": self.normalized}


def averaging_rank(S: RepModule, V: RepModule) -> int:
    """Rank of X ↦ |G|^-1 Σ_g act_V(g) X act_S(g^-1) on Hom_k(S, V)."""
    _same(S, V)
    G, R = S.group, S.ring
    if R.mode != PRIME:
        raise la.RingError("multiplicity is computed over F_p")
    if G.order % R.p == 0:
        raise la.RingError(f"p = {R.p} divides |{G.name}| = {G.order}; not semisimple")
    ds, dv = S.rank, V.rank
    if ds == 0 or dv == 0:
        return 0
    acc = np.zeros((dv * ds, dv * ds), dtype=np.int64)
    for g in range(G.order):
        acc = (acc + np.kron(V.mat(g), S.mat(int(G.inv[g])).T)) % R.p
    acc = (acc * pow(G.order, -1, R.p)) % R.p
    return la.rank_mod(acc, R.p)


def multiplicity(S: RepModule, V: RepModule) -> Multiplicity:
    raw = averaging_rank(S, V)
    end = averaging_rank(S, S)
    if raw % end:
        raise ArithmeticError("Hom dimension is not a multiple of dim End(S); S is not simple")
    return Multiplicity(raw, end, raw // end)


# ---------------------------------------------------------------------------
# Simple modules
# ---------------------------------------------------------------------------


def _f9_mult(a: int, b: int) -> np.ndarray:
    """Multiplication by a + b·i on F9 = F3[i]/(i²+1) in the basis (1, i)."""
    return np.array([[a, -b], [b, a]], dtype=np.int64) % 3


def _f9_power(j: int) -> np.ndarray:
    z = _f9_mult(1, 1)  # ζ = 1 + i generates F9^×
    out = np.eye(2, dtype=np.int64)
    for _ in range(j):
        out = (z @ out) % 3
    return out


FROBENIUS_F9 = np.array([[1, 0], [0, 2]], dtype=np.int64)  # i ↦ i³ = -i

SD16_TWO_DIM = {"F9[z]": 1, "F9[z^5]": 5, "F9[z^2]": 2}


def _require_p3(ring: RingSpec) -> None:
    if ring.p != 3:
        raise la.RingError("the semidihedral simples are tabulated for p = 3")


def simples_sd16(ring: RingSpec | None = None) -> list[RepModule]:
    """The seven absolutely simple F3[SD16]-modules: four characters, then three on F9."""
    ring = ring or la.PrimeField(3)
    _require_p3(ring)
    G = sd16()
    out = []
    for name, (vw, vf) in [("triv", (1, 1)), ("chi", (-1, -1)), ("sgn_ω", (-1, 1)), ("sgn_φ", (1, -1))]:
        out.append(character_module(CharacterData(G, {"ω": vw, "φ": vf}, name), ring))
    for name, j in SD16_TWO_DIM.items():
        out.append(RepModule.from_generators(G, ring, {"ω": _f9_power(j), "φ": FROBENIUS_F9}, name=name))
    return out


def simples_q8(ring: RingSpec | None = None) -> list[RepModule]:
    """Four characters of Q8 and the 2-dimensional simple (restriction of F9[z])."""
    ring = ring or la.PrimeField(3)
    _require_p3(ring)
    Q = q8()
    out = []
    for name, (u, v) in [("triv", (1, 1)), ("theta", (1, -1)), ("eta", (-1, 1)), ("theta.eta", (-1, -1))]:
        out.append(character_module(CharacterData(Q, {"ωφ": u, "ω²": v}, name), ring))
    faithful = simples_sd16(ring)[4]
    out.append(restrict(faithful, q8_in_sd16(), "H2"))
    return out


def simples(G: FiniteGroup, ring: RingSpec | None = None) -> list[RepModule]:
    """Simple F_p[G]-modules for the groups in scope.

    SD16 and Q8 are tabulated; a group with a normal Sylow p-subgroup and a
    registered retraction onto its complement gets the inflated simples.
    """
    ring = ring or la.PrimeField(3)
    if G is sd16():
        return simples_sd16(ring)
    if G is q8():
        return simples_q8(ring)
    H = complement_group(G)
    base = simples(H, ring)
    return [inflate(S, G.retraction, S.name) for S in base]


def complement_group(G: FiniteGroup) -> FiniteGroup:
    if G.complement is None or G.retraction is None:
        raise ModuleMismatch(f"{G.name} has no registered p'-complement")
    return G.complement.src


def lift_simple(S: RepModule, ring: RingSpec) -> RepModule:
    """A module over ``ring`` reducing mod p to exactly S.

    Signed permutation modules lift by their ±1 values over any group; other
    modules need a p'-group.  Otherwise the lift is the image
    of an idempotent on R[H] ⊗ R^d: start from the averaged splitting of
    h ⊗ v ↦ ρ(h) v (which is H-linear for any entrywise lift of ρ) and refine
    with e ← 3e² − 2e³ until it is idempotent over Z/p^m.
    """
    H = S.group
    if S.ring.mode != PRIME or ring.p != S.ring.p:
        raise ModuleMismatch("lift_simple starts from F_p coefficients")
    if ring.mode == PRIME:
        return S
    d = S.rank
    if S.is_monomial:
        coef = np.where(S.coef == ring.p - 1, -1, S.coef)
        if ring.mode == PLOCAL and np.any(np.abs(coef) != 1):
            raise ModuleMismatch("monomial coefficients must be ±1 to lift")
        return RepModule(H, ring, d, perm=S.perm, coef=ring.normalize(coef) if ring.is_modular else coef, name=S.name)
    if ring.mode == PLOCAL:
        raise ModuleMismatch("higher-dimensional simples are lifted over Z/p^m only")
    if H.order % ring.p == 0:
        raise ModuleMismatch("lifting requires a p'-group")
    p, m = ring.p, ring.m
    q = p**m
    F = regular(H, ring)
    n = H.order
    free = tensor(F, trivial_like(H, ring, d))  # basis h ⊗ e_a at h·d + a
    A = S.dense()
    inv_h = pow(n, -1, q)
    e = np.zeros((n * d, n * d), dtype=object)
    for h in range(n):
        for h2 in range(n):
            blk = A[int(H.mult[H.inv[h2], h])]
            e[h2 * d : (h2 + 1) * d, h * d : (h + 1) * d] = blk
    e = np.mod(e * inv_h, q)
    for _ in range(m + 1):
        e2 = np.mod(e @ e, q)
        nxt = np.mod(3 * e2 - 2 * np.mod(e2 @ e, q), q)
        if np.array_equal(nxt, e):
            break
        e = nxt
    e = e.astype(np.int64)
    if not np.array_equal(np.mod(e @ e, q), e):
        raise ArithmeticError("idempotent lift did not converge")
    cols = la.column_basis_mod(np.mod(e, p), p)
    K = e[:, cols]
    L = sub_action(free, K, name=S.name)
    # normalise so the lift reduces to S exactly: compose with an F_p isomorphism
    Lp = reduce(L, la.PrimeField(p))
    isos = hom_space(Lp, S)
    iso = _invertible_combination(isos, S.ring, d)
    if iso is None:
        raise ArithmeticError("lift does not reduce to the given simple")
    # new basis columns = K' with L-coordinates iso^-1 (lifted)
    B = inverse(ring, ring.array(iso))
    return change_basis(L, B, name=S.name)


def trivial_like(H: FiniteGroup, ring: RingSpec, d: int) -> RepModule:
    """R^d with trivial action."""
    return RepModule(H, ring, d, perm=np.tile(np.arange(d), (H.order, 1)), name=f"R^{d}", audit=False)


def _invertible_combination(basis: list[ModuleHom], ring: RingSpec, d: int, tries: int = 50) -> np.ndarray | None:
    """Some invertible element in the F_p-span of the given maps (deterministic search)."""
    if not basis:
        return None
    for f in basis:
        if la.rank_mod(f.matrix, ring.p) == d:
            return f.matrix
    rng = np.random.default_rng(0)
    for _ in range(tries):
        c = rng.integers(0, ring.p, size=len(basis))
        X = sum(int(ci) * f.matrix for ci, f in zip(c, basis)) % ring.p
        if la.rank_mod(X, ring.p) == d:
            return X
    return None


def isomorphism(M: RepModule, N: RepModule) -> np.ndarray | None:
    """An explicit invertible intertwiner M -> N over F_p, or None."""
    _same(M, N)
    if M.rank != N.rank:
        return None
    if M.rank == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return _invertible_combination(hom_space(M, N), M.ring, M.rank)
