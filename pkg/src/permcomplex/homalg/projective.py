"""Projective covers, Heller translates, resolutions and Ext.

Every group in scope has a normal Sylow p-subgroup P with a p'-complement H
(registered on the group).  Then M/(pM + I_P M) is a semisimple H-module, and
the projective cover of M is the sum of Ind_H^G of lifts of its simple
summands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import exactla as la
from .. import rep
from ..exactla import PLOCAL, PRIME, TRUNCATION
from ..grp import FiniteGroup
from ..rep import ModuleHom, RepModule


class CoverError(ValueError):
    pass


@dataclass
class Top:
    """Radical quotient M/(pM + I_P M), as an F_p[H]-module, with a projection and a section."""

    module: RepModule
    proj: np.ndarray  # top_dim × rank(M), over F_p
    section: np.ndarray  # rank(M) × top_dim with proj @ section = I
    summands: list[tuple[RepModule, list[np.ndarray]]]  # (simple of H, embeddings S -> top)

    @property
    def dim(self) -> int:
        return self.module.rank

    def signature(self) -> tuple[tuple[str, int], ...]:
        return tuple((S.name, len(fs)) for S, fs in self.summands if fs)


def _setup(G: FiniteGroup):
    if G.complement is None or G.retraction is None or G.sylow_p is None:
        raise CoverError(f"{G.name} has no registered normal Sylow subgroup and complement")
    return G.complement, G.complement.src


def radical_basis(M: RepModule) -> np.ndarray:
    """F_p basis of the image of I_P·M in M/pM (columns)."""
    G = M.group
    p = M.ring.p
    n = M.rank
    I = np.eye(n, dtype=np.int64)
    cols = []
    for s in G.sylow_gens:
        cols.append(np.mod(rep.residue(M.ring, M.apply(s, I)) - I, p))
    if not cols or n == 0:
        return np.zeros((n, 0), dtype=np.int64)
    big = np.hstack(cols)
    r, piv = la.rref_mod(big.T, p)
    return np.ascontiguousarray(r.T)


def top(M: RepModule) -> Top:
    emb, H = _setup(M.group)
    Fp = la.PrimeField(M.ring.p)
    p = Fp.p
    n = M.rank
    R = radical_basis(M)
    B = rep.complete_basis(Fp, R)
    Binv = la.inv_mod(B, p) if n else np.zeros((0, 0), dtype=np.int64)
    k = R.shape[1]
    proj, section = Binv[k:], B[:, k:]
    t = n - k
    mats = []
    for h in range(H.order):
        g = emb(h)
        mats.append(np.mod(proj @ rep.residue(M.ring, M.apply(g, section)), p))
    T = rep.RepModule(H, Fp, t, np.stack(mats) if mats else np.zeros((H.order, 0, 0)), name=f"top({M.name})")
    summands = []
    covered = 0
    for S in rep.simples(H, Fp):
        maps = [f.matrix for f in rep.hom_space(S, T)] if t else []
        end = rep.hom_dim(S, S)
        if end != 1 and maps:
            raise CoverError(f"simple {S.name} is not absolutely simple; splitting field required")
        summands.append((S, maps))
        covered += S.rank * len(maps)
    if covered != t:
        raise CoverError("radical quotient is not semisimple over the complement")
    return Top(T, proj, section, summands)


_LIFTS: dict = {}
_INDS: dict = {}


def lifted_simple(S: RepModule, ring: la.RingSpec) -> RepModule:
    key = (id(S.group), S.name, ring)
    if key not in _LIFTS:
        _LIFTS[key] = rep.lift_simple(S, ring)
    return _LIFTS[key]


def indecomposable_projective(G: FiniteGroup, S_name: str, ring: la.RingSpec) -> RepModule:
    """P_S = Ind_H^G(lift of S) for a simple S of the complement H, named by S."""
    key = (id(G), S_name, ring)
    if key not in _INDS:
        emb, H = _setup(G)
        S = next(s for s in rep.simples(H) if s.name == S_name)
        _INDS[key] = rep.induce(lifted_simple(S, ring), emb, name=f"P[{S_name}]")
    return _INDS[key]


@dataclass
class CoverResult:
    module: RepModule
    map: ModuleHom
    summands: list[tuple[str, int]]  # (simple name, multiplicity), in simples() order
    top_dim: int

    @property
    def rank(self) -> int:
        return self.module.rank


def projective_cover(M: RepModule) -> CoverResult:
    """Minimal projective P ->> M over F_p, Z/p^m or Z_(p).

    In p-local mode the simples of the top must lift over Z_(p) (rank one);
    otherwise reduce to Z/p^m first.
    """
    G, ring = M.group, M.ring
    emb, H = _setup(G)
    tp = top(M)
    n = M.rank
    hinv = Fraction(1, H.order) if ring.mode == PLOCAL else pow(H.order, -1, ring.modulus)
    blocks, parts, counts = [], [], []
    for S, maps in tp.summands:
        counts.append((S.name, len(maps)))
        if not maps:
            continue
        try:
            Sl = lifted_simple(S, ring)
        except rep.ModuleMismatch as e:
            raise CoverError(str(e)) from e
        Pi = indecomposable_projective(G, S.name, ring)
        for f in maps:
            X = ring.array(np.mod(tp.section @ f, ring.p))
            acc = None
            for h in range(H.order):
                term = ring.matmul(M.apply(emb(h), X), Sl.mat(int(H.inv[h])))
                acc = term if acc is None else acc + term
            L = ring.normalize(np.asarray(acc, dtype=object) * hinv) if acc is not None else X
            L = ring.array(L)
            parts.append(Pi)
            blocks.append(rep.frobenius_map(Pi, M, L).matrix)
    if not parts:
        if n:
            raise CoverError("nonzero module with zero top")
        Z = rep.zero_module(G, ring)
        return CoverResult(Z, ModuleHom.zero(Z, M), counts, 0)
    P = rep.direct_sum(*parts, name="⊕".join(x.name for x in parts))
    F = np.hstack(blocks)
    cover = ModuleHom(P, M, F, name="cover")
    if la.rank_mod(rep.residue(ring, F), ring.p) != n:
        raise CoverError("cover map is not surjective")
    if top(P).dim != tp.dim:
        raise CoverError("cover is not minimal: radical quotients differ")
    return CoverResult(P, cover, counts, tp.dim)


def kernel_free_basis(ring: la.RingSpec, F: np.ndarray, expected: int | None = None) -> np.ndarray:
    """Basis (columns) of the kernel of a split surjection between free modules."""
    if ring.mode == PRIME:
        K = la.nullspace_mod(F, ring.p)
    elif ring.mode == TRUNCATION:
        K = la.free_basis_columns(la.howell_kernel_array(F, ring.p, ring.m), ring.p)
    else:
        K = la.kernel_basis(la.Matrix(ring, F)).array
    if expected is not None and K.shape[1] != expected:
        raise CoverError(f"kernel has rank {K.shape[1]}, expected {expected}")
    return K


@dataclass
class HellerResult:
    omega: RepModule
    inclusion: ModuleHom
    cover: CoverResult


def heller(M: RepModule) -> HellerResult:
    """ΩM = ker(P_M ->> M)."""
    cov = projective_cover(M)
    P = cov.module
    if P.rank == 0:
        Z = rep.zero_module(M.group, M.ring)
        return HellerResult(Z, ModuleHom.zero(Z, P), cov)
    K = kernel_free_basis(M.ring, cov.map.matrix, P.rank - M.rank)
    omega, inc = rep.submodule(P, K, name=f"Ω({M.name})")
    return HellerResult(omega, inc, cov)


def heller_power(M: RepModule, k: int) -> RepModule:
    for _ in range(k):
        M = heller(M).omega
    return M


def is_projective(M: RepModule) -> bool:
    """M is projective iff its projective cover has zero kernel.

    p-local lattices whose top needs a simple without a Z_(p)-form are tested
    on the reduction mod p (a lattice is projective iff its reduction is).
    """
    try:
        cov = projective_cover(M)
    except CoverError:
        if M.ring.mode != PLOCAL:
            raise
        return is_projective(rep.reduce(M, la.PrimeField(M.ring.p)))
    if M.ring.mode == PLOCAL:
        return cov.rank == M.rank
    if M.ring.mode == TRUNCATION:
        return not np.any(la.howell_kernel_array(cov.map.matrix, M.ring.p, M.ring.m))
    return cov.rank == M.rank


def stable_hom(M: RepModule, N: RepModule) -> int:
    """dim Hom(M, N) minus the dimension of maps factoring through P_N ->> N (over F_p)."""
    if M.ring.mode != PRIME:
        raise la.RingError("stable_hom is computed over F_p")
    full = rep.hom_space(M, N)
    cov = projective_cover(N)
    if cov.rank == 0 or not full:
        return len(full)
    through = [(cov.map.matrix @ f.matrix) % M.ring.p for f in rep.hom_space(M, cov.module)]
    if not through:
        return len(full)
    r = la.rank_mod(np.stack([t.reshape(-1) for t in through]), M.ring.p)
    return len(full) - r


# -- resolutions ------------------------------------------------------------


@dataclass
class MultiplicityTable:
    columns: list[str]
    rows: list[list[int]] = field(default_factory=list)

    def row(self, r: int) -> dict[str, int]:
        return {c: v for c, v in zip(self.columns, self.rows[r]) if v}

    def to_dict(self) -> dict:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}


@dataclass
class ResolutionPrefix:
    module: RepModule
    terms: list[RepModule]  # P_0, P_1, ...
    differentials: list[ModuleHom]  # d_0: P_0 -> M, d_r: P_r -> P_{r-1}
    syzygies: list[RepModule]  # Ω^1 M, Ω^2 M, ...
    table: MultiplicityTable


def minimal_resolution(M: RepModule, r_max: int) -> ResolutionPrefix:
    terms, diffs, syz = [], [], []
    cols = [S.name for S in rep.simples(M.group)]
    table = MultiplicityTable(cols)
    cur, inc = M, None
    for r in range(r_max + 1):
        h = heller(cur)
        terms.append(h.cover.module)
        counts = dict(h.cover.summands)
        table.rows.append([counts.get(c, 0) for c in cols])
        if inc is None:
            diffs.append(h.cover.map)
        else:
            diffs.append(ModuleHom(h.cover.module, terms[-2], M.ring.matmul(inc.matrix, h.cover.map.matrix), check=False))
        syz.append(h.omega)
        cur, inc = h.omega, h.inclusion
    return ResolutionPrefix(M, terms, diffs, syz, table)


@dataclass
class FreeResolution:
    """A free resolution F_r = F_p[G]^{a_r}; ``gens[r]`` has the images d(e_{1,j}) as columns."""

    module: RepModule
    ranks: list[int]
    gens: list[np.ndarray]


def _orbit_generators(G: FiniteGroup, act, K: np.ndarray, p: int) -> list[np.ndarray]:
    """Greedy generators for the F_p[G]-module spanned by the columns of K."""
    k = K.shape[1]
    chosen: list[np.ndarray] = []
    span = np.zeros((K.shape[0], 0), dtype=np.int64)
    rank = 0
    for j in range(k):
        if rank == k:
            break
        v = K[:, j : j + 1]
        if la.rank_mod(np.hstack([span, v]), p) == rank:
            continue
        orbit = np.hstack([act(g, v) for g in range(G.order)])
        rows, _ = la.rref_mod(np.hstack([span, orbit]).T, p)
        span = np.ascontiguousarray(rows.T)
        rank = span.shape[1]
        chosen.append(v[:, 0].copy())
    if rank != k:
        raise CoverError("orbit generators do not span the kernel")
    return chosen


def free_resolution(M: RepModule, length: int, redundant: int = 1) -> FreeResolution:
    """Deliberately non-minimal free resolution over F_p[G].

    Each step takes greedy orbit generators of the previous kernel and adds
    ``redundant`` extra generators (sums of the chosen ones), so the result
    never coincides with the minimal resolution.
    """
    G = M.group
    p = M.ring.p
    Mp = rep.reduce(M, la.PrimeField(p)) if M.ring.mode != PRIME else M
    order = G.order
    mult = np.asarray(G.mult)

    def free_act(a):
        def act(g, X):
            # basis e_{x,i} at i*|G| + x; g·e_{x,i} = e_{gx,i}
            out = np.empty_like(X)
            idx = (np.arange(a)[:, None] * order + mult[g][None, :]).reshape(-1)
            out[idx] = X
            return out

        return act

    act = lambda g, X: np.mod(rep.residue(Mp.ring, Mp.apply(g, X)), p)  # noqa: E731
    K = np.eye(Mp.rank, dtype=np.int64)
    ranks, gens = [], []
    for _ in range(length + 1):
        if K.shape[1] == 0:
            chosen = []
        else:
            chosen = _orbit_generators(G, act, K, p)
        extra = [np.mod(sum(chosen[: i + 2]), p) for i in range(redundant)] if chosen else []
        cols = chosen + extra
        a = len(cols)
        U = np.stack(cols, axis=1) if cols else np.zeros((K.shape[0], 0), dtype=np.int64)
        ranks.append(a)
        gens.append(U)
        # d: F = kG^a -> ambient, e_{x,i} ↦ x·u_i
        D = np.zeros((K.shape[0], a * order), dtype=np.int64)
        for i in range(a):
            for x in range(order):
                D[:, i * order + x] = act(x, U[:, i : i + 1])[:, 0]
        K = la.nullspace_mod(D, p) if a else np.zeros((0, 0), dtype=np.int64)
        act = free_act(a)
    return FreeResolution(Mp, ranks, gens)


def hom_cochain_ranks(res: FreeResolution, S: RepModule) -> list[int]:
    """Ranks of δ^r: Hom_G(F_r, S) -> Hom_G(F_{r+1}, S) for r = 0 .. len-1."""
    G = res.module.group
    p = S.ring.p
    d = S.rank
    rho = S.dense()
    out = []
    for r in range(len(res.ranks) - 1):
        a_r, a_next = res.ranks[r], res.ranks[r + 1]
        U = res.gens[r + 1]  # columns in F_r
        delta = np.zeros((a_next * d, a_r * d), dtype=np.int64)
        for j in range(a_next):
            cj = U[:, j].reshape(a_r, G.order)
            for i in range(a_r):
                nz = np.flatnonzero(cj[i])
                if nz.size:
                    blk = np.tensordot(cj[i, nz], rho[nz], axes=(0, 0))
                    delta[j * d : (j + 1) * d, i * d : (i + 1) * d] = np.mod(blk, p)
        out.append(la.rank_mod(delta, p) if delta.size else 0)
    return out


def ext_dims_free(res: FreeResolution, S: RepModule, r_max: int) -> list[int]:
    """dim_{End S} Ext^r(M, S), r = 0..r_max, from Hom(F_•, S)."""
    if len(res.ranks) < r_max + 2:
        raise ValueError("free resolution too short")
    d = S.rank
    end = rep.hom_dim(S, S)
    ranks = hom_cochain_ranks(res, S)
    dims = []
    for r in range(r_max + 1):
        prev = ranks[r - 1] if r else 0
        raw = res.ranks[r] * d - ranks[r] - prev
        dims.append(raw // end)
    return dims


@dataclass
class ExtComparison:
    simple: str
    r: int
    minimal: int
    free: int

    @property
    def agree(self) -> bool:
        return self.minimal == self.free

    def to_dict(self) -> dict:
        return {"simple": self.simple, "r": self.r, "minimal": self.minimal, "free": self.free, "agree": self.agree}


def ext_table(M: RepModule, r_max: int, redundant: int = 1) -> list[ExtComparison]:
    """Both Ext computations for every simple S of the group and r ≤ r_max.

    The simple heads of P_r label the columns of the minimal table, so a
    P_S-multiplicity is matched with Ext^r(M, S) for the same S.
    """
    Mp = rep.reduce(M, la.PrimeField(M.ring.p)) if M.ring.mode != PRIME else M
    res_min = minimal_resolution(Mp, r_max)
    res_free = free_resolution(Mp, r_max + 1, redundant)
    out = []
    for S in rep.simples(M.group):
        free = ext_dims_free(res_free, S, r_max)
        col = res_min.table.columns.index(S.name)
        for r in range(r_max + 1):
            out.append(ExtComparison(S.name, r, res_min.table.rows[r][col], free[r]))
    return out


def ext_dim(M: RepModule, S: RepModule, r: int) -> ExtComparison:
    for e in ext_table(M, r):
        if e.simple == S.name and e.r == r:
            return e
    raise KeyError(S.name)
