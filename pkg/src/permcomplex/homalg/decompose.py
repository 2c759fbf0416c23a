"""Fitting and Krull–Schmidt decompositions over Z/p^m[G].

Idempotents of End(M) are found from random endomorphisms: the
characteristic polynomial mod p is factored, a CRT polynomial gives an
idempotent mod p, and e ← 3e² − 2e³ lifts it to Z/p^m.  Polynomials in an
equivariant map stay equivariant, so every step stays inside End_G(M).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import sympy

from .. import exactla as la
from .. import grp, rep
from ..exactla import TRUNCATION
from ..rep import ModuleHom, RepModule
from .projective import top

_X = sympy.Symbol("x")


class DecompositionError(ValueError):
    pass


def _require_truncation(M: RepModule, min_m: int = 1) -> tuple[int, int, int]:
    R = M.ring
    if R.mode != TRUNCATION or R.m < min_m:
        raise DecompositionError(f"expects Z/p^m coefficients with m >= {min_m}, got {R}")
    return R.p, R.m, R.modulus


def _matpow_mod(a: np.ndarray, e: int, q: int) -> np.ndarray:
    out = np.eye(a.shape[0], dtype=np.int64)
    base = a.copy()
    while e:
        if e & 1:
            out = np.mod(out @ base, q)
        base = np.mod(base @ base, q)
        e >>= 1
    return out


def newton_idempotent(e: np.ndarray, p: int, m: int) -> np.ndarray:
    """Refine e with e² ≡ e (mod p) to a true idempotent mod p^m."""
    q = p**m
    e = np.mod(e, q)
    if np.any(np.mod(e @ e - e, p)):
        raise DecompositionError("not an idempotent mod p")
    for _ in range(m + 2):
        e2 = np.mod(e @ e, q)
        if np.array_equal(e2, e):
            return e
        e = np.mod(3 * e2 - 2 * np.mod(e2 @ e, q), q)
    raise DecompositionError("idempotent refinement did not converge")


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------


@dataclass
class FittingResult:
    image_basis: np.ndarray
    kernel_basis: np.ndarray
    image: RepModule
    kernel: RepModule
    f_image: np.ndarray  # f on the image part, in its basis
    f_kernel: np.ndarray
    steps: int  # k with Im f^k = Im f^(k+1)
    recomposition_invertible: bool
    invertible_on_image: bool
    nilpotent_on_kernel: bool  # f^(rank) ≡ 0 mod p on the kernel part
    topologically_nilpotent: bool  # f^(rank·m) ≡ 0 mod p^m on the kernel part

    @property
    def ranks(self) -> tuple[int, int]:
        return self.image.rank, self.kernel.rank

    @property
    def ok(self) -> bool:
        return self.recomposition_invertible and self.invertible_on_image and self.nilpotent_on_kernel and self.topologically_nilpotent


def _restrict_endo(ring: la.RingSpec, K: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Matrix of F on the span of K (F K ⊆ span K, K independent mod p)."""
    if K.shape[1] == 0:
        return np.zeros((0, 0), dtype=np.int64)
    rows = rep.unit_rows(ring, K)
    x = ring.matmul(rep.inverse(ring, K[rows]), ring.matmul(F, K)[rows])
    if np.any(ring.matmul(K, x) != ring.matmul(F, K)):
        raise DecompositionError("span is not invariant")
    return x


def fitting(M: RepModule, f: ModuleHom | np.ndarray) -> FittingResult:
    """M = Im f^∞ ⊕ Ker f^∞ over Z/p^m."""
    p, m, q = _require_truncation(M)
    if not isinstance(f, ModuleHom):
        f = ModuleHom(M, M, f)  # raises on a non-equivariant map
    elif f.src is not M or f.dst is not M:
        raise DecompositionError("f must be an endomorphism of M")
    ring = M.ring
    n = M.rank
    F = np.asarray(f.matrix, dtype=np.int64)
    power = F.copy()
    form = la.howell_array(power.T, p, m)
    steps = 1
    limit = max(1, n * m)
    while True:
        nxt = np.mod(power @ F, q)
        nform = la.howell_array(nxt.T, p, m)
        if nform.shape == form.shape and np.array_equal(nform, form):
            break
        power, form = nxt, nform
        steps += 1
        if steps > limit + 1:
            raise DecompositionError("image of f^k did not stabilise within rank·m steps")
    im = la.free_basis_columns(power, p)
    ker = la.free_basis_columns(la.howell_kernel_array(power, p, m), p)
    B = np.hstack([im, ker])
    recomp = B.shape[1] == n and rep.is_invertible(ring, B)
    image = rep.sub_action(M, im, name=f"Im∞({M.name})")
    kernel = rep.sub_action(M, ker, name=f"Ker∞({M.name})")
    Ai = _restrict_endo(ring, im, F)
    Ak = _restrict_endo(ring, ker, F)
    d = Ak.shape[0]
    nil = d == 0 or not np.any(np.mod(_matpow_mod(Ak, d, q), p))
    topo = d == 0 or not np.any(_matpow_mod(Ak, d * m, q))
    inv = Ai.shape[0] == 0 or rep.is_invertible(ring, Ai)
    return FittingResult(im, ker, image, kernel, Ai, Ak, steps, recomp, inv, nil, topo)


# ---------------------------------------------------------------------------
# Krull–Schmidt
# ---------------------------------------------------------------------------


def endomorphism_generators(M: RepModule) -> list[np.ndarray]:
    gens = rep.hom_generators_truncated(M, M)
    return [g for g in gens if np.any(g)]


@dataclass
class Summand:
    rank: int
    top: tuple[tuple[str, int], ...]
    certificate: str
    basis: np.ndarray  # columns in the coordinates of the input module

    @property
    def type(self) -> tuple:
        return (self.rank, self.top)

    def describe(self) -> str:
        t = "+".join(f"{n}" if c == 1 else f"{c}{n}" for n, c in self.top) or "0"
        return f"rank {self.rank}, top {t}"


@dataclass
class DecompositionReport:
    summands: list[Summand]
    precision: int
    seed: int
    trials: int
    basis_change_runs: int = 0
    stable_under_basis_change: bool | None = None
    stable_under_precision_bump: bool | None = None
    flags: list[str] = field(default_factory=list)

    def multiset(self) -> Counter:
        return Counter(s.type for s in self.summands)

    def rank_multiset(self) -> list[int]:
        return sorted(s.rank for s in self.summands)

    @property
    def total_rank(self) -> int:
        return sum(s.rank for s in self.summands)

    def types(self) -> list[dict]:
        out = []
        for (rank, tp), count in sorted(self.multiset().items(), key=lambda kv: (kv[0][0], kv[0][1])):
            desc = Summand(rank, tp, "", np.zeros((0, 0))).describe()
            out.append({"summand": desc, "rank": rank, "multiplicity": count})
        return out

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "seed": self.seed,
            "trials": self.trials,
            "summands": self.types(),
            "rank_multiset": self.rank_multiset(),
            "certificates": sorted(Counter(s.certificate for s in self.summands).items()),
            "basis_change_runs": self.basis_change_runs,
            "stable_under_basis_change": self.stable_under_basis_change,
            "stable_under_precision_bump": self.stable_under_precision_bump,
            "flags": list(self.flags),
        }


def _charpoly_factors(a: np.ndarray, p: int) -> list[tuple[sympy.Poly, int]]:
    cp = sympy.Matrix(np.mod(a, p).tolist()).charpoly(_X)
    P = sympy.Poly(cp.as_expr(), _X, modulus=p)
    return P.factor_list()[1]


def _poly_at(poly: sympy.Poly, a: np.ndarray, p: int, q: int) -> np.ndarray:
    coeffs = [int(c) % p for c in poly.all_coeffs()]
    n = a.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    eye = np.eye(n, dtype=np.int64)
    for c in coeffs:
        out = np.mod(out @ a + c * eye, q)
    return out


def _crt_idempotent(factors, a: np.ndarray, p: int, m: int) -> np.ndarray:
    """Idempotent from the first primary factor of the characteristic polynomial of a."""
    f1 = factors[0][0] ** factors[0][1]
    g = sympy.Poly(1, _X, modulus=p)
    for fac, e in factors[1:]:
        g = g * fac**e
    s, t, h = f1.gcdex(g)
    if h.degree() != 0:
        raise DecompositionError("primary factors not coprime")
    e_poly = (t * g).rem(f1 * g)
    e0 = _poly_at(e_poly, a, p, p**m)
    return newton_idempotent(e0, p, m)


def _split_free(ring: la.RingSpec, e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p, q = ring.p, ring.modulus
    n = e.shape[0]
    one_minus = np.mod(np.eye(n, dtype=np.int64) - e, q)
    return la.free_basis_columns(e, p), la.free_basis_columns(one_minus, p)


def _top_signature(M: RepModule) -> tuple[tuple[str, int], ...]:
    return top(M).signature()


def _decompose(M, basis, gens, rng, trials, out):
    ring = M.ring
    p, m, q = ring.p, ring.m, ring.modulus
    sig = _top_signature(M)
    if M.rank == 0:
        return
    if len(sig) == 1 and sig[0][1] == 1:
        out.append(Summand(M.rank, sig, "simple top", basis))
        return
    for _ in range(trials):
        c = rng.integers(0, q, size=len(gens))
        a = np.zeros((M.rank, M.rank), dtype=np.int64)
        for ci, g in zip(c, gens):
            a = np.mod(a + int(ci) * g, q)
        factors = _charpoly_factors(a, p)
        if len(factors) < 2:
            continue
        e = _crt_idempotent(factors, a, p, m)
        K1, K2 = _split_free(ring, e)
        if K1.shape[1] == 0 or K2.shape[1] == 0:
            continue
        for K, proj in ((K1, e), (K2, np.mod(np.eye(M.rank, dtype=np.int64) - e, q))):
            sub = rep.sub_action(M, K, name=M.name)
            rows = rep.unit_rows(ring, K)
            Kinv = rep.inverse(ring, K[rows])
            sub_gens = []
            for g in gens:
                img = np.mod(proj @ np.mod(g @ K, q), q)
                sub_gens.append(np.mod(Kinv @ img[rows], q))
            sub_gens = [x for x in sub_gens if np.any(x)]
            _decompose(sub, np.mod(basis @ K, q), sub_gens, rng, trials, out)
        return
    out.append(Summand(M.rank, sig, f"no split in {trials} seeded trials", basis))


def decompose_once(M: RepModule, seed: int = 0, trials: int = 24) -> list[Summand]:
    _require_truncation(M, 1)
    rng = np.random.default_rng(seed)
    out: list[Summand] = []
    gens = endomorphism_generators(M)
    _decompose(M, np.eye(M.rank, dtype=np.int64), gens, rng, trials, out)
    if sum(s.rank for s in out) != M.rank:
        raise DecompositionError("summand ranks do not add up")
    B = np.hstack([s.basis for s in out]) if out else np.zeros((0, 0), dtype=np.int64)
    if out and not rep.is_invertible(M.ring, B):
        raise DecompositionError("summands are not complementary")
    return out


def random_invertible(rng: np.random.Generator, n: int, p: int, bound: int) -> np.ndarray:
    while True:
        B = rng.integers(0, bound, size=(n, n), dtype=np.int64)
        if la.rank_mod(np.mod(B, p), p) == n:
            return B


def ks_decompose(
    M: RepModule,
    seed: int = 0,
    trials: int = 24,
    basis_changes: int = 10,
    bump=None,
    bump_m: int | None = None,
) -> DecompositionReport:
    """Krull–Schmidt decomposition with stability checks.

    The precision bump goes to ``bump_m`` (default m + 2).  ``bump(m)`` may
    rebuild the same module at that precision; without it the integer entries
    are reinterpreted modulo p^bump_m, which is valid exactly when they still
    define a representation there.
    """
    p, m, q = _require_truncation(M, 2)
    rng = np.random.default_rng(seed)
    summands = decompose_once(M, seed, trials)
    report = DecompositionReport(summands, m, seed, trials)
    base = report.multiset()
    ok = True
    for i in range(basis_changes):
        B = random_invertible(rng, M.rank, p, q)
        other = decompose_once(rep.change_basis(M, B), seed + 1 + i, trials)
        if Counter(s.type for s in other) != base:
            ok = False
            report.flags.append(f"basis change {i}: summand types differ")
    report.basis_change_runs = basis_changes
    report.stable_under_basis_change = ok if basis_changes else None
    bump_m = m + 2 if bump_m is None else bump_m
    if bump_m <= m:
        raise DecompositionError("the precision bump must raise m")
    up = la.Truncation(p, bump_m)
    N = None
    if bump is not None:
        N = bump(bump_m)
    else:
        # centered lift: integer-valued actions (signed permutations etc.) survive the bump
        def centered(a):
            return np.where(a > q // 2, a - q, a)

        try:
            if M.is_monomial:
                N = RepModule(M.group, up, M.rank, perm=M.perm, coef=centered(M.coef))
            else:
                N = RepModule(M.group, up, M.rank, centered(M.dense()))
        except rep.ActionError:
            report.flags.append(f"precision bump: entries do not define a module mod {p}^{bump_m}; not checked")
    if N is not None:
        other = decompose_once(N, seed, trials)
        same = Counter(s.type for s in other) == base
        report.stable_under_precision_bump = same
        if not same:
            report.flags.append(f"precision bump to {p}^{bump_m}: summand types differ")
    return report


# ---------------------------------------------------------------------------
# Seeded module catalogue over Z/p^m[G24]
# ---------------------------------------------------------------------------


def _g24_blocks():
    G = grp.g24()
    Fp = la.PrimeField(3)
    chars = rep.simples(G, Fp)[:4]
    H2 = rep.simples_q8(Fp)[4]
    D, demb = grp.subgroup(G, {"c": G.gen("c"), "ωφ": G.gen("ωφ")}, "C3xC4")
    C3 = G.subgroups["C3"]
    Q8e = G.subgroups["Q8"]
    q8_chars = rep.simples_q8(Fp)[:4]

    def char(i):
        return lambda R: rep.lift_simple(chars[i], R)

    def h2(R):
        return rep.inflate(rep.lift_simple(H2, R), G.retraction, "H2")

    def ind_q8(i):
        return lambda R: rep.induce(rep.lift_simple(q8_chars[i], R), Q8e, name=f"Ind_Q8({q8_chars[i].name})")

    def ind_q8_h2(R):
        return rep.induce(rep.lift_simple(H2, R), Q8e, name="Ind_Q8(H2)")

    def aug(i):
        def build(R):
            I = ind_q8(i)(R)
            target = rep.lift_simple(chars[i], R)
            eps = rep.frobenius_map(I, target, np.ones((1, 1), dtype=np.int64))
            K = la.free_basis_columns(la.howell_kernel_array(eps.matrix, R.p, R.m), R.p)
            return rep.sub_action(I, K, name=f"aug({q8_chars[i].name})")

        return build

    blocks = {}
    for i, S in enumerate(chars):
        blocks[S.name] = char(i)
    blocks["H2"] = h2
    for i, S in enumerate(q8_chars):
        blocks[f"Ind_Q8({S.name})"] = ind_q8(i)
        blocks[f"aug({S.name})"] = aug(i)
    blocks["Ind_Q8(H2)"] = ind_q8_h2
    blocks["Ind_C3(triv)"] = lambda R: rep.induce(rep.trivial(grp.c3(), R), C3, name="Ind_C3(triv)")
    blocks["Ind_C3xC4(triv)"] = lambda R: rep.induce(rep.trivial(D, R), demb, name="Ind_C3xC4(triv)")
    return blocks


_BLOCKS = None


def catalogue_blocks() -> dict:
    global _BLOCKS
    if _BLOCKS is None:
        _BLOCKS = _g24_blocks()
    return _BLOCKS


BLOCK_RANKS = {
    "triv": 1, "theta": 1, "eta": 1, "theta.eta": 1, "H2": 2,
    "Ind_Q8(triv)": 3, "Ind_Q8(theta)": 3, "Ind_Q8(eta)": 3, "Ind_Q8(theta.eta)": 3,
    "aug(triv)": 2, "aug(theta)": 2, "aug(eta)": 2, "aug(theta.eta)": 2,
    "Ind_Q8(H2)": 6, "Ind_C3(triv)": 8, "Ind_C3xC4(triv)": 2,
}  # fmt: skip


@dataclass
class ModuleRecipe:
    """Seeded description of a catalogue module: blocks plus a basis change with integer entries."""

    blocks: list[str]
    seed: int
    basis: np.ndarray

    def build(self, m: int, p: int = 3) -> RepModule:
        R = la.Truncation(p, m)
        parts = [catalogue_blocks()[b](R) for b in self.blocks]
        S = rep.direct_sum(*parts, name="⊕".join(self.blocks))
        S.audit()
        return rep.change_basis(S, np.mod(self.basis, R.modulus), name=f"random[{self.seed}]")

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    def to_dict(self) -> dict:
        return {"blocks": list(self.blocks), "seed": self.seed, "rank": self.rank}


def random_recipe(seed: int, max_rank: int = 12, p: int = 3) -> ModuleRecipe:
    rng = np.random.default_rng(seed)
    names = sorted(BLOCK_RANKS)
    blocks: list[str] = []
    total = 0
    target = int(rng.integers(3, max_rank + 1))
    while True:
        fits = [b for b in names if total + BLOCK_RANKS[b] <= target]
        if not fits:
            break
        b = fits[int(rng.integers(len(fits)))]
        blocks.append(b)
        total += BLOCK_RANKS[b]
        if total >= target or rng.random() < 0.15:
            break
    B = random_invertible(rng, total, p, p**12)
    return ModuleRecipe(blocks, seed, B)


def random_endomorphism(M: RepModule, rng: np.random.Generator, gens: list[np.ndarray] | None = None) -> ModuleHom:
    q = M.ring.modulus
    gens = endomorphism_generators(M) if gens is None else gens
    a = np.zeros((M.rank, M.rank), dtype=np.int64)
    for g in gens:
        a = np.mod(a + int(rng.integers(0, q)) * g, q)
    return ModuleHom(M, M, a)
