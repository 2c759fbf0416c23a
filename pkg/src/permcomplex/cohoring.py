"""The graded SD16-equivariant ledger of ρ: image subalgebra -> F3[y_i] ⊗ E(x_i), i = 1, 2.

The ambient algebra is the product A_1 × A_2 with A_i = F3[y_i] ⊗ E(x_i, a_i)
(|x_i| = |a_i| = 1, |y_i| = 2), multiplied componentwise.  A basis monomial is
y_i^k x_i^b a_i^c stored in that order; moving x past a costs a sign.

SD16 acts by algebra automorphisms determined on generators:
ω(v_i) = -(-1)^i v_{i+1} and φ(v_i) = -v_{i+1} for v ∈ {x, y, a}, indices mod 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import exactla as la
from . import rep
from .grp import sd16

P = 3
F3 = la.PrimeField(P)
DEFAULT_MAX_DEGREE = 6
NORMATIVE_DEGREES = range(0, 4)


@dataclass(frozen=True, order=True)
class Monomial:
    component: int  # 1 or 2
    y_exp: int = 0
    x_bit: int = 0
    a_bit: int = 0

    def __post_init__(self) -> None:
        if self.component not in (1, 2) or self.y_exp < 0 or self.x_bit not in (0, 1) or self.a_bit not in (0, 1):
            raise ValueError(f"invalid monomial {self!r}")

    @property
    def degree(self) -> int:
        return 2 * self.y_exp + self.x_bit + self.a_bit

    @property
    def factors(self) -> int:
        """Number of generator factors (each carries one sign under the action)."""
        return self.y_exp + self.x_bit + self.a_bit

    def __str__(self) -> str:
        i = self.component
        parts = []
        if self.y_exp:
            parts.append(f"y{i}" + (f"^{self.y_exp}" if self.y_exp > 1 else ""))
        if self.x_bit:
            parts.append(f"x{i}")
        if self.a_bit:
            parts.append(f"a{i}")
        return "".join(parts) or f"1_{i}"


def monomials(degree: int, with_a: bool = True) -> list[Monomial]:
    out = []
    for comp in (1, 2):
        for c in (0, 1) if with_a else (0,):
            for b in (0, 1):
                rest = degree - b - c
                if rest >= 0 and rest % 2 == 0:
                    out.append(Monomial(comp, rest // 2, b, c))
    return sorted(out)


class GradedElement:
    """Homogeneous F3-combination of monomials."""

    __slots__ = ("terms", "degree")

    def __init__(self, terms: dict[Monomial, int] | None = None, degree: int | None = None):
        clean = {m: c % P for m, c in (terms or {}).items() if c % P}
        degs = {m.degree for m in clean}
        if len(degs) > 1:
            raise ValueError("graded element must be homogeneous")
        if degree is None:
            degree = degs.pop() if degs else 0
        elif degs and degs != {degree}:
            raise ValueError("declared degree does not match the monomials")
        self.terms = clean
        self.degree = degree

    @classmethod
    def of(cls, m: Monomial, c: int = 1) -> "GradedElement":
        return cls({m: c}, m.degree)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "GradedElement") -> "GradedElement":
        if not self.terms:
            return other
        if not other.terms:
            return self
        if other.degree != self.degree:
            raise ValueError("adding elements of different degrees")
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return GradedElement(t, self.degree)

    def __neg__(self) -> "GradedElement":
        return GradedElement({m: -c for m, c in self.terms.items()}, self.degree)

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def scale(self, c: int) -> "GradedElement":
        return GradedElement({m: c * v for m, v in self.terms.items()}, self.degree)

    def __mul__(self, other: "GradedElement") -> "GradedElement":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.terms == other.terms and (self.degree == other.degree or not self.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def vector(self, basis: list[Monomial]) -> np.ndarray:
        idx = {m: i for i, m in enumerate(basis)}
        v = np.zeros(len(basis), dtype=np.int64)
        for m, c in self.terms.items():
            v[idx[m]] = c
        return v

    @classmethod
    def from_vector(cls, v, basis: list[Monomial], degree: int) -> "GradedElement":
        return cls({m: int(c) for m, c in zip(basis, v)}, degree)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for m in sorted(self.terms):
            c = self.terms[m]
            sign = "-" if c == P - 1 else "+"
            coef = "" if c in (1, P - 1) else f"{c}"
            out += f" {sign} {coef}{m}" if out else ("-" if sign == "-" else "") + f"{coef}{m}"
        return out

    __repr__ = __str__


def _mono_mul(u: Monomial, v: Monomial) -> tuple[int, Monomial | None]:
    if u.component != v.component:
        return 0, None
    if (u.x_bit and v.x_bit) or (u.a_bit and v.a_bit):
        return 0, None
    sign = -1 if (u.a_bit and v.x_bit) else 1
    return sign, Monomial(u.component, u.y_exp + v.y_exp, u.x_bit | v.x_bit, u.a_bit | v.a_bit)


def multiply(u: GradedElement, v: GradedElement) -> GradedElement:
    terms: dict[Monomial, int] = {}
    for m1, c1 in u.terms.items():
        for m2, c2 in v.terms.items():
            s, m = _mono_mul(m1, m2)
            if m is not None:
                terms[m] = terms.get(m, 0) + s * c1 * c2
    return GradedElement(terms, u.degree + v.degree)


# -- named elements ----------------------------------------------------------


def gen(name: str) -> GradedElement:
    """x1, x2, y1, y2, a1, a2, unit, or one of the composite image generators."""
    if name == "unit":
        return GradedElement({Monomial(1): 1, Monomial(2): 1}, 0)
    if name == "w":
        return gen("x1") * gen("a1") - gen("x2") * gen("a2")
    if name in ("y1a1", "y2a2"):
        return gen(name[:2]) * gen(name[2:])
    letter, i = name[0], int(name[1:])
    m = {"y": Monomial(i, 1, 0, 0), "x": Monomial(i, 0, 1, 0), "a": Monomial(i, 0, 0, 1)}[letter]
    return GradedElement.of(m)


IMAGE_GENERATORS = ("unit", "x1", "x2", "y1", "y2", "w", "y1a1", "y2a2")


# -- SD16 action ---------------------------------------------------------------

# sign picked up by each generator factor in component i, and the swap
_SIGNS = {"ω": {1: 1, 2: -1}, "φ": {1: -1, 2: -1}}


def _gen_action(name: str, m: Monomial) -> tuple[int, Monomial]:
    s = _SIGNS[name][m.component] ** m.factors
    return s, Monomial(3 - m.component, m.y_exp, m.x_bit, m.a_bit)


def _apply_gen(name: str, u: GradedElement) -> GradedElement:
    terms = {}
    for m, c in u.terms.items():
        s, m2 = _gen_action(name, m)
        terms[m2] = terms.get(m2, 0) + s * c
    return GradedElement(terms, u.degree)


def sd16_action(g, u: GradedElement) -> GradedElement:
    """g·u for g an SD16 element index, a label (a, b) = ω^a φ^b, or a word such as "ωωφ"."""
    G = sd16()
    if isinstance(g, str):
        word = list(g)
    else:
        lab = G.labels[g] if isinstance(g, (int, np.integer)) else tuple(g)
        word = ["ω"] * lab[0] + ["φ"] * lab[1]
    for letter in reversed(word):
        u = _apply_gen(letter, u)
    return u


def action_matrix(name: str, basis: list[Monomial]) -> np.ndarray:
    idx = {m: i for i, m in enumerate(basis)}
    n = len(basis)
    A = np.zeros((n, n), dtype=np.int64)
    for j, m in enumerate(basis):
        s, m2 = _gen_action(name, m)
        A[idx[m2], j] = s % P
    return A


class ActionAuditError(AssertionError):
    pass


def audit_action(max_degree: int) -> None:
    """ω^8 = φ^2 = 1 and φωφ^-1 = ω^3 on every monomial up to max_degree."""
    for d in range(max_degree + 1):
        basis = monomials(d)
        W, F = action_matrix("ω", basis), action_matrix("φ", basis)
        I = np.eye(len(basis), dtype=np.int64)
        w8 = np.linalg.matrix_power(W, 8) % P
        f2 = (F @ F) % P
        lhs = (F @ W @ F) % P  # φ = φ^-1
        rhs = np.linalg.matrix_power(W, 3) % P
        if not (np.array_equal(w8, I) and np.array_equal(f2, I) and np.array_equal(lhs, rhs)):
            raise ActionAuditError(f"SD16 relations fail in degree {d}")


def degree_module(basis: list[Monomial], name: str = "") -> rep.RepModule:
    return rep.RepModule.from_generators(
        sd16(), F3, {"ω": action_matrix("ω", basis), "φ": action_matrix("φ", basis)}, name=name
    )


# -- the subalgebra and ρ ------------------------------------------------------


@lru_cache(maxsize=None)
def _products(max_degree: int) -> dict[int, list[GradedElement]]:
    """All products of image generators (multisets, in a fixed order) by degree."""
    gens = [gen(n) for n in IMAGE_GENERATORS[1:]]
    degs = [g.degree for g in gens]
    out: dict[int, list[GradedElement]] = {0: [gen("unit")]}
    for length in range(1, max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(len(gens)), length):
            d = sum(degs[i] for i in combo)
            if d > max_degree:
                continue
            u = gen("unit")
            for i in combo:
                u = u * gens[i]
            if not u.is_zero():
                out.setdefault(d, []).append(u)
    return out


def _row_basis(vectors: list[np.ndarray], n: int) -> np.ndarray:
    if not vectors:
        return np.zeros((0, n), dtype=np.int64)
    r, _ = la.rref_mod(np.stack(vectors), P)
    return r


def subalgebra_basis(d: int, max_degree: int = DEFAULT_MAX_DEGREE) -> list[GradedElement]:
    """Echelon basis of the degree-d part of the subalgebra generated by the image generators."""
    if d > max_degree:
        raise ValueError("degree beyond the configured bound")
    basis = monomials(d)
    rows = _row_basis([u.vector(basis) for u in _products(max(max_degree, d)).get(d, [])], len(basis))
    return [GradedElement.from_vector(r, basis, d) for r in rows]


def rho(u: GradedElement) -> GradedElement:
    """Restriction to the C3 factors: a_i ↦ 0."""
    return GradedElement({m: c for m, c in u.terms.items() if not m.a_bit}, u.degree)


# -- ledger --------------------------------------------------------------------


@dataclass
class DegreeLedgerRow:
    degree: int
    dim_subalgebra: int
    dim_target: int
    dim_image: int
    dim_kernel: int
    dim_cokernel: int
    kernel: dict[str, int]  # normalized multiplicities over the SD16 simples
    cokernel: dict[str, int]
    kernel_basis: list[str] = field(default_factory=list)
    kernel_isotypic: dict[str, list[str]] = field(default_factory=dict)
    normative: bool = True

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "dims": {
                "subalgebra": self.dim_subalgebra,
                "target": self.dim_target,
                "image": self.dim_image,
                "kernel": self.dim_kernel,
                "cokernel": self.dim_cokernel,
            },
            "kernel": dict(self.kernel),
            "cokernel": dict(self.cokernel),
            "kernel_basis": list(self.kernel_basis),
            "kernel_isotypic": {k: list(v) for k, v in self.kernel_isotypic.items()},
            "normative": self.normative,
        }


def _decompose(M: rep.RepModule, simples: list[rep.RepModule]) -> dict[str, int]:
    out = {}
    for S in simples:
        k = rep.multiplicity(S, M).normalized if M.rank else 0
        if k:
            out[S.name] = k
    total = sum(S.rank * out.get(S.name, 0) for S in simples)
    if total != M.rank:
        raise ArithmeticError("isotypic multiplicities do not recover the dimension")
    return out


def _isotypic_vectors(K: rep.RepModule, Kbasis: np.ndarray, amb: list[Monomial], d: int, simples) -> dict[str, list[str]]:
    """Spanning elements of each isotypic piece of a kernel, written in the ambient basis."""
    out = {}
    for S in simples:
        if S.rank != 1:
            continue
        maps = rep.hom_space(S, K)
        if maps:
            vecs = [np.mod(Kbasis @ f.matrix[:, 0], P) for f in maps]
            out[S.name] = [str(GradedElement.from_vector(v, amb, d)) for v in vecs]
    return out


def ledger_row(d: int, max_degree: int = DEFAULT_MAX_DEGREE) -> DegreeLedgerRow:
    amb = monomials(d)
    tgt = monomials(d, with_a=False)
    simples = rep.simples_sd16()
    S = subalgebra_basis(d, max(max_degree, d))
    Smat = np.stack([u.vector(amb) for u in S], axis=1) if S else np.zeros((len(amb), 0), dtype=np.int64)
    A = degree_module(amb, f"A^{d}")
    T = degree_module(tgt, f"T^{d}")
    if S:
        rep.sub_action(A, Smat)  # raises unless the subalgebra piece is SD16-stable
    # ρ as a matrix target × ambient
    R = np.zeros((len(tgt), len(amb)), dtype=np.int64)
    tidx = {m: i for i, m in enumerate(tgt)}
    for j, m in enumerate(amb):
        if not m.a_bit:
            R[tidx[m], j] = 1
    img = np.mod(R @ Smat, P)
    img_basis = np.ascontiguousarray(la.rref_mod(img.T, P)[0].T) if img.size else np.zeros((len(tgt), 0), dtype=np.int64)
    ker_coords = la.nullspace_mod(img, P) if Smat.shape[1] else np.zeros((0, 0), dtype=np.int64)
    Kvecs = np.mod(Smat @ ker_coords, P) if ker_coords.size else np.zeros((len(amb), 0), dtype=np.int64)
    dim_img = img_basis.shape[1]
    kernel_mod = rep.sub_action(A, Kvecs, name=f"ker^{d}") if Kvecs.shape[1] else rep.zero_module(sd16(), F3)
    coker_mod = rep.quotient(T, img_basis, name=f"coker^{d}")[0] if dim_img < len(tgt) else rep.zero_module(sd16(), F3)
    return DegreeLedgerRow(
        degree=d,
        dim_subalgebra=len(S),
        dim_target=len(tgt),
        dim_image=dim_img,
        dim_kernel=Kvecs.shape[1],
        dim_cokernel=len(tgt) - dim_img,
        kernel=_decompose(kernel_mod, simples),
        cokernel=_decompose(coker_mod, simples),
        kernel_basis=[str(GradedElement.from_vector(Kvecs[:, j], amb, d)) for j in range(Kvecs.shape[1])],
        kernel_isotypic=_isotypic_vectors(kernel_mod, Kvecs, amb, d, simples) if Kvecs.shape[1] else {},
        normative=d in NORMATIVE_DEGREES,
    )


def ledger(D: int = DEFAULT_MAX_DEGREE) -> list[DegreeLedgerRow]:
    if D < 3:
        raise ValueError("the ledger needs degrees 0..3 at least")
    audit_action(D)
    return [ledger_row(d, D) for d in range(D + 1)]


def dual_names() -> dict[str, str]:
    """S -> name of S* among the SD16 simples."""
    simples = rep.simples_sd16()
    out = {}
    for S in simples:
        Sd = rep.dual(S)
        match = [T.name for T in simples if T.rank == S.rank and rep.isomorphism(Sd, T) is not None]
        if len(match) != 1:
            raise ArithmeticError(f"cannot identify the dual of {S.name}")
        out[S.name] = match[0]
    return out


@dataclass
class N1Table:
    columns: list[str]
    rows: list[dict[str, int]]
    normative_rows: int

    def to_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "rows": [dict(r) for r in self.rows],
            "normative_rows": self.normative_rows,
        }


def n1_multiplicity_table(r_max: int = 2, rows: list[DegreeLedgerRow] | None = None) -> N1Table:
    """Multiplicity of P_S in P_r: mult of S* in coker(degree r) plus in ker(degree r+1)."""
    rows = rows if rows is not None else ledger(max(DEFAULT_MAX_DEGREE, r_max + 1))
    by_deg = {r.degree: r for r in rows}
    if r_max + 1 not in by_deg:
        raise ValueError(f"ledger does not reach degree {r_max + 1}")
    duals = dual_names()
    cols = [S.name for S in rep.simples_sd16()]
    out = []
    for r in range(r_max + 1):
        entry = {}
        for S in cols:
            k = by_deg[r].cokernel.get(duals[S], 0) + by_deg[r + 1].kernel.get(duals[S], 0)
            if k:
                entry[S] = k
        out.append(entry)
    return N1Table(cols, out, normative_rows=min(r_max, 2) + 1)
