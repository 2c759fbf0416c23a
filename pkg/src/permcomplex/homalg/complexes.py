"""Cochain-indexed complexes M_0 -> M_1 -> ... and their exactness certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import exactla as la
from ..exactla import PLOCAL, HomologyReport
from ..grp import GroupHom, TowerOfGroups
from ..rep import ModuleHom, RepModule, _right_apply


class ComplexError(ValueError):
    pass


@dataclass
class ChainComplex:
    """diffs[j]: modules[j] -> modules[j+1]; zero modules at both ends are implicit."""

    modules: list[RepModule]
    diffs: list[ModuleHom]
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.diffs) != max(len(self.modules) - 1, 0):
            raise ComplexError("need one differential between each pair of consecutive modules")
        if self.modules:
            G, R = self.modules[0].group, self.modules[0].ring
            for M in self.modules:
                if M.group is not G or M.ring != R:
                    raise ComplexError("all modules must share one group and one ring")
        for j, d in enumerate(self.diffs):
            if d.src is not self.modules[j] or d.dst is not self.modules[j + 1]:
                raise ComplexError(f"differential {j} has the wrong ends")
        for j in range(len(self.diffs) - 1):
            comp = self.ring.matmul(self.diffs[j + 1].matrix, self.diffs[j].matrix)
            if np.any(comp != 0):
                raise la.CompositionError(f"d{j + 1}∘d{j} != 0 in {self.name}")

    @property
    def ring(self) -> la.RingSpec:
        return self.modules[0].ring

    @property
    def group(self):
        return self.modules[0].group

    def __len__(self) -> int:
        return len(self.modules)

    def ranks(self) -> list[int]:
        return [M.rank for M in self.modules]

    def incoming(self, j: int) -> np.ndarray:
        if j == 0:
            return np.zeros((self.modules[0].rank, 0), dtype=np.int64)
        return self.diffs[j - 1].matrix

    def outgoing(self, j: int) -> np.ndarray:
        if j == len(self.modules) - 1:
            return np.zeros((0, self.modules[j].rank), dtype=np.int64)
        return self.diffs[j].matrix


@dataclass
class ExactnessCertificate:
    reports: list[HomologyReport]
    name: str = ""

    @property
    def exact(self) -> bool:
        return all(r.is_zero for r in self.reports)

    @property
    def nonexact_positions(self) -> list[int]:
        return [j for j, r in enumerate(self.reports) if not r.is_zero]

    def to_dict(self) -> dict:
        return {
            "exact": self.exact,
            "nonexact_positions": self.nonexact_positions,
            "homology": [str(r) for r in self.reports],
        }


def homology_at(C: ChainComplex, j: int) -> HomologyReport:
    R = C.ring
    return la.homology(la.Matrix(R, C.incoming(j)), la.Matrix(R, C.outgoing(j)))


def check_exact(C: ChainComplex) -> ExactnessCertificate:
    if C.ring.mode != PLOCAL:
        raise la.RingError("check_exact works over Z_(p)")
    return ExactnessCertificate([homology_at(C, j) for j in range(len(C))], C.name)


# ---------------------------------------------------------------------------
# Towers
# ---------------------------------------------------------------------------


@dataclass
class CoveringHom:
    """Z_(p)-linear M_{k+1} -> M_k with τ(g·x) = down(g)·τ(x)."""

    src: RepModule
    dst: RepModule
    matrix: np.ndarray
    over: GroupHom

    def check(self) -> None:
        if self.over.src is not self.src.group or self.over.dst is not self.dst.group:
            raise ComplexError("covering map over the wrong group homomorphism")
        R = self.src.ring
        for name, g in self.src.group.gens.items():
            if self.src.is_monomial:
                lhs = _right_apply(self.src, g, self.matrix)
            else:
                lhs = R.matmul(self.matrix, self.src.mat(g))
            rhs = self.dst.apply(self.over(g), self.matrix)
            if np.any(np.asarray(lhs) != np.asarray(rhs)):
                raise ComplexError(f"transition does not cover the group map at generator {name}")


@dataclass
class TowerComplex:
    tower: TowerOfGroups
    levels: list[ChainComplex]
    transitions: list[list[CoveringHom]]  # transitions[i][j]: levels[i+1].modules[j] -> levels[i].modules[j]
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.levels) != len(self.tower.levels) or len(self.transitions) != len(self.levels) - 1:
            raise ComplexError("tower complex shape mismatch")
        for i, row in enumerate(self.transitions):
            up, low = self.levels[i + 1], self.levels[i]
            if len(row) != len(low):
                raise ComplexError("one transition per position required")
            for j, t in enumerate(row):
                if t.src is not up.modules[j] or t.dst is not low.modules[j]:
                    raise ComplexError(f"transition {i},{j} has the wrong ends")
                t.check()
            R = low.ring
            for j in range(len(low) - 1):
                a = R.matmul(low.diffs[j].matrix, row[j].matrix)
                b = R.matmul(row[j + 1].matrix, up.diffs[j].matrix)
                if np.any(a != b):
                    raise ComplexError(f"transition does not commute with d{j} between levels {i + 1} and {i}")

    def composite(self, upper: int, lower: int, j: int) -> np.ndarray:
        """Transition matrix levels[upper] -> levels[lower] at position j."""
        R = self.levels[0].ring
        mat = self.transitions[upper - 1][j].matrix
        for i in range(upper - 2, lower - 1, -1):
            mat = R.matmul(self.transitions[i][j].matrix, mat)
        return mat


@dataclass
class DivisibilityCheck:
    position: int
    upper: int  # level indices (0-based into the tower)
    lower: int
    exponent: int
    holds: bool

    def to_dict(self) -> dict:
        return {"position": self.position, "from": self.upper, "to": self.lower, "exponent": self.exponent, "holds": self.holds}


@dataclass
class TowerCertificate:
    name: str
    level_names: list[str]
    homology: list[list[HomologyReport]]  # [level][position]
    checks: list[DivisibilityCheck] = field(default_factory=list)
    target: int = 1

    @property
    def nonzero_positions(self) -> list[int]:
        return sorted({j for row in self.homology for j, r in enumerate(row) if not r.is_zero})

    @property
    def exact_at_every_level(self) -> bool:
        return not self.nonzero_positions

    @property
    def certified(self) -> bool:
        """Pro-zero evidence: every checked transition lands in p^(d·steps)·H at the lower level."""
        return all(c.holds for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "levels": self.level_names,
            "homology": [[str(r) for r in row] for row in self.homology],
            "nonzero_positions": self.nonzero_positions,
            "divisibility_target": self.target,
            "checks": [c.to_dict() for c in self.checks],
            "certified": self.certified,
            "vacuous": self.exact_at_every_level,
        }


def _divisible(R: la.RingSpec, tau: np.ndarray, up: ChainComplex, low: ChainComplex, j: int, e: int) -> bool:
    """τ(Z_upper) ⊆ p^e Z_lower + B_lower at position j."""
    Zu = la.kernel_basis(la.Matrix(R, up.outgoing(j))).array if up.outgoing(j).shape[0] else np.eye(up.modules[j].rank, dtype=np.int64)
    if Zu.shape[1] == 0:
        return True
    Zl = la.kernel_basis(la.Matrix(R, low.outgoing(j))).array if low.outgoing(j).shape[0] else np.eye(low.modules[j].rank, dtype=np.int64)
    Bl = low.incoming(j)
    lattice = np.hstack([np.asarray(Zl, dtype=object) * (R.p**e), np.asarray(Bl, dtype=object)])
    image = R.matmul(tau, Zu)
    return la.in_lattice(la.Matrix(R, lattice), la.Matrix(R, image))


def tower_check(T: TowerComplex, d: int = 1, composite: bool = False) -> TowerCertificate:
    """Per-level homology plus divisibility of the transitions on homology.

    At every position where some level has nonzero homology, the image of
    H(level k+1) -> H(level k) must lie in p^d·H(level k).  With
    ``composite`` the j-step maps are also checked against p^(d·j).
    """
    if len(T.levels) < 2:
        raise ComplexError("tower_check needs at least two levels")
    R = T.levels[0].ring
    if R.mode != PLOCAL:
        raise la.RingError("tower_check works over Z_(p)")
    hom = [[homology_at(C, j) for j in range(len(C))] for C in T.levels]
    cert = TowerCertificate(T.name, [G.name for G in T.tower.levels], hom, target=d)
    positions = cert.nonzero_positions
    L = len(T.levels)
    for j in positions:
        spans = [1] + (list(range(2, L)) if composite else [])
        for s in spans:
            for low in range(0, L - s):
                up = low + s
                tau = T.composite(up, low, j)
                ok = _divisible(R, tau, T.levels[up], T.levels[low], j, d * s)
                cert.checks.append(DivisibilityCheck(j, up, low, d * s, ok))
    return cert
