"""Two-particle product representations, center-of-mass and relative observables.

Every generator lifts as G = G_a (x) I + I (x) G_b, which makes mass and
momentum additive.  Position is not liftable that way: the physical
center-of-mass operators are the mass-weighted combination K_i / m dictated
by the lifted boosts, while the naive sum X_a (x) I + I (x) X_b is kept only
as a negative control (its commutator with the total momentum carries twice
the canonical coefficient).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ladder
from .particle import ParticleRep

__all__ = [
    "CcrCoefficientReport",
    "CompositeRep",
    "canonical_map_is_symplectic",
    "canonical_map_matrix",
    "com_position",
    "naive_position_sum",
    "relative_ops",
    "swap_operator",
    "tensor_rep",
    "verify_ccr_composite",
]


class CompositeRep:
    """Tensor product of two single-particle representations."""

    def __init__(self, rep_a: ParticleRep, rep_b: ParticleRep):
        ca, cb = rep_a.config, rep_b.config
        if ca.dims != cb.dims:
            raise ValueError(f"dimension mismatch: {ca.dims} vs {cb.dims}")
        if ca.units != cb.units:
            raise ValueError("both particles must share hbar and omega_ref")
        self.rep_a, self.rep_b = rep_a, rep_b
        self.dims = ca.dims
        self.units = ca.units
        self.total_mass = ca.mass + cb.mass
        self.reduced_mass = ca.mass * cb.mass / self.total_mass
        self.dim = rep_a.dim * rep_b.dim

        eye_a = np.eye(rep_a.dim, dtype=complex)
        eye_b = np.eye(rep_b.dim, dtype=complex)

        def lift(op_a, op_b):
            return np.kron(op_a, eye_b) + np.kron(eye_a, op_b)

        d = self.dims
        self.K = [lift(rep_a.K[i], rep_b.K[i]) for i in range(d)]
        self.P = [lift(rep_a.P[i], rep_b.P[i]) for i in range(d)]
        self.M = lift(rep_a.M, rep_b.M)
        self.J = {pair: lift(rep_a.J[pair], rep_b.J[pair]) for pair in rep_a.J}
        self.X = [op / self.total_mass for op in self.K]
        self.R = [np.kron(rep_a.X[i], eye_b) - np.kron(eye_a, rep_b.X[i]) for i in range(d)]
        self.Q = [
            (cb.mass * np.kron(rep_a.P[i], eye_b) - ca.mass * np.kron(eye_a, rep_b.P[i]))
            / self.total_mass
            for i in range(d)
        ]

    def interior_indices(self, margin: int) -> np.ndarray:
        ia = self.rep_a.interior_indices(margin)
        ib = self.rep_b.interior_indices(margin)
        return (ia[:, None] * self.rep_b.dim + ib[None, :]).ravel()

    def boundary_weight(self, state: np.ndarray) -> float:
        idx = self.interior_indices(1)
        inside = float(np.vdot(state[idx], state[idx]).real)
        return max(0.0, float(np.vdot(state, state).real) - inside)


def tensor_rep(rep_a: ParticleRep, rep_b: ParticleRep) -> CompositeRep:
    return CompositeRep(rep_a, rep_b)


def com_position(comp: CompositeRep) -> list:
    """Center-of-mass position operators, identical to K_i / m."""
    return list(comp.X)


def naive_position_sum(comp: CompositeRep) -> list:
    """The additive position sum; non-physical, kept as a failure witness."""
    eye_a = np.eye(comp.rep_a.dim, dtype=complex)
    eye_b = np.eye(comp.rep_b.dim, dtype=complex)
    return [
        np.kron(comp.rep_a.X[i], eye_b) + np.kron(eye_a, comp.rep_b.X[i])
        for i in range(comp.dims)
    ]


def relative_ops(comp: CompositeRep):
    """Relative position R = X_a - X_b and relative momentum Q = (m_b P_a - m_a P_b)/m."""
    return list(comp.R), list(comp.Q)


@dataclass
class CcrCoefficientReport:
    """Fitted coefficient c of P [A_i, B_j] P ~ i c delta_ij P on the interior."""

    pair: str
    coefficient: float
    expected: float
    residual_norm: float
    offdiag_norm: float
    passed: bool
    non_physical: bool = False

    def to_json(self) -> dict:
        return {
            "pair": self.pair,
            "coefficient": self.coefficient,
            "expected": self.expected,
            "residual_norm": self.residual_norm,
            "offdiag_norm": self.offdiag_norm,
            "passed": self.passed,
            "non_physical": self.non_physical,
        }


def _fit_pair(label, ops_a, ops_b, expected, idx, tol, non_physical=False) -> CcrCoefficientReport:
    rank = len(idx)
    d = len(ops_a)
    diag = []
    for i in range(d):
        comm = ops_a[i] @ ops_b[i] - ops_b[i] @ ops_a[i]
        diag.append((-1j * comm)[np.ix_(idx, idx)])
    coeff = float(np.mean([blk.trace().real / rank for blk in diag]))
    residual = max(
        ladder.spectral_norm(blk - coeff * np.eye(rank)) for blk in diag
    )
    offdiag = 0.0
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            comm = ops_a[i] @ ops_b[j] - ops_b[j] @ ops_a[i]
            offdiag = max(offdiag, ladder.spectral_norm(comm[np.ix_(idx, idx)]))
    passed = abs(coeff - expected) <= tol and residual <= tol and offdiag <= tol
    return CcrCoefficientReport(
        pair=label,
        coefficient=coeff,
        expected=expected,
        residual_norm=residual,
        offdiag_norm=offdiag,
        passed=passed,
        non_physical=non_physical,
    )


def verify_ccr_composite(comp: CompositeRep, margin: int = 1, tol: float = 1e-12) -> list:
    """Fit the canonical-commutator coefficient for the standard operator pairs.

    Expected coefficients: (X_com, P) -> hbar, (X_naive, P) -> 2 hbar (the
    non-physicality witness), (R, Q) -> hbar, and zero for the cross pairs
    (R, P) and (Q, X_com).
    """
    if margin < 1:
        raise ValueError("margin must be at least 1 for commutator fits")
    hbar = comp.units.hbar
    idx = comp.interior_indices(margin)
    naive = naive_position_sum(comp)
    pairs = [
        ("x_com:p", comp.X, comp.P, hbar, False),
        ("x_naive:p", naive, comp.P, 2.0 * hbar, True),
        ("r:q", comp.R, comp.Q, hbar, False),
        ("r:p", comp.R, comp.P, 0.0, False),
        ("q:x_com", comp.Q, comp.X, 0.0, False),
    ]
    return [
        _fit_pair(label, a, b, expected, idx, tol, non_physical=flag)
        for label, a, b, expected, flag in pairs
    ]


def swap_operator(comp: CompositeRep) -> np.ndarray:
    """Exchange of the two tensor factors (requires equal factor dimensions)."""
    na, nb = comp.rep_a.dim, comp.rep_b.dim
    if na != nb:
        raise ValueError("swap needs identical factor dimensions")
    w = np.zeros((na * nb, na * nb), dtype=complex)
    for i in range(na):
        for j in range(nb):
            w[j * na + i, i * nb + j] = 1.0
    return w


def canonical_map_matrix(m_a, m_b) -> list:
    """Exact coefficient matrix of (x_a, x_b, p_a, p_b) -> (X_com, R, P, Q)."""
    ma, mb = Fraction(m_a), Fraction(m_b)
    m = ma + mb
    zero, one = Fraction(0), Fraction(1)
    return [
        [ma / m, mb / m, zero, zero],
        [one, -one, zero, zero],
        [zero, zero, one, one],
        [zero, zero, mb / m, -ma / m],
    ]


def canonical_map_is_symplectic(m_a, m_b) -> bool:
    """Exact check that the COM/relative change of basis preserves the canonical form."""
    s = canonical_map_matrix(m_a, m_b)
    zero, one = Fraction(0), Fraction(1)
    omega = [
        [zero, zero, one, zero],
        [zero, zero, zero, one],
        [-one, zero, zero, zero],
        [zero, -one, zero, zero],
    ]

    def matmul(a, b):
        return [
            [sum(a[i][k] * b[k][j] for k in range(4)) for j in range(4)]
            for i in range(4)
        ]

    st = [[s[j][i] for j in range(4)] for i in range(4)]
    return matmul(matmul(s, omega), st) == omega
