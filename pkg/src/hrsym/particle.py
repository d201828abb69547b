"""Single-particle operator representations on truncated Fock bases.

Each spatial dimension carries N oscillator levels at a reference frequency
omega_ref, so X and P are the exact ladder combinations

    X = sqrt(hbar / (2 m omega_ref)) (a + a+),
    P = i sqrt(hbar m omega_ref / 2) (a+ - a),

and the boost/translation/rotation operators follow as K_i = m X_i,
M = m * Id, J_ij = X_i P_j - P_i X_j (plus a spin block for d = 3).

Truncation puts the canonical-commutator defect entirely at the top level:
[X, P] = i hbar (Id - N |N-1><N-1|) per dimension.  Every numerical bracket
check is therefore projected onto an interior of the basis whose margin
covers the polynomial degree of the identity under test.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import ladder
from .algebra import LieAlgebra, build_algebra
from .report import VerificationReport
from .spin import J_PAIRS, SpinRep, spin_matrices

__all__ = [
    "GlobalUnits",
    "InteriorProjector",
    "ParticleRep",
    "RepConfig",
    "ZetaRep",
    "build_particle_rep",
    "build_zeta_rep",
    "interior_projector",
    "rep_config_from_json",
    "verify_homomorphism",
]


@dataclass(frozen=True)
class GlobalUnits:
    hbar: float = 1.0
    omega_ref: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0 or self.omega_ref <= 0:
            raise ValueError("hbar and omega_ref must be positive")


@dataclass(frozen=True)
class RepConfig:
    mass: float
    dims: int = 1
    levels: int = 8
    spin: float = 0.0
    units: GlobalUnits = field(default_factory=GlobalUnits)

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError(
                "mass must be positive: a vanishing central charge collapses the canonical commutator"
            )
        if self.dims not in (1, 2, 3):
            raise ValueError(f"dims must be 1, 2, or 3, got {self.dims}")
        if self.levels < 2:
            raise ValueError("need at least two Fock levels per dimension")
        spin = Fraction(self.spin).limit_denominator(2)
        if spin != Fraction(self.spin) or spin < 0 or (2 * spin).denominator != 1:
            raise ValueError(f"spin must be a nonnegative half-integer, got {self.spin}")
        if spin > 0 and self.dims != 3:
            raise ValueError("spin blocks are only defined for dims = 3")

    @property
    def spin_multiplicity(self) -> int:
        return int(round(2 * self.spin)) + 1

    @property
    def space_dim(self) -> int:
        return self.levels**self.dims

    @property
    def dim(self) -> int:
        return self.space_dim * self.spin_multiplicity


def rep_config_from_json(payload: dict) -> RepConfig:
    units = GlobalUnits(
        hbar=float(payload.get("hbar", 1.0)),
        omega_ref=float(payload.get("omega_ref", 1.0)),
    )
    return RepConfig(
        mass=float(payload["mass"]),
        dims=int(payload.get("dims", 1)),
        levels=int(payload.get("levels", 8)),
        spin=float(payload.get("spin", 0.0)),
        units=units,
    )


@dataclass
class InteriorProjector:
    """Orthogonal projector onto Fock states clear of the truncation boundary."""

    margin: int
    indices: np.ndarray
    matrix: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.indices)


class ParticleRep:
    """Concrete matrices for one particle; built by build_particle_rep."""

    def __init__(self, config: RepConfig):
        self.config = config
        n, d = config.levels, config.dims
        units = config.units
        m = config.mass
        factor_dims = (n,) * d

        x1 = ladder.position(n, m, units.omega_ref, units.hbar)
        p1 = ladder.momentum(n, m, units.omega_ref, units.hbar)
        x_ops = [ladder.embed(x1, k, factor_dims) for k in range(d)]
        p_ops = [ladder.embed(p1, k, factor_dims) for k in range(d)]

        j_ops = {}
        for i, j in J_PAIRS:
            if i <= d and j <= d:
                j_ops[(i, j)] = x_ops[i - 1] @ p_ops[j - 1] - p_ops[i - 1] @ x_ops[j - 1]

        self.spin_rep: SpinRep | None = None
        if config.spin > 0:
            self.spin_rep = spin_matrices(config.spin, units.hbar)
            s_dim = self.spin_rep.dim
            eye_s = np.eye(s_dim, dtype=complex)
            x_ops = [np.kron(op, eye_s) for op in x_ops]
            p_ops = [np.kron(op, eye_s) for op in p_ops]
            eye_space = np.eye(config.space_dim, dtype=complex)
            j_ops = {
                pair: np.kron(op, eye_s) + np.kron(eye_space, self.spin_rep.components[pair])
                for pair, op in j_ops.items()
            }

        self.X = x_ops
        self.P = p_ops
        self.K = [m * op for op in x_ops]
        self.J = j_ops
        self.M = m * np.eye(config.dim, dtype=complex)
        self.dim = config.dim

    @property
    def dims(self) -> int:
        return self.config.dims

    def interior_indices(self, margin: int) -> np.ndarray:
        return ladder.interior_indices(
            self.config.levels, self.config.dims, margin, tail_dim=self.config.spin_multiplicity
        )

    def interior_projector(self, margin: int) -> InteriorProjector:
        idx = self.interior_indices(margin)
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        mat[idx, idx] = 1.0
        return InteriorProjector(margin=margin, indices=idx, matrix=mat)

    def boundary_weight(self, state: np.ndarray) -> float:
        """Probability of finding any dimension at the top Fock level."""
        idx = self.interior_indices(1)
        inside = float(np.vdot(state[idx], state[idx]).real)
        return max(0.0, float(np.vdot(state, state).real) - inside)

    def generator_matrix(self, name: str) -> np.ndarray:
        """Matrix realizing a generator by catalog name (K1, P2, J12, M, ...)."""
        if name == "M":
            return self.M
        if name == "I":
            return np.eye(self.dim, dtype=complex)
        if name.startswith("J") and len(name) == 3:
            pair = (int(name[1]), int(name[2]))
            if pair in self.J:
                return self.J[pair]
            raise KeyError(f"{name} is not realized at dims = {self.config.dims}")
        kind, digits = name[0], name[1:]
        if kind not in ("K", "P", "X") or not digits.isdigit():
            raise KeyError(name)
        axis = int(digits)
        if not 1 <= axis <= self.config.dims:
            raise KeyError(f"{name} is not realized at dims = {self.config.dims}")
        return {"K": self.K, "P": self.P, "X": self.X}[kind][axis - 1]

    def realized_generators(self, alg: LieAlgebra) -> dict:
        out = {}
        for gen in alg.generators:
            try:
                out[gen.name] = self.generator_matrix(gen.name)
            except KeyError:
                continue
        return out

    def export_matrices(self, path, fmt: str = "npz"):
        """Dump the generator matrices for debugging (binary npz or JSON arrays)."""
        path = Path(path)
        named = {"M": self.M}
        for i, (x, p, k) in enumerate(zip(self.X, self.P, self.K), start=1):
            named[f"X{i}"] = x
            named[f"P{i}"] = p
            named[f"K{i}"] = k
        for (i, j), op in self.J.items():
            named[f"J{i}{j}"] = op
        if fmt == "npz":
            np.savez(path, **named)
        elif fmt == "json":
            payload = {
                name: {"re": op.real.tolist(), "im": op.imag.tolist()} for name, op in named.items()
            }
            path.write_text(json.dumps(payload))
        else:
            raise ValueError(f"unknown export format {fmt!r}")
        return path


def build_particle_rep(config: RepConfig) -> ParticleRep:
    return ParticleRep(config)


def interior_projector(rep: ParticleRep, margin: int) -> InteriorProjector:
    return rep.interior_projector(margin)


@dataclass
class ZetaRep:
    """Scaled canonical pair with central charge zeta times the identity.

    For zeta < 0 the scaling sqrt(|zeta|) goes on both X and P while the
    sign rides on X, so [X_z, P_z] = i hbar zeta Id on the interior.
    """

    zeta: float
    X: list
    P: list
    I: np.ndarray
    config: RepConfig


def build_zeta_rep(zeta: float, config: RepConfig) -> ZetaRep:
    if zeta == 0:
        raise ValueError("zeta must be nonzero: zero collapses the family to the commutative limit")
    base = build_particle_rep(config)
    root = np.sqrt(abs(zeta))
    sign = 1.0 if zeta > 0 else -1.0
    return ZetaRep(
        zeta=float(zeta),
        X=[sign * root * op for op in base.X],
        P=[root * op for op in base.P],
        I=zeta * np.eye(config.dim, dtype=complex),
        config=config,
    )


_DEGREE = {"J": 2, "K": 1, "P": 1, "X": 1, "M": 0, "I": 0, "H": 2}


def verify_homomorphism(rep: ParticleRep, alg, margin: int | None = None, tol: float = 1e-10) -> VerificationReport:
    """Check every realized bracket of `alg` against the matrix commutators.

    For each generator pair the defect || P ([Ga, Gb] - i hbar sum f Gc) P ||
    (spectral norm, P the interior projector) must stay below `tol`.  When
    `margin` is None each pair uses the total polynomial degree of its
    identity; an explicit margin applies to all pairs.
    """
    alg = build_algebra(alg)
    hbar = rep.config.units.hbar
    realized = rep.realized_generators(alg)
    report = VerificationReport(f"homomorphism[{alg.name} on dims={rep.config.dims}, N={rep.config.levels}]")
    names = [g.name for g in alg.generators if g.name in realized]
    for ia, na in enumerate(names):
        for nb in names[ia + 1:]:
            targets = alg.constants.terms(alg.index(na), alg.index(nb))
            target_names = [alg.generators[k].name for k, _ in targets]
            if any(t not in realized for t in target_names):
                continue
            ga, gb = realized[na], realized[nb]
            expected = np.zeros_like(ga)
            for (k, f), tname in zip(targets, target_names):
                expected = expected + float(f) * realized[tname]
            defect = ga @ gb - gb @ ga - 1j * hbar * expected
            pair_margin = margin if margin is not None else min(
                _DEGREE[na[0]] + _DEGREE[nb[0]], rep.config.levels - 1
            )
            idx = rep.interior_indices(pair_margin)
            norm = ladder.spectral_norm(defect[np.ix_(idx, idx)])
            report.add(
                f"[{na},{nb}]",
                norm <= tol,
                metrics={"defect_norm": norm, "margin": pair_margin, "tol": tol},
            )
    return report
