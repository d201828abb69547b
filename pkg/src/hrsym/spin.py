"""Rotation representations, the mass*spin tensor, and relative-motion spectra.

Angular momentum is handled throughout in antisymmetric-tensor components
(i, j) with i < j.  The fixed component mapping is

    S_12 = S_z,    S_23 = S_x,    S_13 = -S_y,

chosen so the spin blocks obey exactly the same structure constants as the
orbital components X_i P_j - P_i X_j (catalog sign [S12, S23] = -i hb S13).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse

from . import ladder

__all__ = [
    "CasimirSpectrum",
    "NonScalarCasimirError",
    "RelativeModeRep",
    "SpinCasimirValue",
    "SpinRep",
    "casimir_spin_value",
    "decompose_product_spins",
    "relative_mode_system",
    "relative_spin_spectrum",
    "spin_matrices",
    "t_tensor",
]

J_PAIRS = ((1, 2), (1, 3), (2, 3))


def _as_half_integer(s, what="spin") -> Fraction:
    frac = Fraction(s).limit_denominator(2)
    if frac != Fraction(s) or frac < 0 or (2 * frac).denominator != 1:
        raise ValueError(f"{what} must be a nonnegative half-integer, got {s!r}")
    return frac


class NonScalarCasimirError(ValueError):
    """The quadratic spin invariant is not scalar on the requested interior.

    Signals either a reducible representation (e.g. a two-particle product)
    or a truncation margin that is too small.
    """

    def __init__(self, fitted, deviation):
        self.fitted = fitted
        self.deviation = deviation
        super().__init__(
            f"spin Casimir is not scalar: fitted value {fitted:.6g}, deviation norm {deviation:.3g}"
        )


@dataclass
class SpinRep:
    """Intrinsic angular momentum matrices on a (2s+1)-dimensional space."""

    s: float
    components: dict
    hbar: float = 1.0

    @property
    def dim(self) -> int:
        return self.components[(1, 2)].shape[0]

    def casimir(self) -> np.ndarray:
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for m in self.components.values():
            acc += m @ m
        return acc


def spin_matrices(s, hbar: float = 1.0) -> SpinRep:
    """Standard |s, m> ladder construction packaged as tensor components.

    Basis order is m = s, s-1, ..., -s.  s = 0 gives three 1x1 zeros.
    """
    s_frac = _as_half_integer(s)
    d = int(2 * s_frac) + 1
    m_vals = float(s_frac) - np.arange(d)
    sz = hbar * np.diag(m_vals).astype(complex)
    raise_amp = [
        np.sqrt(float(s_frac * (s_frac + 1)) - m * (m + 1)) for m in m_vals[1:]
    ]
    sp = hbar * np.diag(raise_amp, 1).astype(complex)
    sm = sp.conj().T
    sx = (sp + sm) / 2.0
    sy = (sp - sm) / 2.0j
    return SpinRep(
        s=float(s_frac),
        components={(1, 2): sz, (2, 3): sx, (1, 3): -sy},
        hbar=hbar,
    )


def _rep_traits(rep):
    # Works for both single-particle and composite representations.
    if hasattr(rep, "config"):
        return rep.config.dims, rep.config.mass, rep.config.units.hbar
    return rep.dims, rep.total_mass, rep.units.hbar


def t_tensor(rep) -> dict:
    """The operator tensor M J_ij - (K_i P_j - P_i K_j) of a d = 3 representation.

    On an irreducible single-particle representation this equals mass times
    the spin block (identically zero for spinless ones, since the orbital
    parts cancel).  Composite representations are accepted; there the
    tensor is mass times the full intrinsic angular momentum.
    """
    dims, _, _ = _rep_traits(rep)
    if dims != 3:
        raise ValueError("the spin tensor needs a three-dimensional representation")
    out = {}
    for i, j in J_PAIRS:
        out[(i, j)] = rep.M @ rep.J[(i, j)] - (rep.K[i - 1] @ rep.P[j - 1] - rep.P[i - 1] @ rep.K[j - 1])
    return out


@dataclass
class SpinCasimirValue:
    value: float
    s: float
    deviation: float


def casimir_spin_value(rep, margin: int = 1, tol: float = 1e-8) -> SpinCasimirValue:
    """Fit the scalar of (1/(2 m^2)) T_ij T^ij on the interior and solve for s.

    Raises NonScalarCasimirError when the deviation from a multiple of the
    identity exceeds `tol` (reducible representation, or margin too small).
    """
    _, m, hbar = _rep_traits(rep)
    t = t_tensor(rep)
    c_op = sum(t[p] @ t[p] for p in J_PAIRS) / m**2
    idx = rep.interior_indices(margin)
    block = c_op[np.ix_(idx, idx)]
    fitted = float(np.trace(block).real / len(idx))
    deviation = ladder.spectral_norm(block - fitted * np.eye(len(idx)))
    if deviation > tol * max(1.0, abs(fitted)):
        raise NonScalarCasimirError(fitted, deviation)
    s_val = 0.5 * (-1.0 + np.sqrt(max(0.0, 1.0 + 4.0 * fitted / hbar**2)))
    return SpinCasimirValue(value=fitted, s=float(s_val), deviation=deviation)


# ---------------------------------------------------------------------------
# relative-motion spectra on a total-quanta-truncated oscillator basis
# ---------------------------------------------------------------------------

@dataclass
class SpectrumLine:
    value: float
    multiplicity: int
    ell: float | None


@dataclass
class ShellSpectrum:
    n: int
    entries: list


@dataclass
class CasimirSpectrum:
    """Eigenvalues of the quadratic spin invariant with ell-shell labels."""

    hbar: float
    dim: int
    shells: list = field(default_factory=list)
    unmatched: list = field(default_factory=list)

    @property
    def entries(self) -> list:
        out = []
        for shell in self.shells:
            out.extend(shell.entries)
        return out

    def multiplicity_total(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def ell_multisets(self) -> list:
        return [(shell.n, sorted(e.ell for e in shell.entries)) for shell in self.shells]

    def to_json(self) -> dict:
        return {
            "hbar": self.hbar,
            "dim": self.dim,
            "eigenvalues": [
                {"value": e.value, "multiplicity": e.multiplicity, "ell": e.ell}
                for e in self.entries
            ],
            "shells": [
                {
                    "n": s.n,
                    "entries": [
                        {"value": e.value, "multiplicity": e.multiplicity, "ell": e.ell}
                        for e in s.entries
                    ],
                }
                for s in self.shells
            ],
            "unmatched": list(self.unmatched),
        }


def _ell_label(lam: float, hbar: float, rtol: float = 1e-8):
    # Invert lam = ell (ell + 1) hbar^2 and snap to the nearest half-integer.
    x = 0.5 * (-1.0 + np.sqrt(max(0.0, 1.0 + 4.0 * lam / hbar**2)))
    ell = round(2.0 * x) / 2.0
    ok = abs(lam - ell * (ell + 1) * hbar**2) <= rtol * max(1.0, abs(lam))
    return ell, ok


def _relative_orbital_components(n_max: int, hbar: float, headroom: int = 1):
    """Exact R_i Q_j - Q_i R_j restricted to total quanta <= n_max.

    Matrix elements are computed on a larger per-dimension cube so that no
    intermediate product is clipped; the restriction is then exact and the
    components conserve total quanta, keeping the ell shells clean.
    """
    levels = n_max + 1 + headroom
    dims = (levels,) * 3
    r = [ladder.embed(ladder.position(levels, 1.0, 1.0, hbar), k, dims) for k in range(3)]
    q = [ladder.embed(ladder.momentum(levels, 1.0, 1.0, hbar), k, dims) for k in range(3)]
    keep, basis = ladder.total_quanta_restriction(levels, n_max)
    comps = {}
    for i, j in J_PAIRS:
        full = r[i - 1] @ q[j - 1] - q[i - 1] @ r[j - 1]
        comps[(i, j)] = full[np.ix_(keep, keep)]
    return comps, basis


def relative_spin_spectrum(n_max: int, s_a=0, s_b=0, hbar: float = 1.0) -> CasimirSpectrum:
    """Diagonalize the composite intrinsic angular momentum invariant.

    Builds the relative-motion orbital components on a single 3-D oscillator
    basis with total quanta <= n_max, adds the two spin blocks, and labels
    each shell eigenvalue by ell from ell (ell + 1) hbar^2.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    comps, basis = _relative_orbital_components(n_max, hbar)
    spin_a = spin_matrices(s_a, hbar)
    spin_b = spin_matrices(s_b, hbar)
    da, db = spin_a.dim, spin_b.dim
    n_osc = len(basis)
    total = {}
    for p in J_PAIRS:
        total[p] = (
            np.kron(comps[p], np.eye(da * db))
            + np.kron(np.eye(n_osc), np.kron(spin_a.components[p], np.eye(db)))
            + np.kron(np.eye(n_osc), np.kron(np.eye(da), spin_b.components[p]))
        )
    casimir = sum(total[p] @ total[p] for p in J_PAIRS)

    spectrum = CasimirSpectrum(hbar=hbar, dim=n_osc * da * db)
    spin_block = da * db
    osc_offset = 0
    for n in range(n_max + 1):
        shell_osc = sum(1 for t in basis if sum(t) == n)
        sl = slice(osc_offset * spin_block, (osc_offset + shell_osc) * spin_block)
        osc_offset += shell_osc
        block = casimir[sl, sl]
        vals = np.linalg.eigvalsh(block)
        groups: dict = {}
        for lam in vals:
            ell, ok = _ell_label(float(lam), hbar)
            if not ok:
                spectrum.unmatched.append(float(lam))
                continue
            bucket = groups.setdefault(ell, [])
            bucket.append(float(lam))
        entries = [
            SpectrumLine(value=float(np.mean(v)), multiplicity=len(v), ell=ell)
            for ell, v in sorted(groups.items())
        ]
        spectrum.shells.append(ShellSpectrum(n=n, entries=entries))
    return spectrum


def decompose_product_spins(s_a, s_b) -> list:
    """Total-spin content of a product of two irreducible spins.

    Returns [(s, 1)] for s = |s_a - s_b|, ..., s_a + s_b in unit steps; the
    dimensions satisfy sum(2s + 1) = (2s_a + 1)(2s_b + 1).
    """
    fa, fb = _as_half_integer(s_a, "s_a"), _as_half_integer(s_b, "s_b")
    lo, hi = abs(fa - fb), fa + fb
    out = []
    s = lo
    while s <= hi:
        out.append((float(s), 1))
        s += 1
    assert sum(int(2 * s) + 1 for s, _ in out) == (int(2 * fa) + 1) * (int(2 * fb) + 1)
    return out


# ---------------------------------------------------------------------------
# relative-mode system for dynamics
# ---------------------------------------------------------------------------

def _sparse_embed(op: np.ndarray, slot: int, factor_dims) -> scipy.sparse.csr_matrix:
    # cube ladder operators are two-diagonal, so build products sparsely
    out = scipy.sparse.identity(1, format="csr", dtype=complex)
    for k, d in enumerate(factor_dims):
        blk = scipy.sparse.csr_matrix(op) if k == slot else scipy.sparse.identity(d, dtype=complex)
        out = scipy.sparse.kron(out, blk, format="csr")
    return out


class RelativeModeRep:
    """Relative motion of a two-particle system on a total-quanta basis.

    The center of mass factors out, so the physical Hamiltonian acts here as
    Q.Q / (2 mu) + V(R.R).  All restricted matrices have exact elements
    (computed with per-dimension headroom), hence total quanta, the orbital
    shells, and the spin invariant are conserved to rounding.
    """

    dims = 3

    def __init__(self, n_max: int, mu: float, units, s_a=0, s_b=0, max_power: int = 2):
        if mu <= 0:
            raise ValueError("reduced mass must be positive")
        self.n_max = int(n_max)
        self.mu = float(mu)
        self.units = units
        self.max_power = int(max_power)
        hbar, omega = units.hbar, units.omega_ref

        headroom = 2 * self.max_power
        levels = self.n_max + 1 + headroom
        dims3 = (levels,) * 3
        r = [_sparse_embed(ladder.position(levels, self.mu, omega, hbar), k, dims3) for k in range(3)]
        q = [_sparse_embed(ladder.momentum(levels, self.mu, omega, hbar), k, dims3) for k in range(3)]
        keep, self.basis = ladder.total_quanta_restriction(levels, self.n_max)

        spin_a = spin_matrices(s_a, hbar)
        spin_b = spin_matrices(s_b, hbar)
        self.spin_a, self.spin_b = spin_a, spin_b
        spin_block = spin_a.dim * spin_b.dim
        self.spin_dim = spin_block
        n_osc = len(keep)
        self.dim = n_osc * spin_block

        def lift(op):
            block = op.tocsr()[keep][:, keep].toarray()
            return np.kron(block, np.eye(spin_block))

        qq = sum(m @ m for m in q)
        rr = sum(m @ m for m in r)
        self.kinetic = lift(qq) / (2.0 * self.mu)
        self.radial = {0: np.eye(self.dim, dtype=complex)}
        power = scipy.sparse.identity(rr.shape[0], format="csr", dtype=complex)
        for k in range(1, self.max_power + 1):
            power = power @ rr
            self.radial[k] = lift(power)

        self.R = [lift(m) for m in r]
        self.Q = [lift(m) for m in q]
        self.L = {}
        self.S = {}
        for i, j in J_PAIRS:
            orbital = r[i - 1] @ q[j - 1] - q[i - 1] @ r[j - 1]
            self.L[(i, j)] = lift(orbital)
            self.S[(i, j)] = (
                self.L[(i, j)]
                + np.kron(np.eye(n_osc), np.kron(spin_a.components[(i, j)], np.eye(spin_b.dim)))
                + np.kron(np.eye(n_osc), np.kron(np.eye(spin_a.dim), spin_b.components[(i, j)]))
            )
        self.J = self.S
        self.spin_casimir = sum(self.S[p] @ self.S[p] for p in J_PAIRS)

    def interior_indices(self, margin: int = 1) -> np.ndarray:
        if not 0 <= margin <= self.n_max:
            raise ValueError(f"margin must lie in [0, {self.n_max}]")
        keep = [k for k, t in enumerate(self.basis) if sum(t) <= self.n_max - margin]
        idx = np.array(keep, dtype=int)
        return (idx[:, None] * self.spin_dim + np.arange(self.spin_dim)[None, :]).ravel()

    def boundary_weight(self, state: np.ndarray) -> float:
        """Probability carried by the outermost shell (total quanta = n_max)."""
        interior = self.interior_indices(margin=1) if self.n_max > 0 else np.array([], dtype=int)
        inside = float(np.vdot(state[interior], state[interior]).real) if interior.size else 0.0
        return max(0.0, float(np.vdot(state, state).real) - inside)

    def ground_state(self) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=complex)
        vec[0] = 1.0
        return vec

    def relative_ladder(self) -> list:
        """Lowering operators of the three relative modes."""
        hbar, omega = self.units.hbar, self.units.omega_ref
        out = []
        for i in range(3):
            out.append(
                np.sqrt(self.mu * omega / (2.0 * hbar)) * self.R[i]
                + 1j / np.sqrt(2.0 * hbar * self.mu * omega) * self.Q[i]
            )
        return out


def relative_mode_system(n_max: int, mu: float, units, s_a=0, s_b=0, max_power: int = 2) -> RelativeModeRep:
    return RelativeModeRep(n_max, mu, units, s_a=s_a, s_b=s_b, max_power=max_power)
