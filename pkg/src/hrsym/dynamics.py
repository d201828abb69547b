"""Hamiltonian flows on representation spaces.

Any Hermitian matrix generates a one-parameter unitary group here, so the
same engine drives physical time evolution, the free-generator flow with its
constant offset, rotations (generator J), and boosts (generator K).  Dense
propagation uses the scaling-and-squaring exponential; the Krylov path uses
scipy's expm_multiply stepping for larger sparse systems.  Both are
deterministic.

Truncation makes long flows untrustworthy once amplitude reaches the top
Fock levels, so every flow records the boundary occupation of the evolving
state and flags the result unreliable above a configurable threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from . import ladder
from .composite import CompositeRep
from .particle import ParticleRep
from .report import VerificationReport
from .spin import RelativeModeRep

__all__ = [
    "FlowComparison",
    "FlowResult",
    "PotentialSpec",
    "compare_flows",
    "ehrenfest_check",
    "evolve_observable",
    "evolve_state",
    "extra_casimir_check",
    "hamiltonian_galilei",
    "hamiltonian_physical",
]

_POT_KINDS = ("none", "poly_x", "poly_r2")
_MAX_POLY_DEGREE = 4
_DENSE_LIMIT = 4096


@dataclass(frozen=True)
class PotentialSpec:
    """Polynomial potential: coefficients[k] multiplies argument**k.

    kind "poly_x" takes the coordinate operators of a single particle
    (applied per dimension and summed, so [0, 0, 0.5] is the isotropic
    harmonic well).  kind "poly_r2" takes the squared relative separation
    R.R of a composite.  calV is the constant offset carried by the
    free-generator Hamiltonian.
    """

    kind: str = "none"
    coefficients: tuple = ()
    calV: float = 0.0

    def __post_init__(self):
        if self.kind not in _POT_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r} (one of {_POT_KINDS})")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if len(self.coefficients) > _MAX_POLY_DEGREE + 1:
            raise ValueError(f"polynomial degree capped at {_MAX_POLY_DEGREE}")
        if self.kind == "none" and any(self.coefficients):
            raise ValueError("kind 'none' cannot carry coefficients")

    @property
    def is_trivial(self) -> bool:
        return not any(self.coefficients)


def _poly_in(op_powers_base: np.ndarray, coefficients) -> np.ndarray:
    dim = op_powers_base.shape[0]
    acc = np.zeros((dim, dim), dtype=complex)
    power = np.eye(dim, dtype=complex)
    for k, c in enumerate(coefficients):
        if k > 0:
            power = power @ op_powers_base
        if c:
            acc = acc + c * power
    return acc


def hamiltonian_physical(system, pot: PotentialSpec) -> np.ndarray:
    """Kinetic term plus the matching potential for the given system.

    Single particle: P.P / 2m + V(X) per dimension.  Composite: the COM and
    relative kinetic terms P.P / 2m + Q.Q / 2mu plus V(R.R); the interaction
    must depend on the relative separation only, so kind "poly_x" is
    rejected there.  A RelativeModeRep drops the (decoupled, free) COM term.
    """
    if isinstance(system, ParticleRep):
        if pot.kind == "poly_r2":
            raise ValueError("a single particle has no relative separation; use kind 'poly_x'")
        m = system.config.mass
        h = sum(p @ p for p in system.P) / (2.0 * m)
        if pot.kind == "poly_x" and pot.coefficients:
            dim = system.dim
            const = pot.coefficients[0]
            v = const * np.eye(dim, dtype=complex)
            per_axis = (0.0,) + pot.coefficients[1:]
            for x in system.X:
                v = v + _poly_in(x, per_axis)
            h = h + v
        return h
    if isinstance(system, CompositeRep):
        if pot.kind == "poly_x":
            raise ValueError("a composite interaction must depend on the relative separation only")
        h = sum(p @ p for p in system.P) / (2.0 * system.total_mass)
        h = h + sum(q @ q for q in system.Q) / (2.0 * system.reduced_mass)
        if pot.kind == "poly_r2" and pot.coefficients:
            rr = sum(r @ r for r in system.R)
            h = h + _poly_in(rr, pot.coefficients)
        return h
    if isinstance(system, RelativeModeRep):
        if pot.kind == "poly_x":
            raise ValueError("a composite interaction must depend on the relative separation only")
        h = system.kinetic.copy()
        for k, c in enumerate(pot.coefficients):
            if not c:
                continue
            if k > system.max_power:
                raise ValueError(
                    f"relative-mode system was built with max_power={system.max_power}, "
                    f"cannot take (R.R)^{k}"
                )
            h = h + c * system.radial[k]
        return h
    raise TypeError(f"unsupported system type {type(system).__name__}")


def hamiltonian_galilei(rep: ParticleRep, calV: float) -> np.ndarray:
    """P.P / 2m + calV * Id, the free-generator Hamiltonian of a single particle."""
    if not isinstance(rep, ParticleRep):
        raise TypeError("the free-generator Hamiltonian is defined for a single particle")
    m = rep.config.mass
    return sum(p @ p for p in rep.P) / (2.0 * m) + calV * np.eye(rep.dim, dtype=complex)


# ---------------------------------------------------------------------------
# flows
# ---------------------------------------------------------------------------

@dataclass
class FlowResult:
    times: np.ndarray
    states: np.ndarray
    norm_trace: np.ndarray
    energy_trace: np.ndarray
    observable_traces: dict = field(default_factory=dict)
    max_boundary_weight: float = 0.0
    reliable: bool = True

    def to_json(self, include_states: bool = False) -> dict:
        out = {
            "times": self.times.tolist(),
            "norm_trace": self.norm_trace.tolist(),
            "energy_trace": self.energy_trace.tolist(),
            "observable_traces": {k: v.tolist() for k, v in self.observable_traces.items()},
            "max_boundary_weight": self.max_boundary_weight,
            "reliable": self.reliable,
        }
        if include_states:
            out["states"] = [[[z.real, z.imag] for z in row] for row in self.states]
        return out


def _check_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or len(t) < 1:
        raise ValueError("need a one-dimensional, nonempty time grid")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def _check_hermitian(h, what="H"):
    if scipy.sparse.issparse(h):
        err = abs(h - h.conj().T).max()
        scale = abs(h).max()
    else:
        err = float(np.max(np.abs(h - h.conj().T)))
        scale = float(np.max(np.abs(h))) if h.size else 0.0
    if err > 1e-12 * max(1.0, scale):
        raise ValueError(f"{what} is not Hermitian (max deviation {err:.3g})")


def _expectation(op, psi) -> float:
    return float(np.vdot(psi, op @ psi).real)


def evolve_state(
    H,
    psi0,
    times,
    method: str = "auto",
    hbar: float = 1.0,
    observables: dict | None = None,
    boundary_weight=None,
    leakage_threshold: float = 1e-6,
) -> FlowResult:
    """Propagate psi0 along exp(-i t H / hbar) over the time grid.

    `boundary_weight` is an optional callable(state) -> probability near the
    truncation boundary; if the worst value along the flow exceeds
    `leakage_threshold` the result is flagged unreliable.
    """
    t = _check_times(times)
    _check_hermitian(H)
    psi0 = np.asarray(psi0, dtype=complex).ravel()
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"initial state must be normalized (|psi| = {nrm:.12g})")

    dim = H.shape[0]
    if method == "auto":
        method = "dense" if dim <= _DENSE_LIMIT else "krylov"
    if method not in ("dense", "krylov"):
        raise ValueError(f"unknown method {method!r}")

    states = np.empty((len(t), dim), dtype=complex)
    if method == "dense":
        hd = H.toarray() if scipy.sparse.issparse(H) else np.asarray(H)
        prop_cache: dict = {}
        psi = psi0
        prev = None
        for k, tk in enumerate(t):
            dt = tk if prev is None else tk - prev
            if dt != 0.0:
                key = round(float(dt), 15)
                if key not in prop_cache:
                    prop_cache[key] = scipy.linalg.expm(-1j * dt * hd / hbar)
                psi = prop_cache[key] @ psi
            prev = tk
            states[k] = psi
    else:
        hs = H if scipy.sparse.issparse(H) else scipy.sparse.csr_matrix(H)
        psi = psi0
        prev = None
        for k, tk in enumerate(t):
            dt = tk if prev is None else tk - prev
            if dt != 0.0:
                psi = scipy.sparse.linalg.expm_multiply(-1j * dt * hs / hbar, psi)
            prev = tk
            states[k] = psi

    norm_trace = np.linalg.norm(states, axis=1)
    energy_trace = np.array([_expectation(H, s) for s in states])
    obs_traces = {}
    for name, op in (observables or {}).items():
        obs_traces[name] = np.array([_expectation(op, s) for s in states])

    max_bw = 0.0
    reliable = True
    if boundary_weight is not None:
        max_bw = max(float(boundary_weight(s)) for s in states)
        reliable = max_bw <= leakage_threshold
    return FlowResult(
        times=t,
        states=states,
        norm_trace=norm_trace,
        energy_trace=energy_trace,
        observable_traces=obs_traces,
        max_boundary_weight=max_bw,
        reliable=reliable,
    )


def evolve_observable(H, A, t: float, hbar: float = 1.0) -> np.ndarray:
    """Heisenberg-picture conjugation exp(+i t H / hbar) A exp(-i t H / hbar)."""
    _check_hermitian(H)
    hd = H.toarray() if scipy.sparse.issparse(H) else np.asarray(H)
    u = scipy.linalg.expm(1j * t * hd / hbar)
    out = u @ A @ u.conj().T
    herm_err = float(np.max(np.abs(out - out.conj().T)))
    if herm_err > 1e-12 * max(1.0, float(np.max(np.abs(out)))):
        raise ValueError(f"conjugation lost Hermiticity (deviation {herm_err:.3g})")
    return out


@dataclass
class FlowComparison:
    times: np.ndarray
    fidelity: np.ndarray
    phase: np.ndarray


def compare_flows(H1, H2, psi0, times, method: str = "auto", hbar: float = 1.0) -> FlowComparison:
    """Overlap traces between the two flows from a common initial state.

    fidelity[k] = |<psi_2(t_k)|psi_1(t_k)>|; phase[k] is the phase of flow 1
    relative to flow 2, i.e. arg <psi_2(t_k)|psi_1(t_k)>, so a constant
    generator offset calV reports phase -calV t / hbar.
    """
    if H1.shape != H2.shape:
        raise ValueError("flow comparison needs operators on the same space")
    f1 = evolve_state(H1, psi0, times, method=method, hbar=hbar)
    f2 = evolve_state(H2, psi0, times, method=method, hbar=hbar)
    overlaps = np.array([np.vdot(s2, s1) for s1, s2 in zip(f1.states, f2.states)])
    return FlowComparison(times=f1.times, fidelity=np.abs(overlaps), phase=np.angle(overlaps))


@dataclass
class EhrenfestResult:
    max_residual: float
    times: np.ndarray
    x_traces: np.ndarray
    p_traces: np.ndarray
    reliable: bool


def _system_xpm(system):
    if isinstance(system, ParticleRep):
        return system.X, system.P, system.config.mass, system.boundary_weight
    if isinstance(system, CompositeRep):
        return system.X, system.P, system.total_mass, system.boundary_weight
    raise TypeError("Ehrenfest traces need a single-particle or composite system")


def ehrenfest_check(system, H, psi0, times, method: str = "auto") -> EhrenfestResult:
    """Residual of d<X>/dt - <P>/m from centered differences on the grid.

    The state must stay clear of the truncation boundary; otherwise the
    result is flagged unreliable.
    """
    x_ops, p_ops, mass, weight_fn = _system_xpm(system)
    t = _check_times(times)
    if len(t) < 3:
        raise ValueError("need at least three grid points for centered differences")
    steps = np.diff(t)
    if np.max(steps) - np.min(steps) > 1e-12 * np.max(steps):
        raise ValueError("centered differences need a uniform time grid")
    hbar = _units_hbar(system)
    obs = {f"x{i}": op for i, op in enumerate(x_ops)}
    obs.update({f"p{i}": op for i, op in enumerate(p_ops)})
    flow = evolve_state(
        H, psi0, t, method=method, hbar=hbar, observables=obs, boundary_weight=weight_fn
    )
    dt = steps[0]
    worst = 0.0
    x_traces = np.array([flow.observable_traces[f"x{i}"] for i in range(len(x_ops))])
    p_traces = np.array([flow.observable_traces[f"p{i}"] for i in range(len(p_ops))])
    for i in range(len(x_ops)):
        dxdt = (x_traces[i, 2:] - x_traces[i, :-2]) / (2.0 * dt)
        worst = max(worst, float(np.max(np.abs(dxdt - p_traces[i, 1:-1] / mass))))
    return EhrenfestResult(
        max_residual=worst,
        times=t,
        x_traces=x_traces,
        p_traces=p_traces,
        reliable=flow.reliable,
    )


def _units_hbar(system) -> float:
    if isinstance(system, (ParticleRep,)):
        return system.config.units.hbar
    return system.units.hbar


def extra_casimir_check(
    rep: ParticleRep,
    calV: float,
    margin: int = 1,
    tol: float = 1e-10,
    hamiltonian=None,
) -> VerificationReport:
    """Check that 2 M H - P.P is the scalar 2 m calV on the interior.

    With the free-generator Hamiltonian the combination is a multiple of the
    identity whose value fixes calV.  Passing a different `hamiltonian`
    (e.g. one with a potential) demonstrates the failure: the combination
    stops being scalar, so that operator represents no element of the
    algebra.
    """
    h = hamiltonian if hamiltonian is not None else hamiltonian_galilei(rep, calV)
    g = 2.0 * rep.M @ h - sum(p @ p for p in rep.P)
    idx = rep.interior_indices(margin)
    block = g[np.ix_(idx, idx)]
    fitted = float(np.trace(block).real / len(idx))
    deviation = ladder.spectral_norm(block - fitted * np.eye(len(idx)))
    expected = 2.0 * rep.config.mass * calV
    value_err = abs(fitted - expected)
    report = VerificationReport(f"extra_casimir[m={rep.config.mass}, calV={calV}]")
    report.add(
        "scalar_on_interior",
        deviation <= tol,
        metrics={"deviation_norm": deviation, "tol": tol, "margin": margin},
        detail="" if deviation <= tol else "2MH - P.P is not a multiple of the identity",
    )
    report.add(
        "value_fixes_calV",
        deviation <= tol and value_err <= max(tol, tol * abs(expected)),
        metrics={
            "fitted_scalar": fitted,
            "expected_scalar": expected,
            "implied_calV": fitted / (2.0 * rep.config.mass),
        },
    )
    return report
