"""Lie algebras defined by exact structure constants.

Bracket tables store [G_a, G_b] = i*hbar * sum_c f^c_ab G_c with every f an
exact Fraction.  The unit i*hbar is carried implicitly so this module works
entirely in rational arithmetic; hbar is reattached only when an algebra is
realized by matrices (see particle.py).

Catalog ids:

    h3_naive   X1..X3, P1..P3, I   with [X_i, P_j] = delta_ij I
    h3         K1..K3, P1..P3, M   with [K_i, P_j] = delta_ij M
    so3        J12, J13, J23       (antisymmetric-tensor components)
    hr3        so3 acting on h3: ten generators J, K, P, M
    g3tilde    hr3 plus H          with [K_i, H] = P_i

Rotation components are stored for i < j with J_ji = -J_ij, and the J-J
block is generated literally from the tensor-component bracket

    [J_ij, J_hk] = d_jk J_ih + d_ih J_jk - d_ik J_jh - d_jh J_ik

which fixes the sign convention [J12, J23] = -J13 (and, cyclically,
[J12, J13] = +J23, [J13, J23] = +J12).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

from .rationals import QC, as_qc
from .report import VerificationReport

__all__ = [
    "AlgebraError",
    "AlgebraElement",
    "CATALOG_IDS",
    "GeneratorId",
    "LieAlgebra",
    "StructureConstants",
    "bracket",
    "build_algebra",
    "check_jacobi",
    "subalgebra_check",
]

CATALOG_IDS = ("h3_naive", "h3", "so3", "hr3", "g3tilde")

_J_PAIRS = ((1, 2), (1, 3), (2, 3))


class AlgebraError(ValueError):
    """Bad catalog id, malformed descriptor, or unsupported element."""


@dataclass(frozen=True)
class GeneratorId:
    name: str
    index: int


class StructureConstants:
    """Sparse table (i, j) -> ((k, f), ...) encoding [G_i, G_j] = i*hbar sum f G_k.

    Normally only one orientation of each pair is stored and the mirror is
    derived by antisymmetry.  Both orientations may be stored explicitly
    (e.g. to model a corrupted table); antisymmetry_violations() reports
    any mismatch.
    """

    def __init__(self, table):
        cleaned = {}
        for (i, j), terms in table.items():
            entries = tuple(sorted((int(k), Fraction(f)) for k, f in terms if Fraction(f)))
            if entries:
                cleaned[(int(i), int(j))] = entries
        self._table = cleaned

    def terms(self, i: int, j: int) -> tuple:
        """Terms of [G_i, G_j]; a stored orientation wins, the mirror is negated."""
        direct = self._table.get((i, j))
        if direct is not None:
            return direct
        swapped = self._table.get((j, i))
        if swapped is not None:
            return tuple((k, -f) for k, f in swapped)
        return ()

    def stored_items(self):
        return self._table.items()

    def antisymmetry_violations(self) -> list:
        bad = []
        for (i, j), terms in self._table.items():
            if i == j:
                bad.append((i, j))
            elif (j, i) in self._table and i < j:
                mirror = tuple(sorted((k, -f) for k, f in self._table[(j, i)]))
                if mirror != terms:
                    bad.append((i, j))
        return bad

    def __eq__(self, other):
        if not isinstance(other, StructureConstants):
            return NotImplemented
        return self._table == other._table


class AlgebraElement:
    """Finitely supported combination of generators with exact QC coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        data = {}
        for name, c in (coeffs or {}).items():
            c = as_qc(c)
            if c:
                data[name] = c
        self.coeffs = data

    def items(self):
        return self.coeffs.items()

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for name, c in other.coeffs.items():
            out[name] = out.get(name, QC()) + c
        return AlgebraElement(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return AlgebraElement({n: -c for n, c in self.coeffs.items()})

    def __rmul__(self, scalar):
        scalar = as_qc(scalar)
        return AlgebraElement({n: scalar * c for n, c in self.coeffs.items()})

    __mul__ = __rmul__

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __repr__(self):
        if self.is_zero:
            return "0"
        return " + ".join(f"({c})*{n}" for n, c in sorted(self.coeffs.items()))


class LieAlgebra:
    """Named generator basis plus an exact structure-constant table."""

    def __init__(self, name: str, generator_names, constants: StructureConstants):
        names = tuple(generator_names)
        if len(set(names)) != len(names):
            raise AlgebraError(f"duplicate generator names in {name!r}")
        self.name = name
        self.generators = tuple(GeneratorId(n, i) for i, n in enumerate(names))
        self.constants = constants
        self._index = {g.name: g.index for g in self.generators}

    @property
    def dim(self) -> int:
        return len(self.generators)

    def names(self) -> tuple:
        return tuple(g.name for g in self.generators)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlgebraError(f"generator {name!r} not in algebra {self.name!r}") from None

    def generator(self, name: str) -> GeneratorId:
        return self.generators[self.index(name)]

    def basis_element(self, name: str) -> AlgebraElement:
        self.index(name)
        return AlgebraElement({name: 1})

    def element(self, coeffs) -> AlgebraElement:
        for name in coeffs:
            self.index(name)
        return AlgebraElement(coeffs)

    def bracket_table(self) -> dict:
        """Dense view {(name_a, name_b): {name_c: Fraction}} over stored pairs."""
        out = {}
        for (i, j), terms in self.constants.stored_items():
            a, b = self.generators[i].name, self.generators[j].name
            out[(a, b)] = {self.generators[k].name: f for k, f in terms}
        return out

    def to_descriptor(self) -> dict:
        brackets = []
        for (i, j), terms in sorted(self.constants.stored_items()):
            brackets.append(
                {
                    "a": self.generators[i].name,
                    "b": self.generators[j].name,
                    "terms": [
                        {"c": self.generators[k].name, "num": f.numerator, "den": f.denominator}
                        for k, f in terms
                    ],
                }
            )
        return {"name": self.name, "generators": list(self.names()), "brackets": brackets}


# ---------------------------------------------------------------------------
# catalog construction
# ---------------------------------------------------------------------------

def _jj_terms(p, q):
    # Literal expansion of the tensor-component rotation bracket for the
    # stored components p = (i, j), q = (h, k), both with i < j.
    (i, j), (h, k) = p, q
    raw = []
    if j == k:
        raw.append((1, i, h))
    if i == h:
        raw.append((1, j, k))
    if i == k:
        raw.append((-1, j, h))
    if j == h:
        raw.append((-1, i, k))
    acc = {}
    for sign, a, b in raw:
        if a == b:
            continue
        key, s = (f"J{a}{b}", sign) if a < b else (f"J{b}{a}", -sign)
        acc[key] = acc.get(key, 0) + s
    return {n: c for n, c in acc.items() if c}


def _jv_terms(p, k, prefix):
    # [J_ij, V_k] = d_ik V_j - d_jk V_i for any spatial vector V (K or P).
    i, j = p
    acc = {}
    if i == k:
        acc[f"{prefix}{j}"] = acc.get(f"{prefix}{j}", 0) + 1
    if j == k:
        acc[f"{prefix}{i}"] = acc.get(f"{prefix}{i}", 0) - 1
    return {n: c for n, c in acc.items() if c}


def _heisenberg_names(boost: str, central: str):
    return [f"{boost}{i}" for i in (1, 2, 3)] + [f"P{i}" for i in (1, 2, 3)] + [central]


def _build_heisenberg(name: str, boost: str, central: str) -> LieAlgebra:
    names = _heisenberg_names(boost, central)
    idx = {n: i for i, n in enumerate(names)}
    table = {}
    for i in (1, 2, 3):
        table[(idx[f"{boost}{i}"], idx[f"P{i}"])] = ((idx[central], Fraction(1)),)
    return LieAlgebra(name, names, StructureConstants(table))


def _build_so3() -> LieAlgebra:
    names = [f"J{i}{j}" for i, j in _J_PAIRS]
    idx = {n: i for i, n in enumerate(names)}
    table = {}
    for p, q in combinations(_J_PAIRS, 2):
        terms = _jj_terms(p, q)
        if terms:
            table[(idx[f"J{p[0]}{p[1]}"], idx[f"J{q[0]}{q[1]}"])] = tuple(
                (idx[n], Fraction(c)) for n, c in terms.items()
            )
    return LieAlgebra("so3", names, StructureConstants(table))


def _build_hr3(name="hr3", with_time_generator=False) -> LieAlgebra:
    names = [f"J{i}{j}" for i, j in _J_PAIRS]
    names += [f"K{i}" for i in (1, 2, 3)]
    names += [f"P{i}" for i in (1, 2, 3)]
    names.append("M")
    if with_time_generator:
        names.append("H")
    idx = {n: i for i, n in enumerate(names)}
    table = {}
    for p, q in combinations(_J_PAIRS, 2):
        terms = _jj_terms(p, q)
        if terms:
            table[(idx[f"J{p[0]}{p[1]}"], idx[f"J{q[0]}{q[1]}"])] = tuple(
                (idx[n], Fraction(c)) for n, c in terms.items()
            )
    for p in _J_PAIRS:
        for k in (1, 2, 3):
            for prefix in ("K", "P"):
                terms = _jv_terms(p, k, prefix)
                if terms:
                    table[(idx[f"J{p[0]}{p[1]}"], idx[f"{prefix}{k}"])] = tuple(
                        (idx[n], Fraction(c)) for n, c in terms.items()
                    )
    for i in (1, 2, 3):
        table[(idx[f"K{i}"], idx[f"P{i}"])] = ((idx["M"], Fraction(1)),)
    if with_time_generator:
        for i in (1, 2, 3):
            table[(idx[f"K{i}"], idx["H"])] = ((idx[f"P{i}"], Fraction(1)),)
    return LieAlgebra(name, names, StructureConstants(table))


_CATALOG_BUILDERS = {
    "h3_naive": lambda: _build_heisenberg("h3_naive", "X", "I"),
    "h3": lambda: _build_heisenberg("h3", "K", "M"),
    "so3": _build_so3,
    "hr3": lambda: _build_hr3("hr3"),
    "g3tilde": lambda: _build_hr3("g3tilde", with_time_generator=True),
}


def _from_descriptor(desc: dict) -> LieAlgebra:
    try:
        name = desc["name"]
        gen_names = list(desc["generators"])
        brackets = desc["brackets"]
    except (KeyError, TypeError) as exc:
        raise AlgebraError(f"malformed algebra descriptor: missing {exc}") from None
    idx = {n: i for i, n in enumerate(gen_names)}
    if len(idx) != len(gen_names):
        raise AlgebraError("duplicate generator names in descriptor")
    table = {}
    for entry in brackets:
        try:
            a, b = entry["a"], entry["b"]
            terms = [
                (idx[t["c"]], Fraction(int(t["num"]), int(t.get("den", 1))))
                for t in entry["terms"]
            ]
        except KeyError as exc:
            raise AlgebraError(f"malformed bracket entry: missing {exc}") from None
        if a not in idx or b not in idx:
            raise AlgebraError(f"bracket references unknown generator {a!r} or {b!r}")
        key = (idx[a], idx[b])
        if key in table:
            raise AlgebraError(f"duplicate bracket entry for ({a}, {b})")
        table[key] = tuple(terms)
    constants = StructureConstants(table)
    bad = constants.antisymmetry_violations()
    if bad:
        pairs = ", ".join(f"({gen_names[i]}, {gen_names[j]})" for i, j in bad)
        raise AlgebraError(f"descriptor violates antisymmetry at {pairs}")
    return LieAlgebra(name, gen_names, constants)


def build_algebra(spec) -> LieAlgebra:
    """Build a catalog algebra by id, or a custom one from a descriptor.

    `spec` may be a catalog id string, a descriptor dict, a path to a
    descriptor JSON file, or an existing LieAlgebra (returned as is).
    """
    if isinstance(spec, LieAlgebra):
        return spec
    if isinstance(spec, dict):
        return _from_descriptor(spec)
    if isinstance(spec, (str, Path)):
        key = str(spec)
        if key in _CATALOG_BUILDERS:
            return _CATALOG_BUILDERS[key]()
        path = Path(spec)
        if path.suffix == ".json" or path.exists():
            try:
                desc = json.loads(path.read_text())
            except OSError as exc:
                raise AlgebraError(f"cannot read algebra descriptor {path}: {exc}") from None
            except json.JSONDecodeError as exc:
                raise AlgebraError(f"invalid JSON in {path}: {exc}") from None
            return _from_descriptor(desc)
        raise AlgebraError(f"unknown algebra catalog id {key!r} (known: {', '.join(CATALOG_IDS)})")
    raise AlgebraError(f"cannot build an algebra from {type(spec).__name__}")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _check_support(alg: LieAlgebra, elem: AlgebraElement):
    for name in elem.coeffs:
        alg.index(name)


def bracket(alg: LieAlgebra, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Bilinear antisymmetric extension of the structure-constant table.

    The result carries the implicit i*hbar unit of the tables, i.e. the
    literal statement is [a, b] = i*hbar * bracket(alg, a, b).
    """
    _check_support(alg, a)
    _check_support(alg, b)
    out = {}
    for na, ca in a.items():
        ia = alg.index(na)
        for nb, cb in b.items():
            scale = ca * cb
            for k, f in alg.constants.terms(ia, alg.index(nb)):
                name = alg.generators[k].name
                out[name] = out.get(name, QC()) + scale * f
    return AlgebraElement(out)


def _bracket_idx(cons: StructureConstants, vec: dict, c: int) -> dict:
    # [sum_k vec_k G_k, G_c] as a sparse index -> Fraction map.
    out = {}
    for k, f in vec.items():
        for k2, f2 in cons.terms(k, c):
            out[k2] = out.get(k2, Fraction(0)) + f * f2
    return {k: v for k, v in out.items() if v}


def check_jacobi(alg: LieAlgebra) -> VerificationReport:
    """Evaluate [[G_a, G_b], G_c] + cyclic over every ordered generator triple.

    All arithmetic is exact; the report lists any triple with a nonzero
    residual element.
    """
    cons = alg.constants
    n = alg.dim
    violations = []
    for a, b, c in product(range(n), repeat=3):
        residual = {}
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            inner = {k: f for k, f in cons.terms(x, y)}
            for k, v in _bracket_idx(cons, inner, z).items():
                residual[k] = residual.get(k, Fraction(0)) + v
        residual = {k: v for k, v in residual.items() if v}
        if residual:
            names = tuple(alg.generators[i].name for i in (a, b, c))
            pretty = {alg.generators[k].name: str(v) for k, v in sorted(residual.items())}
            violations.append({"triple": names, "residual": pretty})
    report = VerificationReport(f"jacobi[{alg.name}]")
    detail = "" if not violations else f"first violating triple {violations[0]['triple']}"
    report.add(
        "jacobi",
        not violations,
        metrics={
            "triples_checked": n ** 3,
            "violation_count": len(violations),
            "violations": violations[:10],
        },
        detail=detail,
    )
    return report


def subalgebra_check(alg: LieAlgebra, subset) -> VerificationReport:
    """Pass iff the bracket of every pair from `subset` stays in its span."""
    names = list(subset)
    indices = {alg.index(n) for n in names}
    escapes = []
    for i, j in product(sorted(indices), repeat=2):
        for k, f in alg.constants.terms(i, j):
            if f and k not in indices:
                escapes.append(
                    {
                        "pair": (alg.generators[i].name, alg.generators[j].name),
                        "escapes_to": alg.generators[k].name,
                    }
                )
    report = VerificationReport(f"subalgebra[{alg.name}:{','.join(names)}]")
    detail = "" if not escapes else (
        f"[{escapes[0]['pair'][0]}, {escapes[0]['pair'][1]}] leaves the span "
        f"through {escapes[0]['escapes_to']}"
    )
    report.add(
        "closure",
        not escapes,
        metrics={"subset": names, "escape_count": len(escapes), "escapes": escapes[:10]},
        detail=detail,
    )
    return report
