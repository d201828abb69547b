"""Exact-layer tests: catalog tables, brackets, Jacobi, subalgebras."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrsym import (
    AlgebraError,
    CATALOG_IDS,
    LieAlgebra,
    QC,
    StructureConstants,
    bracket,
    build_algebra,
    check_jacobi,
    subalgebra_check,
)


def _basis(alg, name):
    return alg.basis_element(name)


class TestCatalog:
    def test_generator_counts(self):
        assert build_algebra("h3_naive").dim == 7
        assert build_algebra("h3").dim == 7
        assert build_algebra("so3").dim == 3
        assert build_algebra("hr3").dim == 10
        assert build_algebra("g3tilde").dim == 11

    def test_hr3_generator_names(self):
        names = build_algebra("hr3").names()
        assert names == ("J12", "J13", "J23", "K1", "K2", "K3", "P1", "P2", "P3", "M")

    def test_unknown_catalog_id(self):
        with pytest.raises(AlgebraError):
            build_algebra("e8")

    def test_boost_translation_brackets(self):
        hr3 = build_algebra("hr3")
        assert bracket(hr3, _basis(hr3, "K1"), _basis(hr3, "P1")) == hr3.element({"M": 1})
        assert bracket(hr3, _basis(hr3, "K1"), _basis(hr3, "P2")).is_zero

    def test_rotation_acts_on_boosts(self):
        hr3 = build_algebra("hr3")
        assert bracket(hr3, _basis(hr3, "J12"), _basis(hr3, "K1")) == hr3.element({"K2": 1})
        assert bracket(hr3, _basis(hr3, "J12"), _basis(hr3, "K2")) == hr3.element({"K1": -1})
        assert bracket(hr3, _basis(hr3, "J12"), _basis(hr3, "P3")).is_zero

    def test_so3_signs_match_literal_expansion(self):
        # Oracle: expand d_jk J_ih + d_ih J_jk - d_ik J_jh - d_jh J_ik by hand.
        # (1,2),(2,3): only -d_jh J_ik = -J13 survives (j = h = 2).
        # (1,2),(1,3): only  d_ih J_jk = +J23 survives (i = h = 1).
        # (1,3),(2,3): only  d_jk J_ih = +J12 survives (j = k = 3).
        so3 = build_algebra("so3")
        assert bracket(so3, _basis(so3, "J12"), _basis(so3, "J23")) == so3.element({"J13": -1})
        assert bracket(so3, _basis(so3, "J12"), _basis(so3, "J13")) == so3.element({"J23": 1})
        assert bracket(so3, _basis(so3, "J13"), _basis(so3, "J23")) == so3.element({"J12": 1})

    def test_time_generator_bracket(self):
        g3 = build_algebra("g3tilde")
        assert bracket(g3, _basis(g3, "K1"), _basis(g3, "H")) == g3.element({"P1": 1})
        assert bracket(g3, _basis(g3, "P1"), _basis(g3, "H")).is_zero

    def test_naive_heisenberg_uses_position_and_identity(self):
        naive = build_algebra("h3_naive")
        assert bracket(naive, _basis(naive, "X1"), _basis(naive, "P1")) == naive.element({"I": 1})

    def test_mass_is_central(self):
        for name in ("hr3", "g3tilde"):
            alg = build_algebra(name)
            m = _basis(alg, "M")
            for gen in alg.generators:
                assert bracket(alg, m, _basis(alg, gen.name)).is_zero

    def test_hr3_equals_g3tilde_without_time_generator(self):
        hr3 = build_algebra("hr3")
        g3 = build_algebra("g3tilde")
        assert g3.names()[:-1] == hr3.names()
        shared = hr3.bracket_table()
        g3_table = g3.bracket_table()
        g3_shared = {k: v for k, v in g3_table.items() if "H" not in k and "H" not in v}
        assert g3_shared == shared


class TestJacobi:
    @pytest.mark.parametrize("name", CATALOG_IDS)
    def test_catalog_algebras_pass_exactly(self, name):
        report = check_jacobi(build_algebra(name))
        assert report.passed
        assert report["jacobi"].metrics["violation_count"] == 0

    def test_one_sided_corruption_is_caught_with_named_triple(self):
        hr3 = build_algebra("hr3")
        table = {pair: terms for pair, terms in hr3.constants.stored_items()}
        k1, p1, m = hr3.index("K1"), hr3.index("P1"), hr3.index("M")
        table[(k1, p1)] = ((m, Fraction(2)),)
        table[(p1, k1)] = ((m, Fraction(-1)),)
        corrupted = LieAlgebra("hr3_corrupted", hr3.names(), StructureConstants(table))
        report = check_jacobi(corrupted)
        assert not report.passed
        triples = [tuple(v["triple"]) for v in report["jacobi"].metrics["violations"]]
        # hand-derived witness: [[J12,K2],P1] + [[K2,P1],J12] + [[P1,J12],K2] = -M
        assert ("J12", "K2", "P1") in triples

    def test_consistent_sign_flip_still_breaks_jacobi(self):
        desc = build_algebra("hr3").to_descriptor()
        for entry in desc["brackets"]:
            if entry["a"] == "K1" and entry["b"] == "P1":
                entry["terms"][0]["num"] = -1
        assert not check_jacobi(build_algebra(desc)).passed


class TestSubalgebras:
    def test_heisenberg_inside_extended_galilei(self):
        g3 = build_algebra("g3tilde")
        rep = subalgebra_check(g3, ["K1", "K2", "K3", "P1", "P2", "P3", "M"])
        assert rep.passed

    def test_rotation_extended_heisenberg_inside(self):
        g3 = build_algebra("g3tilde")
        names = ["J12", "J13", "J23", "K1", "K2", "K3", "P1", "P2", "P3", "M"]
        assert subalgebra_check(g3, names).passed

    def test_boosts_with_time_generator_do_not_close(self):
        g3 = build_algebra("g3tilde")
        rep = subalgebra_check(g3, ["K1", "K2", "K3", "H"])
        assert not rep.passed
        escapes = rep["closure"].metrics["escapes"]
        assert any(e["escapes_to"].startswith("P") for e in escapes)

    def test_unknown_generator_raises(self):
        with pytest.raises(AlgebraError):
            subalgebra_check(build_algebra("hr3"), ["K1", "Z9"])


class TestDescriptors:
    def test_round_trip(self):
        hr3 = build_algebra("hr3")
        rebuilt = build_algebra(hr3.to_descriptor())
        assert rebuilt.names() == hr3.names()
        assert rebuilt.constants == hr3.constants

    def test_descriptor_file(self, tmp_path):
        import json

        path = tmp_path / "alg.json"
        path.write_text(json.dumps(build_algebra("so3").to_descriptor()))
        assert check_jacobi(build_algebra(str(path))).passed

    def test_antisymmetry_violation_rejected(self):
        desc = {
            "name": "bad",
            "generators": ["A", "B", "C"],
            "brackets": [
                {"a": "A", "b": "B", "terms": [{"c": "C", "num": 2, "den": 1}]},
                {"a": "B", "b": "A", "terms": [{"c": "C", "num": -1, "den": 1}]},
            ],
        }
        with pytest.raises(AlgebraError, match="antisymmetry"):
            build_algebra(desc)

    def test_unknown_generator_in_bracket_rejected(self):
        desc = {
            "name": "bad",
            "generators": ["A", "B"],
            "brackets": [{"a": "A", "b": "Z", "terms": [{"c": "B", "num": 1, "den": 1}]}],
        }
        with pytest.raises(AlgebraError):
            build_algebra(desc)


_coeff = st.builds(
    QC,
    st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5)),
    st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5)),
)


def _element_strategy(alg):
    names = st.sampled_from([g.name for g in alg.generators])
    return st.dictionaries(names, _coeff, min_size=0, max_size=4).map(alg.element)


class TestBracketProperties:
    @settings(max_examples=40, deadline=None)
    @given(data=st.data())
    def test_antisymmetry_exact(self, data):
        alg = build_algebra("g3tilde")
        a = data.draw(_element_strategy(alg))
        b = data.draw(_element_strategy(alg))
        assert (bracket(alg, a, b) + bracket(alg, b, a)).is_zero

    @settings(max_examples=40, deadline=None)
    @given(data=st.data(), alpha=_coeff)
    def test_bilinearity_exact(self, data, alpha):
        alg = build_algebra("hr3")
        a = data.draw(_element_strategy(alg))
        b = data.draw(_element_strategy(alg))
        c = data.draw(_element_strategy(alg))
        lhs = bracket(alg, alpha * a + b, c)
        rhs = alpha * bracket(alg, a, c) + bracket(alg, b, c)
        assert lhs == rhs

    @settings(max_examples=25, deadline=None)
    @given(data=st.data())
    def test_self_bracket_vanishes(self, data):
        alg = build_algebra("hr3")
        a = data.draw(_element_strategy(alg))
        assert bracket(alg, a, a).is_zero

    def test_element_outside_algebra_rejected(self):
        hr3 = build_algebra("hr3")
        g3 = build_algebra("g3tilde")
        h = g3.basis_element("H")
        with pytest.raises(AlgebraError):
            bracket(hr3, h, hr3.basis_element("K1"))
