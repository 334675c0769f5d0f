"""Parser, printer round-trips, and static formula analyses."""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sstl import logic
from sstl.logic import (
    And,
    Atomic,
    BoolConst,
    Comparison,
    Const,
    Eventually,
    Everywhere,
    Globally,
    Not,
    Or,
    ParseError,
    Somewhere,
    Surround,
    Until,
    Var,
    desugar,
    has_equality_atom,
    parse_formula,
    parse_script,
    pretty,
    temporal_depth,
    until_count,
    variables,
)


class TestParsing:
    def test_spot_formula_shape(self):
        f = parse_formula("(xA <= 0.5) S[1,6] (xA > 0.5)")
        assert isinstance(f, Surround)
        assert f.d1 == 1 and f.d2 == 6
        assert f.left == Atomic(Comparison("<=", Var("xA"), Const(Fraction(1, 2))))
        assert f.right == Atomic(Comparison(">", Var("xA"), Const(Fraction(1, 2))))

    def test_spot_formation_nesting(self):
        f = parse_formula("F[19,20] G[0,30] ((xA <= 0.5) S[1,6] (xA > 0.5))")
        assert isinstance(f, Eventually)
        assert isinstance(f.child, Globally)
        assert isinstance(f.child.child, Surround)
        assert (f.t1, f.t2) == (19, 20)
        assert (f.child.t1, f.child.t2) == (0, 30)

    def test_pattern_nesting_with_references(self):
        script = parse_script(
            "phi := (xA <= 0.5) S[1,6] (xA > 0.5)\n"
            "pattern := everywhere[0,45] somewhere[0,15] phi\n"
        )
        f = script["pattern"]
        assert isinstance(f, Everywhere)
        assert isinstance(f.child, Somewhere)
        assert f.child.child == script["phi"]
        assert (f.d1, f.d2) == (0, 45)
        assert (f.child.d1, f.child.d2) == (0, 15)

    def test_implication_is_sugar(self):
        f = parse_formula("(B = 0) -> (B > 0)")
        assert f == Or(Not(Atomic(Comparison("=", Var("B"), Const(Fraction(0))))),
                       Atomic(Comparison(">", Var("B"), Const(Fraction(0)))))

    def test_constants_and_precedence(self):
        f = parse_formula("true & false | true")
        # & binds tighter than |
        assert f == Or(And(BoolConst(True), BoolConst(False)), BoolConst(True))

    def test_arithmetic_atoms(self):
        f = parse_formula("2 * xA + 1 < xB / 4")
        assert isinstance(f, Atomic)
        assert variables(f) == {"xA", "xB"}

    def test_negative_bound_rejected(self):
        with pytest.raises(ParseError, match="negative"):
            parse_formula("F[-1,2] true")

    def test_reversed_interval_rejected(self):
        with pytest.raises(ParseError, match="reversed"):
            parse_formula("F[3,2] true")

    def test_point_interval_accepted(self):
        f = parse_formula("F[2,2] (x > 0)")
        assert f.t1 == f.t2 == 2

    def test_syntax_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            parse_formula("(xA <= ) S[1,6] (xA > 0.5)")
        assert err.value.line == 1
        assert err.value.column > 1

    def test_unknown_name_reported(self):
        with pytest.raises(ParseError, match="unknown formula name"):
            parse_formula("nope")

    def test_chained_until_needs_parens(self):
        with pytest.raises(ParseError):
            parse_formula("(x > 0) U[0,1] (x > 0) U[0,1] (x > 0)")

    def test_rational_bounds(self):
        f = parse_formula("G[1/3,2/3] (x > 0)")
        assert f.t1 == Fraction(1, 3) and f.t2 == Fraction(2, 3)

    def test_script_comments_and_blank_lines(self):
        script = parse_script(
            "# heading comment\n"
            "\n"
            "a := x > 1  # trailing comment\n"
            "b := !a\n"
        )
        assert set(script) == {"a", "b"}
        assert script["b"] == Not(script["a"])

    def test_script_duplicate_name_rejected(self):
        with pytest.raises(ParseError, match="defined twice"):
            parse_script("a := x > 1\na := x > 2\n")

    def test_script_reserved_name_rejected(self):
        with pytest.raises(ParseError, match="reserved"):
            parse_script("F := x > 1\n")


@st.composite
def formulas(draw, depth=3):
    atoms = st.sampled_from(
        [
            Atomic(Comparison("<=", Var("x"), Const(Fraction(1, 2)))),
            Atomic(Comparison(">", Var("y"), Const(Fraction(-3)))),
            Atomic(Comparison("<", BinOpXY(), Const(Fraction(2)))),
            BoolConst(True),
            BoolConst(False),
        ]
    )
    if depth == 0:
        return draw(atoms)
    sub = formulas(depth=depth - 1)
    lo = Fraction(draw(st.integers(0, 4)), 2)
    hi = lo + Fraction(draw(st.integers(0, 4)), 2)
    return draw(
        st.one_of(
            atoms,
            st.builds(Not, sub),
            st.builds(And, sub, sub),
            st.builds(Or, sub, sub),
            st.tuples(sub, sub).map(lambda p: Until(p[0], p[1], lo, hi)),
            sub.map(lambda c: Eventually(c, lo, hi)),
            sub.map(lambda c: Globally(c, lo, hi)),
            sub.map(lambda c: Somewhere(c, lo, hi)),
            sub.map(lambda c: Everywhere(c, lo, hi)),
            st.tuples(sub, sub).map(lambda p: Surround(p[0], p[1], lo, hi)),
        )
    )


def BinOpXY():
    return logic.BinOp("+", Var("x"), logic.BinOp("*", Const(Fraction(2)), Var("y")))


class TestPrettyRoundTrip:
    @settings(max_examples=300, deadline=None)
    @given(formulas())
    def test_parse_pretty_identity(self, f):
        assert parse_formula(pretty(f)) == f

    def test_number_formatting(self):
        f = Until(BoolConst(True), BoolConst(False), Fraction(1, 3), Fraction(5, 2))
        text = pretty(f)
        assert "[1/3,2.5]" in text
        assert parse_formula(text) == f


class TestAnalyses:
    def test_depth_atomic(self):
        assert temporal_depth(parse_formula("x > 0")) == 0

    def test_depth_nested(self):
        f = parse_formula("F[19,20] G[0,30] (x > 0)")
        assert temporal_depth(f) == 50

    def test_depth_spatial_adds_nothing(self):
        f = parse_formula("everywhere[0,45] somewhere[0,15] (x > 0)")
        assert temporal_depth(f) == 0
        g = parse_formula("somewhere[0,5] F[0,7] (x > 0)")
        assert temporal_depth(g) == 7

    def test_until_count(self):
        assert until_count(parse_formula("x > 0")) == 0
        assert until_count(parse_formula("F[19,20] G[0,30] (x > 0)")) == 2
        f = parse_formula("(F[0,1] (x > 0)) U[0,2] (x > 0)")
        assert until_count(f) == 2

    def test_until_count_desugar_consistent(self):
        f = parse_formula("F[19,20] G[0,30] ((x <= 0.5) S[1,6] (x > 0.5))")
        assert until_count(f) == until_count(desugar(f))

    def test_equality_detection(self):
        assert has_equality_atom(parse_formula("(B = 0) | (B > 1)"))
        assert not has_equality_atom(parse_formula("B >= 0"))

    def test_variables_collected(self):
        f = parse_formula("(xA <= 0.5) S[1,6] (xB > 0.5 + xC)")
        assert variables(f) == {"xA", "xB", "xC"}
