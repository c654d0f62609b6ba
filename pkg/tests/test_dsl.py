import pytest

from germlab.dsl import GermParseError, parse_text
from germlab.poly import VarContext


def parse_one(src, name=None):
    return parse_text(src).single(name)


MFX1 = """\
map mfx1 : R^3 -> R^2
vars x, y, z
G1 = x*y
G2 = x*z
"""


def test_map_declaration_resolves():
    r = parse_one(MFX1)
    assert r.germ.source_arity == 3 and r.germ.target_arity == 2
    assert [c.text() for c in r.germ.components] == ["x*y", "x*z"]


def test_canonical_text_roundtrips():
    r = parse_one(MFX1)
    again = parse_one(r.canonical_text())
    assert again.germ.components == r.germ.components
    assert again.ctx.names == r.ctx.names


def test_rational_coefficients_roundtrip():
    src = "map h : R^2 -> R^1\nvars x, y\nG = 1/2*x + 3/4*y^2\n"
    r = parse_one(src)
    assert r.germ.components[0].text() == "3/4*y^2 + 1/2*x"
    assert parse_one(r.canonical_text()).germ.components == r.germ.components


def test_default_variable_names():
    src = "map g : R^2 -> R^1\nG = x1*x2\n"
    r = parse_one(src)
    assert r.ctx.names == ("x1", "x2")


def test_comments_and_blank_lines_are_ignored():
    src = "# header\n\nmap g : R^2 -> R^1  # inline\nvars x, y\n\nG = x*y\n"
    assert parse_one(src).germ.components[0].text() == "x*y"


def test_assert_set_with_rational_entries():
    src = MFX1 + """\
assert_set M {
  (0, s1, s2)
  (r, r*(1-s^2)/(1+s^2), 2*r*s/(1+s^2))
}
"""
    r = parse_one(src)
    comps = r.sets["M"]
    assert len(comps) == 2
    assert comps[0].params.names == ("s1", "s2")
    assert comps[1].params.names == ("r", "s")
    assert not comps[1].is_polynomial()


def test_witness_block_resolves_laurent_curves():
    src = """\
map ent1 : R^3 -> R^2
vars x, y, z
G1 = x
G2 = y*(x^2 + y^2) + x*z^2
assert_set axis {
  (0, 0, s)
}
witness w1 {
  stratum axis
  gamma (t, 0, s)
  c (-s^2 * t^-1, t^-1)
  assume wg_invariant
}
"""
    w = parse_one(src).witnesses["w1"]
    assert w.gamma.coords[0].valuation() == 1
    assert w.coeffs[0].valuation() == -1
    assert w.coeffs[0].leading().text() == "-s^2"
    assert w.stratum.params.names == ("s",)
    assert "wg_invariant" in w.assumptions


def test_mixed_declaration_and_realification():
    src = "mixed sq : C^1 -> C\nvars z\nf = z^2\n"
    r = parse_one(src)
    assert r.poly.is_holomorphic()
    re, im = [c.text() for c in r.realified.components]
    assert re == "z_re^2 - z_im^2"
    assert im == "2*z_re*z_im"


def test_mixed_i_and_conj():
    src = "mixed f : C^1 -> C\nvars z\nf = i*z*conj(z)\n"
    r = parse_one(src)
    assert not r.poly.is_holomorphic()
    re, im = [c.text() for c in r.realified.components]
    assert re == "0"
    assert im == "z_re^2 + z_im^2"


# -- errors ---------------------------------------------------------------


def error_of(src):
    with pytest.raises(GermParseError) as exc:
        parse_text(src)
    return exc.value


def test_syntax_error_reports_position_and_expected():
    e = error_of("map g : R^2 -> R^1\nvars x, y\nG = x +\n")
    assert e.line == 3
    assert e.col == 8
    assert any("variable" in x for x in e.expected)


def test_undeclared_variable_is_an_error():
    e = error_of("map g : R^2 -> R^1\nvars x, y\nG = x*w\n")
    assert "undeclared" in e.message and "w" in e.message
    assert (e.line, e.col) == (3, 7)


def test_component_must_vanish_at_origin():
    e = error_of("map g : R^2 -> R^1\nvars x, y\nG = x*y + 1\n")
    assert "vanish" in e.message


def test_component_count_must_match_target_arity():
    e = error_of("map g : R^3 -> R^2\nvars x, y, z\nG1 = x*y\n")
    assert "components" in e.message


def test_arity_bounds_are_checked():
    assert "arity" in error_of("map g : R^11 -> R^2\nG = x1\n").message
    assert "arity" in error_of("map g : R^2 -> R^3\nG = x1\n").message


def test_conj_rejected_in_map_declaration():
    e = error_of("map g : R^2 -> R^1\nvars x, y\nG = conj(x)*y\n")
    assert "mixed" in e.message


def test_i_reserved_in_mixed_vars():
    e = error_of("mixed g : C^2 -> C\nvars i, z\nf = i*z\n")
    assert "imaginary" in e.message


def test_negative_power_only_on_t():
    e = error_of("map g : R^2 -> R^1\nvars x, y\nG = x^-1 * y\n")
    assert "negative powers" in e.message


def test_duplicate_names_rejected():
    assert "duplicate" in error_of(MFX1 + MFX1).message
    assert "duplicate" in error_of(
        "map g : R^2 -> R^1\nvars x, x\nG = x1\n").message


def test_division_by_zero_rational_entry():
    e = error_of(MFX1 + "assert_set V {\n  (s, s/(s-s), 0)\n}\n")
    assert "zero" in e.message


def test_set_arity_must_match_source():
    e = error_of(MFX1 + "assert_set V {\n  (s, 0)\n}\n")
    assert "entries" in e.message


def test_witness_requires_known_stratum():
    e = error_of(MFX1 + "witness w {\n  stratum nope\n  gamma (t, 0, s)\n}\n")
    assert "unknown set" in e.message


def test_mixed_sets_live_in_realified_coordinates():
    src = """\
mixed e : C^2 -> C
vars x, y
f = x*conj(y)
assert_set V {
  (0, 0, s1, s2)
}
"""
    r = parse_one(src)
    comp = r.sets["V"][0]
    assert comp.target == VarContext(["x_re", "x_im", "y_re", "y_im"])
