import random

import pytest

from ctxkit.errors import ParseError
from ctxkit.examples import example
from ctxkit.inchworm import mm
from ctxkit.scenariofile import (
    ScenarioFile,
    parse_scenario,
    parse_section_str,
    render_scenario,
    section_str,
)

from conftest import random_bool_complex, random_model

HARDY_TEXT = """
# two parties, two binary measurements each
scenario hardy
domain bool = { 0 1 }
var a1 a2 b1 b2 : bool
context { a1 b1 } { a1 b2 } { a2 b1 } { a2 b2 }
sections { a1 b1 } = { 00 01 10 11 }
sections { a1 b2 } = { 00 01 10 }
sections { a2 b1 } = { 00 01 10 }
sections { a2 b2 } = { 01 10 11 }
"""

THEORY_TEXT = """
scenario pr
domain bool = { 0 1 }
var a1 a2 b1 b2 : bool
context { a1 b1 } { a1 b2 } { a2 b1 } { a2 b2 }
theory { a1 (+) b1 = 0 ; a1 (+) b2 = 0 ; a2 (+) b1 = 0 ; a2 (+) b2 = 1 }
"""


def test_parse_hardy_model():
    sf = parse_scenario(HARDY_TEXT)
    assert sf.name == "hardy"
    assert sf.model == example("hardy").model
    assert sf.theory is None


def test_parse_theory_file():
    sf = parse_scenario(THEORY_TEXT)
    assert sf.model is None
    assert len(sf.theory.formulas) == 4
    assert mm(sf.theory) == example("pr_box").model


def test_section_str_round_trip(square):
    U = frozenset({"a1", "b2"})
    for t in ((0, 0), (1, 0), (1, 1)):
        assert parse_section_str(square, U, section_str(square, U, t)) == t


def test_section_str_wide_domains():
    ex = example("spiral_12")
    cplx = ex.cplx
    U = frozenset({"a1", "b1"})
    s = section_str(cplx, U, (3, 11))
    assert s == "0311"
    assert parse_section_str(cplx, U, s) == (3, 11)


def test_parse_errors_carry_line_numbers():
    bad = HARDY_TEXT.replace("{ 00 01 10 11 }", "{ 00 01 xx 11 }")
    with pytest.raises(ParseError) as exc:
        parse_scenario(bad)
    assert exc.value.line == 7

    with pytest.raises(ParseError):
        parse_scenario("scenario x\n")  # no variables
    with pytest.raises(ParseError):
        parse_scenario(THEORY_TEXT.replace("scenario pr\n", ""))  # no header
    with pytest.raises(ParseError):
        parse_scenario(THEORY_TEXT.replace("a2 (+) b1 = 0", "a2 (+) zz = 0"))


def test_sections_for_non_facet_rejected():
    bad = HARDY_TEXT + "sections { a1 } = { 0 }\n"
    with pytest.raises(ParseError):
        parse_scenario(bad)


def test_override_requires_sections():
    bad = THEORY_TEXT + "override { a1 } = { 0 }\n"
    with pytest.raises(ParseError):
        parse_scenario(bad)


def test_override_pins_face():
    text = HARDY_TEXT + "override { b1 } = { 0 }\n"
    with pytest.raises(Exception):
        # pinning below the union of images breaks the subpresheaf law
        parse_scenario(text)


@pytest.mark.parametrize("name", ["pr_box", "hardy", "square_full", "signal_e", "mermin", "spiral_3"])
def test_render_parse_round_trip(name):
    ex = example(name)
    sf = ScenarioFile(ex.name, ex.cplx, ex.model, ex.theory)
    text = render_scenario(sf)
    back = parse_scenario(text)
    assert back.name == ex.name
    assert back.cplx == ex.cplx
    assert back.model == ex.model
    if ex.theory is None:
        assert back.theory is None
    else:
        assert back.theory.texts == ex.theory.texts
        assert [f for f in back.theory.formulas] == list(ex.theory.formulas)


def test_render_parse_round_trip_random_models():
    rng = random.Random(83)
    for i in range(25):
        cplx = random_bool_complex(rng)
        model = random_model(rng, cplx)
        sf = ScenarioFile(f"rand{i}", cplx, model, None)
        back = parse_scenario(render_scenario(sf))
        assert back.cplx == cplx
        assert back.model == model
