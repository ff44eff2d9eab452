"""Built-in example registry: the standard Bell-type scenarios and models."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ScenarioError
from .logic import Theory, parse_formula, signature_for
from .model import PresheafModel, full_model, model_from_facet_sections
from .scenario import BOOL, Domain, SimplicialComplex, complex_from_facets


@dataclass(frozen=True)
class Example:
    name: str
    cplx: SimplicialComplex
    model: PresheafModel | None
    theory: Theory | None


def square_complex() -> SimplicialComplex:
    """Two parties with two two-valued measurements each; four edge contexts."""
    variables = ("a1", "a2", "b1", "b2")
    return complex_from_facets(
        variables,
        {x: BOOL for x in variables},
        [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")],
    )


def charlie_complex() -> SimplicialComplex:
    """The square with a third party's single measurement on every context."""
    variables = ("a1", "a2", "b1", "b2", "c")
    return complex_from_facets(
        variables,
        {x: BOOL for x in variables},
        [("a1", "b1", "c"), ("a2", "b1", "c"), ("a1", "b2", "c"), ("a2", "b2", "c")],
    )


def _theory(cplx, texts, ordered=False) -> Theory:
    sig = signature_for(cplx, ordered=ordered)
    return Theory(cplx, [parse_formula(t, cplx, sig) for t in texts], sig, texts=texts)


def pr_box() -> Example:
    cplx = square_complex()
    eq = frozenset({(0, 0), (1, 1)})
    ne = frozenset({(0, 1), (1, 0)})
    model = model_from_facet_sections(cplx, {
        frozenset({"a1", "b1"}): eq,
        frozenset({"a1", "b2"}): eq,
        frozenset({"a2", "b1"}): eq,
        frozenset({"a2", "b2"}): ne,
    })
    theory = _theory(cplx, [
        "a1 (+) b1 = 0",
        "a1 (+) b2 = 0",
        "a2 (+) b1 = 0",
        "a2 (+) b2 = 1",
    ])
    return Example("pr_box", cplx, model, theory)


def hardy() -> Example:
    cplx = square_complex()
    full = frozenset({(0, 0), (0, 1), (1, 0), (1, 1)})
    model = model_from_facet_sections(cplx, {
        frozenset({"a1", "b1"}): full,
        frozenset({"a1", "b2"}): full - {(1, 1)},
        frozenset({"a2", "b1"}): full - {(1, 1)},
        frozenset({"a2", "b2"}): full - {(0, 0)},
    })
    theory = _theory(cplx, ["~a1 \\/ ~b2", "~a2 \\/ ~b1", "a2 \\/ b2"])
    return Example("hardy", cplx, model, theory)


def square_full() -> Example:
    cplx = square_complex()
    return Example("square_full", cplx, full_model(cplx), None)


def signal_e() -> Example:
    from .inchworm import mm

    cplx = square_complex()
    theory = _theory(cplx, ["(a2 /\\ ~b1) \\/ (~a2 /\\ ~b1)"])
    return Example("signal_e", cplx, mm(theory), theory)


def charlie() -> Example:
    cplx = charlie_complex()
    theory = _theory(cplx, ["a1 = b1", "a1 = c", "a2 = b1"])
    return Example("charlie", cplx, None, theory)


def mermin() -> Example:
    from .inchworm import mm

    variables = ("xa", "ya", "xb", "yb", "xc", "yc")
    cplx = complex_from_facets(
        variables,
        {x: BOOL for x in variables},
        [("xa", "xb", "xc"), ("xa", "yb", "yc"), ("ya", "xb", "yc"), ("ya", "yb", "xc")],
    )
    theory = _theory(cplx, [
        "xa (+) xb (+) xc = 0",
        "xa (+) yb (+) yc = 1",
        "ya (+) xb (+) yc = 1",
        "ya (+) yb (+) xc = 1",
    ])
    return Example("mermin", cplx, mm(theory), theory)


def spiral(k: int, drop_positivity: bool = False) -> Example:
    """The square complex over the cyclic ordered domain {0..k-1} with the
    equality chain and the shifted successor constraint."""
    if k < 2:
        raise ScenarioError("spiral needs k >= 2")
    zk = Domain(f"z{k}", tuple(str(i) for i in range(k)))
    variables = ("a1", "a2", "b1", "b2")
    cplx = complex_from_facets(
        variables,
        {x: zk for x in variables},
        [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")],
    )
    texts = ["a1 = b2", "b1 = a1", "a2 = b1", "b2 = a2 + 1"]
    if not drop_positivity:
        texts.append("b2 > 0")
    return Example(f"spiral_{k}", cplx, None, _theory(cplx, texts, ordered=True))


_BUILDERS = {
    "pr_box": pr_box,
    "hardy": hardy,
    "square_full": square_full,
    "signal_e": signal_e,
    "charlie": charlie,
    "mermin": mermin,
}


def example_names() -> list[str]:
    return sorted(_BUILDERS) + ["spiral_<k>"]


def example(name: str) -> Example:
    if name in _BUILDERS:
        return _BUILDERS[name]()
    if name.startswith("spiral_"):
        try:
            k = int(name.split("_", 1)[1])
        except ValueError:
            raise ScenarioError(f"bad spiral example name {name!r}") from None
        return spiral(k)
    raise ScenarioError(f"unknown example {name!r}; known: {', '.join(example_names())}")
