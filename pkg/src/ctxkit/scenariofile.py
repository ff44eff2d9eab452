"""Line-oriented scenario text format.

::

    scenario NAME
    domain D = { v0 v1 ... }
    var x y ... : D
    context { x y } { x z } ...
    sections { x y } = { 00 11 ... }      # explicit model, one block per facet
    theory { phi ; phi ; ... }
    override { x } = { 0 }                # pin a non-facet context

Comments run from ``#`` to end of line.  Section strings are fixed-width
digit strings of value indices in canonical variable order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, ScenarioError
from .logic import Theory, parse_formula, signature_for
from .model import PresheafModel, model_from_facet_sections
from .scenario import Domain, SimplicialComplex, complex_from_facets


def value_width(domain: Domain) -> int:
    return len(str(domain.size - 1))


def section_str(cplx: SimplicialComplex, U, values) -> str:
    vs = cplx.sort_vars(U)
    return "".join(str(v).rjust(value_width(cplx.domain(x)), "0") for x, v in zip(vs, values))


def parse_section_str(cplx: SimplicialComplex, U, text: str, line=None):
    vs = cplx.sort_vars(U)
    values = []
    pos = 0
    for x in vs:
        w = value_width(cplx.domain(x))
        chunk = text[pos:pos + w]
        if len(chunk) < w or not chunk.isdigit():
            raise ParseError(f"bad section string {text!r} for context {list(vs)}", line=line)
        v = int(chunk)
        if v >= cplx.domain(x).size:
            raise ParseError(f"value index {v} out of range for {x!r}", line=line)
        values.append(v)
        pos += w
    if pos != len(text):
        raise ParseError(f"section string {text!r} too long for context {list(vs)}", line=line)
    return tuple(values)


def _tokenize_lines(text: str):
    """(token, line number) pairs; braces and '=' are their own tokens."""
    out = []
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for brace in "{}=:;":
            line = line.replace(brace, f" {brace} ")
        for word in line.split():
            out.append((word, n))
    return out


class _Reader:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def line(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i][1]
        return self.tokens[-1][1] if self.tokens else None

    def next(self):
        if self.i >= len(self.tokens):
            raise ParseError("unexpected end of file")
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok, n = self.next()
        if tok != value:
            raise ParseError(f"expected {value!r}, found {tok!r}", line=n)
        return n

    def braced(self):
        """Tokens between the next matched pair of braces (no nesting)."""
        self.expect("{")
        items = []
        while True:
            tok, n = self.next()
            if tok == "}":
                return items
            items.append((tok, n))


@dataclass
class ScenarioFile:
    name: str
    cplx: SimplicialComplex
    model: PresheafModel | None
    theory: Theory | None


def parse_scenario(text: str) -> ScenarioFile:
    reader = _Reader(_tokenize_lines(text))
    name = None
    domains = {}
    var_domain = {}
    var_order = []
    facets = []
    section_blocks = []
    override_blocks = []
    theory_texts = []

    while reader.peek() is not None:
        tok, n = reader.next()
        if tok == "scenario":
            name, _ = reader.next()
        elif tok == "domain":
            dname, _ = reader.next()
            reader.expect("=")
            values = [v for v, _ in reader.braced()]
            try:
                domains[dname] = Domain(dname, tuple(values))
            except ScenarioError as e:
                raise ParseError(str(e), line=n) from None
        elif tok == "var":
            names = []
            while reader.peek() != ":":
                vname, vn = reader.next()
                names.append((vname, vn))
            reader.expect(":")
            dname, dn = reader.next()
            if dname not in domains:
                raise ParseError(f"unknown domain {dname!r}", line=dn)
            for vname, vn in names:
                if vname in var_domain:
                    raise ParseError(f"duplicate variable {vname!r}", line=vn)
                var_domain[vname] = domains[dname]
                var_order.append(vname)
        elif tok == "context":
            while reader.peek() == "{":
                facets.append(frozenset(v for v, _ in reader.braced()))
        elif tok in ("sections", "override"):
            ctx = frozenset(v for v, _ in reader.braced())
            reader.expect("=")
            strings = reader.braced()
            (section_blocks if tok == "sections" else override_blocks).append((ctx, strings, n))
        elif tok == "theory":
            items = reader.braced()
            current, start = [], None
            for word, wn in items + [(";", None)]:
                if word == ";":
                    if current:
                        theory_texts.append((" ".join(current), start))
                    current, start = [], None
                else:
                    if start is None:
                        start = wn
                    current.append(word)
        else:
            raise ParseError(f"unknown directive {tok!r}", line=n)

    if name is None:
        raise ParseError("missing 'scenario NAME' header")
    if not var_order:
        raise ParseError("no variables declared")
    try:
        cplx = complex_from_facets(var_order, var_domain, facets)
    except ScenarioError as e:
        raise ParseError(str(e)) from None

    model = None
    if section_blocks:
        facet_data = {}
        for ctx, strings, n in section_blocks:
            if frozenset(ctx) not in cplx.facets:
                raise ParseError(f"sections block for non-facet context {sorted(ctx)}", line=n)
            facet_data[ctx] = frozenset(
                parse_section_str(cplx, ctx, s, line=sn) for s, sn in strings
            )
        overrides = {}
        for ctx, strings, n in override_blocks:
            if not cplx.contains(ctx):
                raise ParseError(f"override for non-member context {sorted(ctx)}", line=n)
            overrides[ctx] = frozenset(
                parse_section_str(cplx, ctx, s, line=sn) for s, sn in strings
            )
        model = model_from_facet_sections(cplx, facet_data, overrides or None)
    elif override_blocks:
        raise ParseError("override blocks need sections blocks")

    theory = None
    if theory_texts:
        sig = signature_for(cplx, ordered=True)
        formulas = []
        for text_, n in theory_texts:
            try:
                formulas.append(parse_formula(text_, cplx, sig))
            except ParseError as e:
                raise ParseError(f"in formula {text_!r}: {e}", line=n) from None
        theory = Theory(cplx, formulas, sig, texts=[t for t, _ in theory_texts])

    return ScenarioFile(name, cplx, model, theory)


def render_scenario(sf: ScenarioFile) -> str:
    """Print a scenario file that parses back to the same objects."""
    cplx = sf.cplx
    lines = [f"scenario {sf.name}"]
    seen = {}
    for x in cplx.variables:
        d = cplx.domain(x)
        if d.name not in seen:
            seen[d.name] = d
            lines.append(f"domain {d.name} = {{ {' '.join(d.values)} }}")
    for dname, d in seen.items():
        group = [x for x in cplx.variables if cplx.domain(x).name == dname]
        lines.append(f"var {' '.join(group)} : {dname}")
    ctxs = " ".join("{ " + " ".join(cplx.sort_vars(F)) + " }" for F in cplx.facets)
    lines.append(f"context {ctxs}")
    if sf.model is not None:
        for F in cplx.facets:
            strings = sorted(section_str(cplx, F, t) for t in sf.model.at(F))
            lines.append(
                "sections { " + " ".join(cplx.sort_vars(F)) + " } = { " + " ".join(strings) + " }"
            )
        from .model import restrict_tuples

        for U in cplx.members():
            if U in cplx.facets:
                continue
            induced = set()
            for F in cplx.facets:
                if U <= F:
                    induced |= restrict_tuples(cplx, sf.model.at(F), U, F)
            if sf.model.at(U) != induced:
                strings = sorted(section_str(cplx, U, t) for t in sf.model.at(U))
                lines.append(
                    "override { " + " ".join(cplx.sort_vars(U)) + " } = { "
                    + " ".join(strings) + " }"
                )
    if sf.theory is not None:
        body = " ; ".join(sf.theory.texts)
        lines.append(f"theory {{ {body} }}")
    return "\n".join(lines) + "\n"
