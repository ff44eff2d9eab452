"""Finite many-sorted logic over a scenario: AST, parser, and denotations.

A formula denotes, in each context U containing its free variables, the set
of sections over U that satisfy it.  The language has equality, order atoms
on ordered domains, declared function/relation symbols with finite tables,
the builtin modular addition ``(+)`` (XOR on two-valued domains), the
propositional connectives, and a sorted existential quantifier.

Boolean sugar: over a two-valued domain a bare variable atom ``x`` stands
for ``x = 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product

from .errors import FormulaError, FragmentError, ParseError, ResourceLimitError
from .model import max_product
from .scenario import Domain, SimplicialComplex


# ---------------------------------------------------------------------------
# signature

@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    arg_domains: tuple  # tuple[Domain, ...]
    result: Domain
    table: dict  # tuple[int, ...] -> int, total

    def __post_init__(self):
        cells = 1
        for d in self.arg_domains:
            cells *= d.size
        if len(self.table) != cells:
            raise FormulaError(f"lookup table for {self.name!r} is not total")


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    arg_domains: tuple
    tuples: frozenset  # frozenset[tuple[int, ...]]


@dataclass
class Signature:
    """Domains plus declared symbols.  Every domain value doubles as a
    constant symbol, so any section set is syntactically definable."""

    domains: dict = field(default_factory=dict)  # name -> Domain
    functions: dict = field(default_factory=dict)  # name -> FunctionSymbol
    relations: dict = field(default_factory=dict)  # name -> RelationSymbol
    ordered: set = field(default_factory=set)  # domain names admitting < and >

    def add_domain(self, domain: Domain, ordered: bool = False):
        self.domains[domain.name] = domain
        if ordered:
            self.ordered.add(domain.name)

    def constant(self, name: str, expected: Domain | None = None):
        """Resolve a value constant, preferring the expected domain."""
        hits = []
        cands = [expected] if expected is not None else list(self.domains.values())
        for d in cands:
            if d is not None and name in d.values:
                hits.append((d, d.index_of(name)))
        if expected is not None and not hits:
            raise FormulaError(f"{name!r} is not a value of domain {expected.name!r}")
        if not hits:
            return None
        return hits[0]


def signature_for(cplx: SimplicialComplex, ordered: bool = False) -> Signature:
    sig = Signature()
    for d in {cplx.domain(x).name: cplx.domain(x) for x in cplx.variables}.values():
        sig.add_domain(d, ordered=ordered)
    return sig


# ---------------------------------------------------------------------------
# terms and formulas

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    domain: Domain
    index: int


@dataclass(frozen=True)
class App:
    name: str  # "(+)" builtin or a declared function symbol
    args: tuple


Term = (Var, Const, App)


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Exists:
    var: str
    domain: Domain
    body: object


@dataclass(frozen=True)
class Compare:
    op: str  # "=", "<", ">"
    left: object
    right: object


@dataclass(frozen=True)
class RelAtom:
    name: str
    args: tuple


TOP = Top()
BOT = Bot()


def _term_domain(t, types: dict, sig: Signature) -> Domain:
    if isinstance(t, Var):
        try:
            return types[t.name]
        except KeyError:
            raise FormulaError(f"unknown variable {t.name!r}") from None
    if isinstance(t, Const):
        return t.domain
    if isinstance(t, App):
        if t.name == "(+)":
            d0 = _term_domain(t.args[0], types, sig)
            d1 = _term_domain(t.args[1], types, sig)
            if d0 != d1:
                raise FormulaError("(+) applied across different domains")
            return d0
        fn = sig.functions.get(t.name)
        if fn is None:
            raise FormulaError(f"unknown function symbol {t.name!r}")
        if len(t.args) != len(fn.arg_domains):
            raise FormulaError(f"{t.name!r} expects {len(fn.arg_domains)} arguments")
        for a, d in zip(t.args, fn.arg_domains):
            if _term_domain(a, types, sig) != d:
                raise FormulaError(f"ill-sorted argument to {t.name!r}")
        return fn.result
    raise FormulaError(f"not a term: {t!r}")


def check_sorts(phi, types: dict, sig: Signature) -> None:
    """Raise FormulaError unless phi is well-sorted under the variable typing."""
    if isinstance(phi, (Top, Bot)):
        return
    if isinstance(phi, Not):
        check_sorts(phi.body, types, sig)
    elif isinstance(phi, (And, Or)):
        check_sorts(phi.left, types, sig)
        check_sorts(phi.right, types, sig)
    elif isinstance(phi, Exists):
        check_sorts(phi.body, {**types, phi.var: phi.domain}, sig)
    elif isinstance(phi, Compare):
        dl = _term_domain(phi.left, types, sig)
        dr = _term_domain(phi.right, types, sig)
        if dl != dr:
            raise FormulaError(f"comparison across domains {dl.name!r} and {dr.name!r}")
        if phi.op in ("<", ">") and dl.name not in sig.ordered:
            raise FormulaError(f"domain {dl.name!r} is not ordered")
    elif isinstance(phi, RelAtom):
        rel = sig.relations.get(phi.name)
        if rel is None:
            raise FormulaError(f"unknown relation symbol {phi.name!r}")
        if len(phi.args) != len(rel.arg_domains):
            raise FormulaError(f"{phi.name!r} expects {len(rel.arg_domains)} arguments")
        for a, d in zip(phi.args, rel.arg_domains):
            if _term_domain(a, types, sig) != d:
                raise FormulaError(f"ill-sorted argument to {phi.name!r}")
    else:
        raise FormulaError(f"not a formula: {phi!r}")


def _term_vars(t, bound):
    if isinstance(t, Var):
        return set() if t.name in bound else {t.name}
    if isinstance(t, Const):
        return set()
    return set().union(*(_term_vars(a, bound) for a in t.args)) if t.args else set()


def free_vars(phi) -> frozenset:
    """Free variables of a formula (bound names excluded)."""

    def go(phi, bound):
        if isinstance(phi, (Top, Bot)):
            return set()
        if isinstance(phi, Not):
            return go(phi.body, bound)
        if isinstance(phi, (And, Or)):
            return go(phi.left, bound) | go(phi.right, bound)
        if isinstance(phi, Exists):
            return go(phi.body, bound | {phi.var})
        if isinstance(phi, Compare):
            return _term_vars(phi.left, bound) | _term_vars(phi.right, bound)
        if isinstance(phi, RelAtom):
            return set().union(*(_term_vars(a, bound) for a in phi.args)) if phi.args else set()
        raise FormulaError(f"not a formula: {phi!r}")

    return frozenset(go(phi, frozenset()))


def in_fragment(phi, cplx: SimplicialComplex) -> bool:
    """True iff the free variables form a member context."""
    fv = free_vars(phi)
    if any(x not in cplx.domains for x in fv):
        return False
    return cplx.contains(fv)


# ---------------------------------------------------------------------------
# evaluation

def _eval_term(t, env: dict, sig: Signature) -> int:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return t.index
    if t.name == "(+)":
        d = _eval_term_domain_cache(t, env, sig)
        return (_eval_term(t.args[0], env, sig) + _eval_term(t.args[1], env, sig)) % d
    fn = sig.functions[t.name]
    return fn.table[tuple(_eval_term(a, env, sig) for a in t.args)]


def _eval_term_domain_cache(t, env, sig):
    # modulus of the builtin addition: size of the (common) argument domain
    a = t.args[0]
    while isinstance(a, App):
        a = a.args[0]
    if isinstance(a, Const):
        return a.domain.size
    return env["__domains__"][a.name].size


def eval_formula(phi, env: dict, sig: Signature) -> bool:
    """Truth of phi under a total assignment of its variables."""
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Not):
        return not eval_formula(phi.body, env, sig)
    if isinstance(phi, And):
        return eval_formula(phi.left, env, sig) and eval_formula(phi.right, env, sig)
    if isinstance(phi, Or):
        return eval_formula(phi.left, env, sig) or eval_formula(phi.right, env, sig)
    if isinstance(phi, Exists):
        doms = dict(env["__domains__"])
        doms[phi.var] = phi.domain
        for v in range(phi.domain.size):
            inner = {**env, phi.var: v, "__domains__": doms}
            if eval_formula(phi.body, inner, sig):
                return True
        return False
    if isinstance(phi, Compare):
        lv = _eval_term(phi.left, env, sig)
        rv = _eval_term(phi.right, env, sig)
        if phi.op == "=":
            return lv == rv
        return lv < rv if phi.op == "<" else lv > rv
    if isinstance(phi, RelAtom):
        rel = sig.relations[phi.name]
        return tuple(_eval_term(a, env, sig) for a in phi.args) in rel.tuples
    raise FormulaError(f"not a formula: {phi!r}")


def denote(phi, cplx: SimplicialComplex, U, sig: Signature | None = None) -> frozenset:
    """The section set of phi over U: all satisfying assignments."""
    sig = sig or signature_for(cplx)
    U = frozenset(U)
    fv = free_vars(phi)
    if not fv <= U:
        raise FormulaError(
            f"context {sorted(U)} does not cover free variables {sorted(fv)}"
        )
    vs = cplx.sort_vars(U)
    size = 1
    for x in vs:
        size *= cplx.domain(x).size
    if size > max_product():
        raise ResourceLimitError(f"denotation over {list(vs)} has {size} cells")
    doms = {x: cplx.domain(x) for x in vs}
    out = []
    for t in product(*(range(cplx.domain(x).size) for x in vs)):
        env = dict(zip(vs, t))
        env["__domains__"] = doms
        if eval_formula(phi, env, sig):
            out.append(t)
    return frozenset(out)


def global_entails(gamma, phi, cplx: SimplicialComplex, U,
                   sig: Signature | None = None) -> bool:
    """Semantic entailment within the single context U."""
    sig = sig or signature_for(cplx)
    meet = None
    for psi in gamma:
        d = denote(psi, cplx, U, sig)
        meet = d if meet is None else meet & d
    target = denote(phi, cplx, U, sig)
    if meet is None:
        from .model import full_product

        meet = full_product(cplx, U)
    return meet <= target


def satisfies(model, phi, U=None, sig: Signature | None = None) -> bool:
    """A |= phi: inclusion of the model's sections in phi's denotation.

    With U given, checks only that context; otherwise every member context
    containing the free variables.
    """
    cplx = model.cplx
    sig = sig or signature_for(cplx)
    fv = free_vars(phi)
    if U is not None:
        U = frozenset(U)
        if not fv <= U or not cplx.contains(U):
            raise FragmentError(f"{sorted(U)} is not a member context covering {sorted(fv)}")
        return model.at(U) <= denote(phi, cplx, U, sig)
    if not cplx.contains(fv):
        raise FragmentError(f"free variables {sorted(fv)} do not form a member context")
    return all(
        model.at(V) <= denote(phi, cplx, V, sig)
        for V in cplx.members()
        if fv <= V
    )


# ---------------------------------------------------------------------------
# theories

class Theory:
    """A finite formula list, each inside the contextual fragment."""

    def __init__(self, cplx: SimplicialComplex, formulas, sig: Signature | None = None,
                 texts=None):
        self.cplx = cplx
        self.sig = sig or signature_for(cplx)
        self.formulas = tuple(formulas)
        self.texts = tuple(texts) if texts is not None else tuple(
            format_formula(f) for f in self.formulas
        )
        for f in self.formulas:
            types = {x: cplx.domain(x) for x in cplx.variables}
            check_sorts(f, types, self.sig)
            if not in_fragment(f, cplx):
                raise FragmentError(
                    f"free variables {sorted(free_vars(f))} of {format_formula(f)!r} "
                    "do not form a member context"
                )

    def gamma_at(self, U) -> list:
        U = frozenset(U)
        return [f for f in self.formulas if free_vars(f) <= U]

    def indices_at(self, U) -> list[int]:
        U = frozenset(U)
        return [i for i, f in enumerate(self.formulas) if free_vars(f) <= U]

    def __len__(self):
        return len(self.formulas)


# ---------------------------------------------------------------------------
# concrete syntax

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<xor>\(\+\))
      | (?P<and>/\\)
      | (?P<or>\\/)
      | (?P<sym>[()~=<>.:;+])
      | (?P<word>[A-Za-z0-9_]+)
    )""",
    re.VERBOSE,
)

_KEYWORDS = {"top", "bot", "exists"}


def _tokenize(text: str):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", column=pos + 1)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over: quantifier < or < and < not/atom."""

    def __init__(self, text: str, sig: Signature, cplx: SimplicialComplex):
        self.text = text
        self.sig = sig
        self.cplx = cplx
        self.tokens = _tokenize(text)
        self.i = 0
        self.bound = {}  # quantifier scope: name -> Domain

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}",
                             column=pos + 1)

    def fail(self, message):
        _, val, pos = self.peek()
        raise ParseError(message + (f" near {val!r}" if val else " at end of input"),
                         column=pos + 1)

    def formula(self):
        kind, val, _ = self.peek()
        if val == "exists":
            self.next()
            kind, name, pos = self.next()
            if kind != "word":
                raise ParseError("expected a variable after 'exists'", column=pos + 1)
            self.expect(":")
            kind, dom, pos = self.next()
            domain = self.sig.domains.get(dom)
            if domain is None:
                raise ParseError(f"unknown domain {dom!r}", column=pos + 1)
            self.expect(".")
            outer = self.bound.get(name)
            self.bound[name] = domain
            body = self.formula()
            if outer is None:
                del self.bound[name]
            else:
                self.bound[name] = outer
            return Exists(name, domain, body)
        return self.disjunction()

    def disjunction(self):
        f = self.conjunction()
        while self.peek()[1] == "\\/":
            self.next()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.negation()
        while self.peek()[1] == "/\\":
            self.next()
            f = And(f, self.negation())
        return f

    def negation(self):
        if self.peek()[1] == "~":
            self.next()
            return Not(self.negation())
        return self.atom()

    def atom(self):
        kind, val, pos = self.peek()
        if val == "top":
            self.next()
            return TOP
        if val == "bot":
            self.next()
            return BOT
        if val == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "word" and val in self.sig.relations and self.tokens[self.i + 1][1] == "(":
            self.next()
            args = self.term_args()
            return RelAtom(val, args)
        left = self.term()
        op = self.peek()[1]
        if op in ("=", "<", ">"):
            self.next()
            right = self.term()
            return self.compare(op, left, right)
        # bare variable sugar over two-valued domains: x means x = 1
        if isinstance(left, Var):
            d = self.bound.get(left.name) or self.cplx.domains.get(left.name)
            if d is not None and d.size == 2:
                return Compare("=", left, Const(d, 1))
            raise ParseError(
                f"bare atom {left.name!r} needs a two-valued domain", column=pos + 1
            )
        self.fail("expected a comparison operator")

    def compare(self, op, left, right):
        left, right = self.unify(left, right)
        return Compare(op, left, right)

    def unify(self, left, right):
        """Resolve untyped constants against the opposite side's domain."""
        ld = self.side_domain(left)
        rd = self.side_domain(right)
        if ld is None and rd is None:
            raise ParseError("cannot infer domains of comparison")
        left = self.retype(left, rd or ld)
        right = self.retype(right, ld or rd)
        return left, right

    def side_domain(self, t):
        if isinstance(t, Var):
            return self.bound.get(t.name) or self.cplx.domains.get(t.name)
        if isinstance(t, Const):
            return t.domain
        if isinstance(t, App) and t.name != "(+)":
            return self.sig.functions[t.name].result
        if isinstance(t, App):
            for a in t.args:
                d = self.side_domain(a)
                if d is not None:
                    return d
        return None

    def retype(self, t, domain):
        """Re-resolve pending constants (parsed with a guessed domain)."""
        if isinstance(t, Const) and domain is not None and t.domain != domain:
            name = t.domain.values[t.index]
            if name in domain.values:
                return Const(domain, domain.index_of(name))
        if isinstance(t, App) and t.name == "(+)":
            return App("(+)", tuple(self.retype(a, domain) for a in t.args))
        return t

    def term(self):
        t = self.term_factor()
        while self.peek()[1] in ("(+)", "+"):
            self.next()
            t = App("(+)", (t, self.term_factor()))
        return t

    def term_factor(self):
        kind, val, pos = self.next()
        if kind != "word":
            raise ParseError(f"expected a term, found {val or 'end of input'!r}",
                             column=pos + 1)
        if val in self.sig.functions:
            args = self.term_args()
            return App(val, args)
        if val in self.bound or val in self.cplx.domains:
            return Var(val)
        hit = self.sig.constant(val)
        if hit is not None:
            return Const(hit[0], hit[1])
        raise ParseError(f"unknown symbol {val!r}", column=pos + 1)

    def term_args(self):
        self.expect("(")
        args = [self.term()]
        while self.peek()[1] == ";":
            self.next()
            args.append(self.term())
        self.expect(")")
        return tuple(args)


def parse_formula(text: str, cplx: SimplicialComplex, sig: Signature | None = None):
    """Parse the ASCII surface syntax into a checked AST."""
    sig = sig or signature_for(cplx)
    p = _Parser(text, sig, cplx)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {val!r}", column=pos + 1)
    types = {x: cplx.domain(x) for x in cplx.variables}
    check_sorts(f, types, sig)
    return f


# ---------------------------------------------------------------------------
# pretty printing

def format_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.domain.values[t.index]
    if t.name == "(+)":
        return f"{format_term(t.args[0])} (+) {format_term(t.args[1])}"
    return f"{t.name}({'; '.join(format_term(a) for a in t.args)})"


def format_formula(phi) -> str:
    def go(phi, parent):
        if isinstance(phi, Top):
            return "top"
        if isinstance(phi, Bot):
            return "bot"
        if isinstance(phi, Not):
            return "~" + go(phi.body, 3)
        # the binary connectives parse left-associatively, so a right
        # operand at the same precedence keeps its parentheses
        if isinstance(phi, And):
            s = f"{go(phi.left, 2)} /\\ {go(phi.right, 3)}"
            return f"({s})" if parent > 2 else s
        if isinstance(phi, Or):
            s = f"{go(phi.left, 1)} \\/ {go(phi.right, 2)}"
            return f"({s})" if parent > 1 else s
        if isinstance(phi, Exists):
            s = f"exists {phi.var}:{phi.domain.name} . {go(phi.body, 0)}"
            return f"({s})" if parent > 0 else s
        if isinstance(phi, Compare):
            return f"{format_term(phi.left)} {phi.op} {format_term(phi.right)}"
        if isinstance(phi, RelAtom):
            return f"{phi.name}({'; '.join(format_term(a) for a in phi.args)})"
        raise FormulaError(f"not a formula: {phi!r}")

    return go(phi, 0)


def constraint_formula(cplx: SimplicialComplex, U, sections) -> str:
    """Render a section set as a DNF over value-constant atoms."""
    vs = cplx.sort_vars(U)
    if not sections:
        return "bot"
    from .model import full_product

    if frozenset(sections) == full_product(cplx, U):
        return "top"
    clauses = []
    for t in sorted(sections):
        atoms = [f"{x} = {cplx.domain(x).values[v]}" for x, v in zip(vs, t)]
        clauses.append(" /\\ ".join(atoms) if atoms else "top")
    if len(clauses) == 1:
        return clauses[0]
    return " \\/ ".join(f"({c})" if " /\\ " in c else c for c in clauses)
