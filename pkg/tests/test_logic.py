import random

import pytest

from ctxkit.errors import FormulaError, FragmentError, ParseError
from ctxkit.examples import example, hardy, pr_box, spiral
from ctxkit.logic import (
    And,
    Compare,
    Const,
    Exists,
    Not,
    Or,
    Theory,
    Var,
    constraint_formula,
    denote,
    format_formula,
    free_vars,
    global_entails,
    in_fragment,
    parse_formula,
    satisfies,
    signature_for,
)
from ctxkit.model import full_product
from ctxkit.scenario import BOOL

from conftest import random_bool_complex, random_formula_text, random_member_context


# ---------------------------------------------------------------------------
# parsing

def test_parse_atoms(square):
    sig = signature_for(square)
    f = parse_formula("a1 = 1", square, sig)
    assert f == Compare("=", Var("a1"), Const(BOOL, 1))
    # bare-variable sugar over two-valued domains
    assert parse_formula("a1", square, sig) == f
    assert parse_formula("~a1", square, sig) == Not(f)


def test_parse_precedence(square):
    sig = signature_for(square)
    f = parse_formula("a1 \\/ a2 /\\ b1", square, sig)
    assert isinstance(f, Or)
    assert isinstance(f.right, And)
    g = parse_formula("(a1 \\/ a2) /\\ b1", square, sig)
    assert isinstance(g, And)


def test_parse_xor(square):
    sig = signature_for(square)
    f = parse_formula("a1 (+) b1 = 0", square, sig)
    assert isinstance(f, Compare)
    # '+' is an alias for the builtin addition
    assert parse_formula("a1 + b1 = 0", square, sig) == f


def test_parse_exists(square):
    sig = signature_for(square)
    f = parse_formula("exists q:bool . q (+) a1 = 1", square, sig)
    assert isinstance(f, Exists)
    assert f.var == "q" and f.domain == BOOL
    assert free_vars(f) == frozenset({"a1"})


def test_exists_shadows_scenario_variable(square):
    sig = signature_for(square)
    f = parse_formula("exists a1:bool . a1 = b1", square, sig)
    assert free_vars(f) == frozenset({"b1"})
    # the bound copy ranges over everything, so this is a tautology over {b1}
    assert denote(f, square, {"b1"}, sig) == frozenset({(0,), (1,)})


def test_parse_top_bot(square):
    sig = signature_for(square)
    assert denote(parse_formula("top", square, sig), square, frozenset(), sig) == frozenset({()})
    assert denote(parse_formula("bot", square, sig), square, frozenset(), sig) == frozenset()


def test_parse_errors(square):
    sig = signature_for(square)
    with pytest.raises(ParseError):
        parse_formula("a1 =", square, sig)
    with pytest.raises(ParseError):
        parse_formula("a1 = 1 extra", square, sig)
    with pytest.raises(ParseError):
        parse_formula("unknown_sym = 1", square, sig)
    with pytest.raises(ParseError):
        parse_formula("a1 @ b1", square, sig)
    err = None
    try:
        parse_formula("a1 = $", square, sig)
    except ParseError as e:
        err = e
    assert err is not None and err.column == 6


def test_order_atoms_need_ordered_domain(square):
    sig = signature_for(square)  # unordered
    with pytest.raises((FormulaError, ParseError)):
        parse_formula("a1 > 0", square, sig)
    sp = spiral(3)
    f = parse_formula("b2 > 0", sp.cplx, sp.theory.sig)
    assert denote(f, sp.cplx, {"b2"}, sp.theory.sig) == frozenset({(1,), (2,)})


def test_format_parse_round_trip():
    rng = random.Random(23)
    for _ in range(60):
        cplx = random_bool_complex(rng)
        sig = signature_for(cplx)
        U = random_member_context(rng, cplx)
        f = parse_formula(random_formula_text(rng, cplx, U), cplx, sig)
        assert parse_formula(format_formula(f), cplx, sig) == f


# ---------------------------------------------------------------------------
# denotation and satisfaction

def test_denote_examples(square):
    sig = signature_for(square)
    U = frozenset({"a1", "b1"})
    f = parse_formula("a1 (+) b1 = 0", square, sig)
    assert denote(f, square, U, sig) == frozenset({(0, 0), (1, 1)})
    g = parse_formula("~a1 \\/ ~b1", square, sig)
    assert denote(g, square, U, sig) == frozenset({(0, 0), (0, 1), (1, 0)})


def test_denote_requires_covering_context(square):
    sig = signature_for(square)
    f = parse_formula("a1 = b1", square, sig)
    with pytest.raises(FormulaError):
        denote(f, square, {"a1"}, sig)


def test_denote_homomorphism():
    """Denotation sends the connectives to the Boolean set operations."""
    rng = random.Random(29)
    for _ in range(40):
        cplx = random_bool_complex(rng)
        sig = signature_for(cplx)
        U = random_member_context(rng, cplx)
        f = parse_formula(random_formula_text(rng, cplx, U), cplx, sig)
        g = parse_formula(random_formula_text(rng, cplx, U), cplx, sig)
        full = full_product(cplx, U)
        df, dg = denote(f, cplx, U, sig), denote(g, cplx, U, sig)
        assert denote(And(f, g), cplx, U, sig) == df & dg
        assert denote(Or(f, g), cplx, U, sig) == df | dg
        assert denote(Not(f), cplx, U, sig) == full - df


def test_denote_context_stability():
    """The denotation over a larger context is the preimage of the smaller."""
    rng = random.Random(31)
    from ctxkit.model import restrict_tuples

    for _ in range(40):
        cplx = random_bool_complex(rng)
        sig = signature_for(cplx)
        V = random_member_context(rng, cplx)
        f = parse_formula(random_formula_text(rng, cplx, V), cplx, sig)
        fv = free_vars(f)
        dv = denote(f, cplx, V, sig)
        du = denote(f, cplx, fv, sig)
        preimage = frozenset(
            t for t in full_product(cplx, V)
            if tuple(t[i] for i in _proj(cplx, fv, V)) in du
        )
        assert dv == preimage
        assert restrict_tuples(cplx, dv, fv, V) <= du


def _proj(cplx, U, V):
    from ctxkit.model import proj_indices

    return proj_indices(cplx, U, V)


def test_satisfies_examples():
    prb = pr_box()
    sig = prb.theory.sig
    f = parse_formula("a2 (+) b2 = 1", prb.cplx, sig)
    assert satisfies(prb.model, f, {"a2", "b2"}, sig)
    assert satisfies(prb.model, f, sig=sig)
    hd = hardy()
    g = parse_formula("~a1 \\/ ~b1", hd.cplx, sig)
    assert not satisfies(hd.model, g, {"a1", "b1"}, sig)


def test_satisfies_fragment_errors(square):
    sig = signature_for(square)
    f = parse_formula("a1 = a2", square, sig)
    with pytest.raises(FragmentError):
        satisfies(pr_box().model, f, sig=sig)
    g = parse_formula("a1", square, sig)
    with pytest.raises(FragmentError):
        satisfies(pr_box().model, g, {"a1", "a2"}, sig)


def test_global_entails(square):
    sig = signature_for(square)
    U = frozenset({"a1", "b1"})
    gamma = [parse_formula("a1 (+) b1 = 0", square, sig)]
    assert global_entails(gamma, parse_formula("a1 = b1", square, sig), square, U, sig)
    assert not global_entails(gamma, parse_formula("a1 = 1", square, sig), square, U, sig)
    assert global_entails([], parse_formula("top", square, sig), square, U, sig)


def test_in_fragment(square):
    sig = signature_for(square)
    assert in_fragment(parse_formula("a1 = b1", square, sig), square)
    assert not in_fragment(parse_formula("a1 = a2", square, sig), square)
    assert in_fragment(parse_formula("top", square, sig), square)


def test_theory_enforces_fragment(square):
    sig = signature_for(square)
    with pytest.raises(FragmentError):
        Theory(square, [parse_formula("a1 = a2", square, sig)], sig)


def test_theory_gamma_at(square):
    th = pr_box().theory
    U = frozenset({"a1", "b1"})
    assert th.indices_at(U) == [0]
    assert th.indices_at(frozenset({"a1"})) == []
    assert len(th.gamma_at(U)) == 1
    assert len(th) == 4


# ---------------------------------------------------------------------------
# persistence

def test_upward_persistence_random_models():
    """Satisfaction at a context persists to any larger member context, with
    no assumption on the model."""
    rng = random.Random(37)
    from conftest import random_model

    checked = 0
    for _ in range(60):
        cplx = random_bool_complex(rng)
        sig = signature_for(cplx)
        model = random_model(rng, cplx)
        V = random_member_context(rng, cplx)
        f = parse_formula(random_formula_text(rng, cplx, V), cplx, sig)
        fv = free_vars(f)
        contexts = [U for U in cplx.members() if fv <= U]
        for U in contexts:
            if not satisfies(model, f, U, sig):
                continue
            for W in contexts:
                if U <= W:
                    checked += 1
                    assert satisfies(model, f, W, sig)
    assert checked > 50


def test_downward_persistence_no_signalling():
    """On no-signalling models satisfaction also descends to subcontexts."""
    rng = random.Random(41)
    from ctxkit.inchworm import ns_interior
    from conftest import random_model

    checked = 0
    for _ in range(60):
        cplx = random_bool_complex(rng)
        sig = signature_for(cplx)
        model = ns_interior(random_model(rng, cplx)).model
        V = random_member_context(rng, cplx)
        f = parse_formula(random_formula_text(rng, cplx, V), cplx, sig)
        fv = free_vars(f)
        contexts = [U for U in cplx.members() if fv <= U]
        for W in contexts:
            if not satisfies(model, f, W, sig):
                continue
            for U in contexts:
                if U <= W:
                    checked += 1
                    assert satisfies(model, f, U, sig)
    assert checked > 50


def test_downward_persistence_fails_with_signalling():
    """The recorded counterexample: a signalling model satisfies ~b1 at
    {a2, b1} but not at {b1}."""
    ex = example("signal_e")
    sig = ex.theory.sig
    f = parse_formula("~b1", ex.cplx, sig)
    assert satisfies(ex.model, f, {"a2", "b1"}, sig)
    assert not satisfies(ex.model, f, {"b1"}, sig)


# ---------------------------------------------------------------------------
# rendering

def test_constraint_formula(square):
    U = frozenset({"a1", "b1"})
    assert constraint_formula(square, U, frozenset()) == "bot"
    assert constraint_formula(square, U, full_product(square, U)) == "top"
    s = constraint_formula(square, U, frozenset({(0, 0), (1, 1)}))
    sig = signature_for(square)
    assert denote(parse_formula(s, square, sig), square, U, sig) == frozenset(
        {(0, 0), (1, 1)}
    )


def test_constraint_formula_round_trips():
    rng = random.Random(43)
    for _ in range(30):
        cplx = random_bool_complex(rng)
        sig = signature_for(cplx)
        U = random_member_context(rng, cplx)
        pool = sorted(full_product(cplx, U))
        S = frozenset(rng.sample(pool, rng.randint(0, len(pool))))
        text = constraint_formula(cplx, U, S)
        assert denote(parse_formula(text, cplx, sig), cplx, U, sig) == S
