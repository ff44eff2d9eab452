"""Theory-induced models, the no-signalling interior, and local entailment.

The entailment decision runs in three stages: build the largest pre-model of
a theory (per-context meets of denotations), carve out its no-signalling
interior by image/preimage propagation over codimension-1 context pairs, and
read the verdict off the interior.  The propagation events double as the
provenance from which derivation traces are reconstructed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FragmentError
from .logic import Theory, denote, free_vars
from .model import (
    PresheafModel,
    full_product,
    is_no_signalling,
    proj_indices,
    restrict_tuples,
)
from .scenario import SimplicialComplex


def mm(theory: Theory) -> PresheafModel:
    """The largest pre-model of the theory: per-context meets of denotations."""
    cplx = theory.cplx
    sections = {}
    for U in cplx.members():
        S = full_product(cplx, U)
        for phi in theory.gamma_at(U):
            S &= denote(phi, cplx, U, theory.sig)
        sections[U] = S
    return PresheafModel(cplx, sections)


def is_saturated(theory: Theory) -> bool:
    """True iff the theory's pre-model is already no-signalling: every
    context's consequences include everything projectible from above."""
    return bool(is_no_signalling(mm(theory)))


@dataclass(frozen=True)
class FixpointEvent:
    """One propagation event: a context's constraint tightened (or seeded)."""

    index: int
    context: frozenset
    constraint: frozenset  # section tuples over the context
    premises: tuple  # ("formula", i) or ("step", event index)
    direction: str  # "initial" | "project-down" | "lift-up"


@dataclass(frozen=True)
class InteriorResult:
    model: PresheafModel
    events: tuple  # tuple[FixpointEvent, ...]
    iterations: int  # full sweeps over codim-1 pairs, final quiet sweep included
    removed: dict  # (context, section) -> event index that removed it
    latest: dict  # context -> index of its newest event


def ns_interior(model: PresheafModel, initial_premises: dict | None = None) -> InteriorResult:
    """Greatest fixpoint of image/preimage propagation over codim-1 pairs.

    The result is the largest no-signalling subpresheaf of the input.
    `initial_premises` optionally attributes each context's starting
    constraint to formula indices (used for trace reconstruction).
    """
    cplx = model.cplx
    state = {U: set(model.at(U)) for U in cplx.members()}
    events = []
    latest = {}
    removed = {}

    def emit(U, constraint, premises, direction):
        ev = FixpointEvent(len(events), U, frozenset(constraint), tuple(premises), direction)
        events.append(ev)
        latest[U] = ev.index
        return ev

    for U in cplx.members():
        prem = tuple(("formula", i) for i in (initial_premises or {}).get(U, ()))
        emit(U, state[U], prem, "initial")

    pairs = [
        (U, V, proj_indices(cplx, U, V))
        for U, V in cplx.codim1_pairs()
    ]
    iterations = 0
    changed = True
    while changed:
        changed = False
        iterations += 1
        for U, V, idx in pairs:
            img = {tuple(s[i] for i in idx) for s in state[V]}
            new_u = state[U] & img
            if new_u != state[U]:
                ev = emit(U, new_u, (("step", latest[V]), ("step", latest[U])), "project-down")
                for s in state[U] - new_u:
                    removed[(U, s)] = ev.index
                state[U] = new_u
                changed = True
            new_v = {s for s in state[V] if tuple(s[i] for i in idx) in state[U]}
            if new_v != state[V]:
                ev = emit(V, new_v, (("step", latest[U]), ("step", latest[V])), "lift-up")
                for s in state[V] - new_v:
                    removed[(V, s)] = ev.index
                state[V] = new_v
                changed = True

    interior = PresheafModel(cplx, {U: frozenset(S) for U, S in state.items()}, check=False)
    return InteriorResult(interior, tuple(events), iterations, removed, dict(latest))


# ---------------------------------------------------------------------------
# derivation traces

@dataclass(frozen=True)
class TraceStep:
    context: frozenset
    constraint: frozenset
    premises: tuple  # ("formula", i) or ("step", local step index)
    direction: str


@dataclass(frozen=True)
class DerivationTrace:
    steps: tuple  # tuple[TraceStep, ...]
    goal_context: frozenset
    goal: object  # Formula

    def step_at(self, U) -> TraceStep | None:
        """Last step whose context is U, if any."""
        hit = None
        for st in self.steps:
            if st.context == frozenset(U):
                hit = st
        return hit


def _slice_trace(result: InteriorResult, goal_context, goal) -> DerivationTrace:
    """Backward slice of the fixpoint events ending at the goal context."""
    needed = set()
    stack = [result.latest[frozenset(goal_context)]]
    while stack:
        i = stack.pop()
        if i in needed:
            continue
        needed.add(i)
        for kind, ref in result.events[i].premises:
            if kind == "step":
                stack.append(ref)
    order = sorted(needed)
    renumber = {old: new for new, old in enumerate(order)}
    steps = []
    for old in order:
        ev = result.events[old]
        premises = tuple(
            (kind, renumber[ref] if kind == "step" else ref)
            for kind, ref in ev.premises
        )
        steps.append(TraceStep(ev.context, ev.constraint, premises, ev.direction))
    return DerivationTrace(tuple(steps), frozenset(goal_context), goal)


def validate_trace(trace: DerivationTrace, theory: Theory) -> bool:
    """Re-derive every step from its premises inside its single context."""
    cplx = theory.cplx
    for n, st in enumerate(trace.steps):
        step_sets = []
        formula_sets = []
        for kind, ref in st.premises:
            if kind == "step":
                if ref >= n:
                    return False
                step_sets.append(trace.steps[ref])
            else:
                formula_sets.append(theory.formulas[ref])
        if st.direction == "initial":
            expected = full_product(cplx, st.context)
            for phi in formula_sets:
                if not free_vars(phi) <= st.context:
                    return False
                expected &= denote(phi, cplx, st.context, theory.sig)
            if st.constraint != expected:
                return False
        elif st.direction == "project-down":
            upper, prev = step_sets
            if not (st.context <= upper.context and prev.context == st.context):
                return False
            expected = prev.constraint & restrict_tuples(
                cplx, upper.constraint, st.context, upper.context
            )
            if st.constraint != expected:
                return False
        elif st.direction == "lift-up":
            lower, prev = step_sets
            if not (lower.context <= st.context and prev.context == st.context):
                return False
            idx = proj_indices(cplx, lower.context, st.context)
            expected = frozenset(
                s for s in prev.constraint
                if tuple(s[i] for i in idx) in lower.constraint
            )
            if st.constraint != expected:
                return False
        else:
            return False
    last = trace.step_at(trace.goal_context)
    if last is None:
        return False
    target = denote(trace.goal, theory.cplx, trace.goal_context, theory.sig)
    return last.constraint <= target


# ---------------------------------------------------------------------------
# the entailment decision

@dataclass(frozen=True)
class EntailmentResult:
    holds: bool
    interior: PresheafModel
    trace: DerivationTrace | None  # on success
    countermodel: PresheafModel | None  # on failure
    failing_context: frozenset | None


def inchworm_entails(theory: Theory, goal) -> EntailmentResult:
    """Decide local entailment of the goal from the theory.

    The verdict is satisfaction of the goal by the no-signalling interior of
    the theory's pre-model; the interior is itself the countermodel when the
    verdict is negative.
    """
    cplx = theory.cplx
    fv = free_vars(goal)
    if not cplx.contains(fv):
        raise FragmentError(
            f"free variables {sorted(fv)} of the goal do not form a member context"
        )
    premises = {U: tuple(theory.indices_at(U)) for U in cplx.members()}
    result = ns_interior(mm(theory), initial_premises=premises)
    D = result.model
    failing = None
    for U in cplx.members():
        if fv <= U and not D.at(U) <= denote(goal, cplx, U, theory.sig):
            failing = U
            break
    if failing is not None:
        return EntailmentResult(False, D, None, D, failing)
    goal_ctx = min((U for U in cplx.members() if fv <= U), key=cplx._ctx_key)
    trace = _slice_trace(result, goal_ctx, goal)
    return EntailmentResult(True, D, trace, None, None)


# ---------------------------------------------------------------------------
# filter models (principal generators)

@dataclass(frozen=True)
class FilterModel:
    """Context-indexed principal filters, given by their generators."""

    cplx: SimplicialComplex
    generators: dict  # Context -> frozenset of section tuples

    def models(self, phi, sig=None) -> bool:
        """G |= phi: the denotation belongs to the filter at every suitable
        context, i.e. contains the generator."""
        from .logic import signature_for

        sig = sig or signature_for(self.cplx)
        fv = free_vars(phi)
        return all(
            self.generators[U] <= denote(phi, self.cplx, U, sig)
            for U in self.cplx.members()
            if fv <= U
        )


def filtmm(theory: Theory) -> FilterModel:
    """The minimal filter model of the theory: principal filters generated by
    the no-signalling interior of its pre-model."""
    interior = ns_interior(mm(theory)).model
    return FilterModel(theory.cplx, {U: interior.at(U) for U in theory.cplx.members()})


def is_filter_model(G: FilterModel, theory: Theory) -> bool:
    """Generators must be image-compatible across all context pairs and lie
    inside every theory formula's denotation in its contexts."""
    cplx = G.cplx
    if cplx != theory.cplx:
        return False
    for V in cplx.members():
        for U in cplx.faces_of(V):
            if U == V:
                continue
            if restrict_tuples(cplx, G.generators[V], U, V) != G.generators[U]:
                return False
    for i, phi in enumerate(theory.formulas):
        fv = free_vars(phi)
        for U in cplx.members():
            if fv <= U and not G.generators[U] <= denote(phi, cplx, U, theory.sig):
                return False
    return True


# ---------------------------------------------------------------------------
# spiral demonstration (truncated ordered domain)

@dataclass(frozen=True)
class SpiralReport:
    k: int
    interior_empty: bool
    iterations: int


def spiral_demo(k: int, drop_positivity: bool = False) -> SpiralReport:
    """Run the spiral theory over the cyclic ordered domain {0..k-1}.

    The equations chain the four variables around the square while the
    successor constraint shifts by one each lap, so the interior empties out
    only after a number of sweeps that grows with k.  Over the (out of
    scope) infinite domain the same chain never terminates, which is why
    falsity is not locally derivable there.
    """
    from .examples import spiral

    if k < 2:
        raise ValueError("k must be at least 2")
    theory = spiral(k, drop_positivity=drop_positivity).theory
    result = ns_interior(mm(theory))
    return SpiralReport(k, result.model.is_empty, result.iterations)
