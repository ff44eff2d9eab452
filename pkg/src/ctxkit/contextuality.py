"""Global sections via backtracking join, and the contextuality verdicts."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import ModelError, ResourceLimitError
from .model import PresheafModel, Section, max_product, proj_indices
from .scenario import Context


def _constraint_schedule(model: PresheafModel):
    """For each prefix length of the canonical variable order, the member
    contexts that become fully assigned exactly at that length."""
    cplx = model.cplx
    order = {x: i for i, x in enumerate(cplx.variables)}
    sched = [[] for _ in range(len(cplx.variables) + 1)]
    for U in cplx.members():
        if not U:
            continue
        last = max(order[x] for x in U)
        sched[last + 1].append(U)
    # most constrained first: fewer admitted sections prune earlier
    for lst in sched:
        lst.sort(key=lambda U: (len(model.at(U)), sorted(U)))
    return sched


def global_sections(model: PresheafModel) -> list[Section]:
    """All assignments over X whose restriction to every member context is
    admitted.  Variable-by-variable backtracking in canonical order."""
    cplx = model.cplx
    X = cplx.variables
    if model.at(frozenset()) == frozenset():
        return []
    sched = _constraint_schedule(model)
    checks = [
        [(U, proj_indices(cplx, U, X), model.at(U)) for U in sched[k]]
        for k in range(len(X) + 1)
    ]
    out = []
    values = [0] * len(X)

    def assign(k):
        if k > 0:
            for _, idx, allowed in checks[k]:
                if tuple(values[i] for i in idx) not in allowed:
                    return
        if k == len(X):
            out.append(tuple(values))
            return
        for v in range(cplx.domain(X[k]).size):
            values[k] = v
            assign(k + 1)

    assign(0)
    out.sort()
    return [Section(X, t) for t in out]


def global_sections_bruteforce(model: PresheafModel) -> list[Section]:
    """Exhaustive filter of the full product; the oracle for the join."""
    cplx = model.cplx
    X = cplx.variables
    size = 1
    for x in X:
        size *= cplx.domain(x).size
    if size > max_product():
        raise ResourceLimitError(f"global product has {size} cells, above the guard")
    if model.at(frozenset()) == frozenset():
        return []
    checks = [(proj_indices(cplx, U, X), model.at(U)) for U in cplx.members() if U]
    out = []
    for t in sorted(product(*(range(cplx.domain(x).size) for x in X))):
        if all(tuple(t[i] for i in idx) in allowed for idx, allowed in checks):
            out.append(Section(X, t))
    return out


def extend_section(model: PresheafModel, s: Section) -> Section | None:
    """First global section (canonical order) extending s, or None."""
    if s.values not in model.at(s.context):
        raise ModelError(f"section {s.values} over {list(s.vars)} is not admitted")
    target = s.assignment()
    for g in global_sections(model):
        ga = g.assignment()
        if all(ga[x] == v for x, v in target.items()):
            return g
    return None


@dataclass(frozen=True)
class ContextualityReport:
    global_sections: tuple  # tuple[Section, ...]
    logically_contextual: bool
    strongly_contextual: bool
    empty_model: bool
    non_extending: dict  # Context -> tuple[Section, ...]


def is_logically_contextual(model: PresheafModel):
    """(verdict, non-extending witnesses per context)."""
    cplx = model.cplx
    globals_ = global_sections(model)
    images = {U: set() for U in cplx.members()}
    for g in globals_:
        for U in cplx.members():
            images[U].add(g.restrict(U).values)
    non_extending = {}
    for U in cplx.members():
        vs = cplx.sort_vars(U)
        missing = sorted(model.at(U) - images[U])
        if missing:
            non_extending[U] = tuple(Section(vs, t) for t in missing)
    return bool(non_extending), non_extending


def is_strongly_contextual(model: PresheafModel) -> bool:
    """No global section at all; the everywhere-empty model is excluded."""
    if model.is_empty:
        return False
    return not global_sections(model)


def contextuality_report(model: PresheafModel) -> ContextualityReport:
    globals_ = tuple(global_sections(model))
    logical, non_ext = is_logically_contextual(model)
    return ContextualityReport(
        global_sections=globals_,
        logically_contextual=logical,
        strongly_contextual=is_strongly_contextual(model),
        empty_model=model.is_empty,
        non_extending=non_ext,
    )
