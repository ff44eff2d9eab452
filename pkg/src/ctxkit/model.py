"""Sections, presheaf models, the bundle view, and the no-signalling check.

A model assigns to every member context U a set of sections (tuples of value
indices in canonical variable order).  Models are immutable after
construction and always satisfy the subpresheaf law: restricting a section
set of a larger context lands inside the section set of any smaller one.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import product

from .errors import DegenerateBundleError, ModelError, ResourceLimitError, ScenarioError
from .scenario import Context, SimplicialComplex

DEFAULT_MAX_PRODUCT = 1 << 20


def max_product() -> int:
    raw = os.environ.get("CTXKIT_MAX_PRODUCT")
    return int(raw) if raw else DEFAULT_MAX_PRODUCT


@dataclass(frozen=True)
class Section:
    """An assignment of value indices to the variables of one context."""

    vars: tuple[str, ...]  # canonical order
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.vars) != len(self.values):
            raise ModelError("section arity mismatch")

    @property
    def context(self) -> Context:
        return frozenset(self.vars)

    def assignment(self) -> dict:
        return dict(zip(self.vars, self.values))

    def restrict(self, U) -> "Section":
        return restrict_section(self, U)


def restrict_section(s: Section, U) -> Section:
    """Project a section onto a subset of its context."""
    U = frozenset(U)
    if not U <= s.context:
        raise ModelError(f"{sorted(U)} is not a subset of the section's context")
    pairs = [(x, v) for x, v in zip(s.vars, s.values) if x in U]
    return Section(tuple(x for x, _ in pairs), tuple(v for _, v in pairs))


def proj_indices(cplx: SimplicialComplex, U, V) -> tuple[int, ...]:
    """Positions of U's variables inside V's canonical tuple (U subset of V)."""
    vs = cplx.sort_vars(V)
    pos = {x: i for i, x in enumerate(vs)}
    return tuple(pos[x] for x in cplx.sort_vars(U))


def restrict_tuples(cplx, sections, U, V) -> frozenset:
    """Image of a set of V-sections under restriction to U."""
    idx = proj_indices(cplx, U, V)
    return frozenset(tuple(s[i] for i in idx) for s in sections)


def full_product(cplx: SimplicialComplex, U) -> frozenset:
    """Every section over U; guarded against oversized contexts."""
    vs = cplx.sort_vars(U)
    size = 1
    for x in vs:
        size *= cplx.domain(x).size
    if size > max_product():
        raise ResourceLimitError(
            f"context {list(vs)} has {size} cells, above the guard {max_product()}"
        )
    return frozenset(product(*(range(cplx.domain(x).size) for x in vs)))


class PresheafModel:
    """A separated presheaf: a section set for every member context."""

    def __init__(self, cplx: SimplicialComplex, sections: dict, check: bool = True):
        self.cplx = cplx
        self._sections = {frozenset(U): frozenset(S) for U, S in sections.items()}
        members = cplx.members()
        for U in members:
            if U not in self._sections:
                raise ModelError(f"no section set for context {sorted(U)}")
        if check:
            self._validate()

    def _validate(self):
        cplx = self.cplx
        for U in cplx.members():
            vs = cplx.sort_vars(U)
            full = full_product(cplx, U)
            for s in self._sections[U]:
                if s not in full:
                    raise ModelError(f"section {s} out of range over {list(vs)}")
        for U, V in cplx.codim1_pairs():
            img = restrict_tuples(cplx, self._sections[V], U, V)
            if not img <= self._sections[U]:
                raise ModelError(
                    f"subpresheaf law fails: image of {sorted(V)} not inside {sorted(U)}"
                )

    @property
    def is_empty(self) -> bool:
        return all(not S for S in self._sections.values())

    def at(self, U) -> frozenset:
        """The section set over a member context (tuples in canonical order)."""
        U = frozenset(U)
        if not self.cplx.contains(U):
            raise ScenarioError(f"context {sorted(U)} is not in the complex")
        return self._sections[U]

    def sections_at(self, U) -> list[Section]:
        vs = self.cplx.sort_vars(U)
        return [Section(vs, t) for t in sorted(self.at(U))]

    def items(self):
        for U in self.cplx.members():
            yield U, self._sections[U]

    def __eq__(self, other):
        return (
            isinstance(other, PresheafModel)
            and self.cplx == other.cplx
            and self._sections == other._sections
        )

    def __hash__(self):
        return hash((self.cplx, tuple(sorted(self._sections.items(), key=lambda kv: sorted(kv[0])))))

    def __repr__(self):
        parts = ", ".join(
            f"{{{','.join(self.cplx.sort_vars(U))}}}:{len(S)}" for U, S in self.items()
        )
        return f"PresheafModel({parts})"


def section_set_at(model: PresheafModel, U) -> frozenset:
    return model.at(U)


def model_from_facet_sections(cplx: SimplicialComplex, facet_data: dict,
                              overrides: dict | None = None) -> PresheafModel:
    """Build a model from facet section sets; faces get the union of images.

    `overrides` may pin non-facet contexts to an explicit subset of that
    induced set (needed for theory-induced models that constrain faces).
    """
    data = {frozenset(U): frozenset(S) for U, S in facet_data.items()}
    for F in cplx.facets:
        if F not in data:
            raise ModelError(f"missing section set for facet {sorted(F)}")
    for U in data:
        if U not in cplx.facets:
            raise ModelError(f"{sorted(U)} is not a facet")
    sections = {}
    for U in cplx.members():
        if U in data:
            sections[U] = data[U]
        else:
            acc = set()
            for F in cplx.facets:
                if U <= F:
                    acc |= restrict_tuples(cplx, data[F], U, F)
            sections[U] = frozenset(acc)
    if overrides:
        for U, S in overrides.items():
            U = frozenset(U)
            if not cplx.contains(U):
                raise ScenarioError(f"override context {sorted(U)} is not in the complex")
            sections[U] = frozenset(S)
    return PresheafModel(cplx, sections)


def full_model(cplx: SimplicialComplex) -> PresheafModel:
    """The sheaf of all sections (full product at every context)."""
    return PresheafModel(cplx, {U: full_product(cplx, U) for U in cplx.members()}, check=False)


def empty_model(cplx: SimplicialComplex) -> PresheafModel:
    return PresheafModel(cplx, {U: frozenset() for U in cplx.members()}, check=False)


def is_sheaf(model: PresheafModel) -> bool:
    """True iff every member context carries the full product of values."""
    return all(model.at(U) == full_product(model.cplx, U) for U in model.cplx.members())


@dataclass(frozen=True)
class NoSignallingResult:
    ok: bool
    # (U, V, section over U with no extension in A_V)
    witnesses: tuple

    def __bool__(self):
        return self.ok


def is_no_signalling(model: PresheafModel) -> NoSignallingResult:
    """Check that every restriction map between member contexts is surjective."""
    cplx = model.cplx
    witnesses = []
    members = cplx.members()
    for V in members:
        faces = cplx.faces_of(V)
        for U in faces:
            if U == V:
                continue
            img = restrict_tuples(cplx, model.at(V), U, V)
            missing = model.at(U) - img
            vs = cplx.sort_vars(U)
            for t in sorted(missing):
                witnesses.append((U, V, Section(vs, t)))
    return NoSignallingResult(not witnesses, tuple(witnesses))


def is_subpresheaf(A: PresheafModel, B: PresheafModel) -> bool:
    """Pointwise inclusion of section sets over the same scenario."""
    if A.cplx != B.cplx:
        raise ModelError("models live over different scenarios")
    return all(A.at(U) <= B.at(U) for U in A.cplx.members())


@dataclass(frozen=True)
class BundleModel:
    """The bundle view: sections of all contexts as simplices over the values."""

    cplx: SimplicialComplex
    total_vertices: frozenset  # frozenset[(var, value index)]
    simplices: frozenset  # frozenset[frozenset[(var, value index)]]


def to_bundle(model: PresheafModel) -> BundleModel:
    cplx = model.cplx
    vertices = frozenset(
        (x, a) for x in cplx.variables for a in range(cplx.domain(x).size)
    )
    simplices = set()
    for U, S in model.items():
        vs = cplx.sort_vars(U)
        for t in S:
            simplices.add(frozenset(zip(vs, t)))
    return BundleModel(cplx, vertices, frozenset(simplices))


def from_bundle(bundle: BundleModel) -> PresheafModel:
    cplx = bundle.cplx
    sections = {U: set() for U in cplx.members()}
    for s in bundle.simplices:
        vars_seen = [x for x, _ in s]
        U = frozenset(vars_seen)
        if len(vars_seen) != len(U):
            raise DegenerateBundleError(f"simplex {sorted(s)} has two vertices over one variable")
        if not cplx.contains(U):
            raise ModelError(f"simplex over non-member context {sorted(U)}")
        assign = dict(s)
        sections[U].add(tuple(assign[x] for x in cplx.sort_vars(U)))
    return PresheafModel(cplx, sections)
