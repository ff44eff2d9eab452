"""Variables, finite value domains, and the simplicial complex of contexts.

A scenario is a finite set of variables, each with a finite ordered domain,
together with a downward-closed family of "contexts" (variable sets that can
be queried jointly).  The family is stored by its maximal elements (facets);
membership is the subset-of-a-facet test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import ScenarioError

Context = frozenset  # frozenset[str]: variable names


@dataclass(frozen=True)
class Domain:
    """A named finite set of values; order is fixed at declaration."""

    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        if not self.values:
            raise ScenarioError(f"domain {self.name!r} has no values")
        if len(set(self.values)) != len(self.values):
            raise ScenarioError(f"domain {self.name!r} has duplicate values")

    @property
    def size(self) -> int:
        return len(self.values)

    def index_of(self, value: str) -> int:
        try:
            return self.values.index(value)
        except ValueError:
            raise ScenarioError(f"value {value!r} not in domain {self.name!r}") from None


BOOL = Domain("bool", ("0", "1"))


@dataclass(frozen=True)
class SimplicialComplex:
    """The complex of contexts, stored by facets.

    `variables` fixes the canonical order used everywhere: section tuples,
    JSON output, and enumeration order all follow it.
    """

    variables: tuple[str, ...]
    domains: dict = field(compare=False)  # var name -> Domain
    facets: tuple  # tuple[Context, ...], canonical order, mutually incomparable

    def domain(self, var: str) -> Domain:
        try:
            return self.domains[var]
        except KeyError:
            raise ScenarioError(f"unknown variable {var!r}") from None

    def check_vars(self, U) -> None:
        for x in U:
            if x not in self.domains:
                raise ScenarioError(f"unknown variable {x!r}")

    def sort_vars(self, U) -> tuple[str, ...]:
        """Variables of U in canonical (declaration) order."""
        self.check_vars(U)
        order = {x: i for i, x in enumerate(self.variables)}
        return tuple(sorted(U, key=order.__getitem__))

    def contains(self, U) -> bool:
        """True iff U is a member context, i.e. a subset of some facet."""
        U = frozenset(U)
        self.check_vars(U)
        if not U:
            return True
        return any(U <= F for F in self.facets)

    def faces_of(self, U) -> list[Context]:
        """All subsets of a member context U, in canonical order."""
        U = frozenset(U)
        if not self.contains(U):
            raise ScenarioError(f"context {sorted(U)} is not in the complex")
        vs = self.sort_vars(U)
        return [frozenset(c) for k in range(len(vs) + 1) for c in combinations(vs, k)]

    def members(self) -> list[Context]:
        """Every member context, deterministically ordered by (size, variables)."""
        seen = {frozenset()}
        for F in self.facets:
            for V in self.faces_of(F):
                seen.add(V)
        return sorted(seen, key=self._ctx_key)

    def _ctx_key(self, U):
        return (len(U), self.sort_vars(U))

    def codim1_pairs(self) -> list[tuple[Context, Context]]:
        """All member pairs (U, V) with U = V minus one variable."""
        pairs = []
        for V in self.members():
            for x in self.sort_vars(V):
                pairs.append((V - {x}, V))
        return pairs


def complex_from_facets(variables, domains, facets) -> SimplicialComplex:
    """Build a complex from declared variables and facet contexts.

    `variables` is an ordered list of names, `domains` maps each name to its
    Domain, and `facets` is any iterable of variable collections.  Redundant
    facets (subsets of others) are dropped; every variable must be covered.
    """
    variables = tuple(variables)
    if len(set(variables)) != len(variables):
        raise ScenarioError("duplicate variable names")
    for x in variables:
        if x not in domains:
            raise ScenarioError(f"variable {x!r} has no domain")
    fsets = []
    for F in facets:
        F = frozenset(F)
        for x in F:
            if x not in variables:
                raise ScenarioError(f"unknown variable {x!r} in facet")
        fsets.append(F)
    # drop facets contained in another (keep one copy of duplicates)
    maximal = [F for F in fsets if not any(F < G for G in fsets)]
    dedup = []
    for F in maximal:
        if F not in dedup:
            dedup.append(F)
    covered = frozenset().union(*dedup) if dedup else frozenset()
    missing = [x for x in variables if x not in covered]
    if missing:
        raise ScenarioError(f"variables not covered by any facet: {missing}")
    order = {x: i for i, x in enumerate(variables)}
    dedup.sort(key=lambda F: (len(F), sorted(order[x] for x in F)))
    return SimplicialComplex(variables, dict(domains), tuple(dedup))
