"""Shared builders: small scenarios, random models, and brute-force oracles."""

from __future__ import annotations

import random
from itertools import combinations, product

import pytest

from ctxkit.examples import charlie_complex, square_complex
from ctxkit.model import (
    PresheafModel,
    full_product,
    is_no_signalling,
    is_subpresheaf,
    model_from_facet_sections,
    restrict_tuples,
)
from ctxkit.scenario import BOOL, complex_from_facets


@pytest.fixture
def square():
    return square_complex()


@pytest.fixture
def charlie():
    return charlie_complex()


def bool_complex(n_vars, facets):
    names = [f"x{i}" for i in range(n_vars)]
    return complex_from_facets(names, {x: BOOL for x in names},
                               [tuple(names[i] for i in F) for F in facets])


def random_bool_complex(rng: random.Random):
    """A complex with <= 4 two-valued variables and <= 4 facets of size <= 2."""
    n = rng.randint(2, 4)
    pairs = list(combinations(range(n), 2))
    rng.shuffle(pairs)
    n_facets = rng.randint(1, min(4, len(pairs)))
    facets = pairs[:n_facets]
    covered = {i for F in facets for i in F}
    for i in range(n):
        if i not in covered:
            facets.append((i,))
    return bool_complex(n, facets)


def random_model(rng: random.Random, cplx, allow_overrides=True) -> PresheafModel:
    """Random subpresheaf: random nonempty facet sets, faces induced, with
    optional face overrides above the union of images (breaking
    no-signalling but never the subpresheaf law)."""
    facet_data = {}
    for F in cplx.facets:
        pool = sorted(full_product(cplx, F))
        k = rng.randint(1, min(3, len(pool)))
        facet_data[F] = frozenset(rng.sample(pool, k))
    overrides = {}
    if allow_overrides and rng.random() < 0.5:
        faces = [U for U in cplx.members() if U and U not in cplx.facets]
        if faces:
            U = rng.choice(faces)
            induced = set()
            for F in cplx.facets:
                if U <= F:
                    induced |= restrict_tuples(cplx, facet_data[F], U, F)
            extra = sorted(full_product(cplx, U) - induced)
            if extra:
                induced |= set(rng.sample(extra, rng.randint(1, len(extra))))
            overrides[U] = frozenset(induced)
    return model_from_facet_sections(cplx, facet_data, overrides or None)


def random_formula_text(rng: random.Random, cplx, U, depth=2) -> str:
    """Random formula text over two-valued variables of the member context U."""
    vs = list(cplx.sort_vars(U))

    def atom():
        x = rng.choice(vs)
        r = rng.random()
        if r < 0.25:
            return x
        if r < 0.45:
            return f"~{x}"
        if r < 0.6:
            return f"{x} = {rng.choice(vs)}"
        if r < 0.8:
            return f"{x} (+) {rng.choice(vs)} = {rng.choice('01')}"
        if r < 0.9:
            return f"(exists q:bool . q (+) {x} = {rng.choice('01')})"
        return rng.choice(["top", "bot"])

    def go(d):
        if d == 0 or rng.random() < 0.35:
            return atom()
        op = rng.choice(["/\\", "\\/"])
        return f"({go(d - 1)} {op} {go(d - 1)})"

    return go(depth)


def random_member_context(rng: random.Random, cplx, nonempty=True):
    members = [U for U in cplx.members() if U or not nonempty]
    return rng.choice(members)


def all_ns_subpresheaves(model: PresheafModel, limit=200_000):
    """Every no-signalling subpresheaf of the model, by exhausting facet
    section-set choices.  A no-signalling presheaf is determined by its
    facet sets (every face must equal the image from each containing
    facet), so this enumeration is complete; each candidate is still
    re-verified against the definition before being yielded."""
    cplx = model.cplx
    facets = list(cplx.facets)
    combos = 1
    for F in facets:
        combos *= 2 ** len(model.at(F))
    if combos > limit:
        raise RuntimeError(f"too many candidates ({combos})")
    subset_choices = []
    for F in facets:
        pool = sorted(model.at(F))
        subset_choices.append([
            frozenset(t for t, keep in zip(pool, mask) if keep)
            for mask in product((0, 1), repeat=len(pool))
        ])
    members = cplx.members()
    for choice in product(*subset_choices):
        sections = dict(zip(facets, choice))
        ok = True
        for U in members:
            if U in sections:
                continue
            images = [
                restrict_tuples(cplx, sections[F], U, F) for F in facets if U <= F
            ]
            if not images or any(img != images[0] for img in images):
                ok = False
                break
            if not images[0] <= model.at(U):
                ok = False
                break
            sections[U] = images[0]
        if not ok:
            continue
        cand = PresheafModel(cplx, sections, check=False)
        if is_no_signalling(cand) and is_subpresheaf(cand, model):
            yield cand


def largest_ns_subpresheaf_bruteforce(model: PresheafModel) -> PresheafModel:
    """Pointwise union of all no-signalling subpresheaves (the family is
    closed under union, so this is the largest one)."""
    cplx = model.cplx
    acc = {U: set() for U in cplx.members()}
    for cand in all_ns_subpresheaves(model):
        for U in cplx.members():
            acc[U] |= cand.at(U)
    return PresheafModel(cplx, {U: frozenset(S) for U, S in acc.items()}, check=False)
