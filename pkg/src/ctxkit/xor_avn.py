"""Parity-based global-inconsistency arguments for XOR systems over GF(2).

An all-vs-nothing certificate is a subset of equations whose variables each
occur an even number of times while the right-hand bits sum to 1; XOR-ing
the subset yields 0 = 1, so no global assignment satisfies the system.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import ResourceLimitError
from .logic import App, Compare, Const, Theory, Var, eval_formula
from .model import Section, max_product


@dataclass(frozen=True)
class XorEquation:
    vars: frozenset  # variable names, all two-valued
    rhs: int  # 0 or 1


@dataclass(frozen=True)
class AvnCertificate:
    equations: tuple[int, ...]  # indices into the extracted system

    def verify(self, system) -> bool:
        counts = {}
        rhs = 0
        for i in self.equations:
            eq = system[i]
            rhs ^= eq.rhs
            for x in eq.vars:
                counts[x] = counts.get(x, 0) + 1
        return rhs == 1 and all(c % 2 == 0 for c in counts.values())


def _linearize_term(t, cplx):
    """Term as (set of odd-occurring two-valued variables, constant bit)."""
    if isinstance(t, Var):
        d = cplx.domains.get(t.name)
        if d is None or d.size != 2:
            return None
        return frozenset({t.name}), 0
    if isinstance(t, Const):
        if t.domain.size != 2:
            return None
        return frozenset(), t.index
    if isinstance(t, App) and t.name == "(+)":
        left = _linearize_term(t.args[0], cplx)
        right = _linearize_term(t.args[1], cplx)
        if left is None or right is None:
            return None
        return left[0] ^ right[0], left[1] ^ right[1]
    return None


def linearize(formula, cplx) -> XorEquation | None:
    """Recognize an equation between XOR combinations of two-valued
    variables and bits; None when the formula is outside that sublanguage."""
    if not isinstance(formula, Compare) or formula.op != "=":
        return None
    left = _linearize_term(formula.left, cplx)
    right = _linearize_term(formula.right, cplx)
    if left is None or right is None:
        return None
    vars_ = left[0] ^ right[0]
    rhs = left[1] ^ right[1]
    if not vars_:
        return None
    return XorEquation(vars_, rhs)


def extract_xor(theory: Theory):
    """(XOR equations of the theory, indices of skipped formulas)."""
    equations = []
    skipped = []
    for i, phi in enumerate(theory.formulas):
        eq = linearize(phi, theory.cplx)
        if eq is None:
            skipped.append(i)
        else:
            equations.append(eq)
    return equations, skipped


def avn_certificate(system) -> AvnCertificate | None:
    """Certificate of GF(2) infeasibility, or None when the system is
    satisfiable.  Elimination keeps an identity block so the certificate
    names the combining subset; ties break toward lowest row index."""
    variables = sorted({x for eq in system for x in eq.vars})
    col = {x: i for i, x in enumerate(variables)}
    n, m = len(system), len(variables)
    # row layout: m coefficient bits | rhs | n combination-tracking bits
    rows = []
    for i, eq in enumerate(system):
        row = [0] * (m + 1 + n)
        for x in eq.vars:
            row[col[x]] = 1
        row[m] = eq.rhs
        row[m + 1 + i] = 1
        rows.append(row)
    rank = 0
    for c in range(m):
        pivot = next((r for r in range(rank, n) if rows[r][c]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(n):
            if r != rank and rows[r][c]:
                rows[r] = [a ^ b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    for row in rows:
        if not any(row[:m]) and row[m]:
            cert = AvnCertificate(tuple(i for i in range(n) if row[m + 1 + i]))
            if not cert.verify(system):
                raise AssertionError("internal error: elimination produced a bad certificate")
            return cert
    return None


def global_consistency(theory: Theory):
    """Brute-force search for a global assignment satisfying every formula.

    Returns (True, witness Section) or (False, None).  This is the oracle
    against which both the certificate and the join are validated.
    """
    cplx = theory.cplx
    X = cplx.variables
    size = 1
    for x in X:
        size *= cplx.domain(x).size
    if size > max_product():
        raise ResourceLimitError(f"global product has {size} cells, above the guard")
    doms = {x: cplx.domain(x) for x in X}
    for t in product(*(range(cplx.domain(x).size) for x in X)):
        env = dict(zip(X, t))
        env["__domains__"] = doms
        if all(eval_formula(phi, env, theory.sig) for phi in theory.formulas):
            return True, Section(X, t)
    return False, None
