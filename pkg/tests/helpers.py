"""Shared test utilities: independent oracles and small generators.

Everything here is deliberately written from scratch against the
definitions rather than by calling the code under test, so the tests
that use these functions are actual cross-checks.
"""

from __future__ import annotations

import random

from headlab.projection import TopTerm
from headlab.syntax import App, Index, Lam, Term, Var

# ---------------------------------------------------------------------------
# Nameless-term oracle for alpha-equivalence and substitution.
#
# Representation: ("bound", k) counts binders outward from the use site,
# ("free", name) is a named free variable, plus ("lam", body) and
# ("app", f, a).  Because free variables stay named, substituting one
# term for a free name needs no index shifting: bound indices never
# escape their own skeleton.


def to_db(t: Term, env: tuple[str, ...] = ()):
    if isinstance(t, Var):
        for k, name in enumerate(reversed(env)):
            if name == t.name:
                return ("bound", k)
        return ("free", t.name)
    if isinstance(t, App):
        return ("app", to_db(t.fun, env), to_db(t.arg, env))
    if isinstance(t, Lam):
        return ("lam", to_db(t.body, env + (t.binder,)))
    raise TypeError(t)


def db_subst(skel, name: str, replacement):
    """Substitute a nameless skeleton for a free name in another."""
    tag = skel[0]
    if tag == "free":
        return replacement if skel[1] == name else skel
    if tag == "bound":
        return skel
    if tag == "app":
        return ("app", db_subst(skel[1], name, replacement), db_subst(skel[2], name, replacement))
    if tag == "lam":
        return ("lam", db_subst(skel[1], name, replacement))
    raise TypeError(skel)


def db_free_names(skel) -> set[str]:
    tag = skel[0]
    if tag == "free":
        return {skel[1]}
    if tag == "bound":
        return set()
    if tag == "app":
        return db_free_names(skel[1]) | db_free_names(skel[2])
    return db_free_names(skel[1])


# ---------------------------------------------------------------------------
# Open-term material: peeling leading binders off a closed term exposes
# its binder names as free variables, which gives realistic open terms
# with capture opportunities.


def peel(t: Term, rng: random.Random) -> tuple[Term, list[str]]:
    names = []
    while isinstance(t, Lam) and rng.random() < 0.8:
        names.append(t.binder)
        t = t.body
    return t, names


# ---------------------------------------------------------------------------
# Random legal index-form top terms.


def gen_top_term(rng: random.Random, binders: int, size: int) -> TopTerm:
    pool = [f"v{i}" for i in range(3)]

    def go(scope: tuple[str, ...], budget: int) -> Term:
        atoms: list[Term] = [Var(n) for n in scope]
        atoms.extend(Index(i) for i in range(binders))
        if budget <= 1 or rng.random() < 0.25:
            if atoms and rng.random() < 0.8:
                return atoms[rng.randrange(len(atoms))]
            name = pool[rng.randrange(len(pool))]
            return Lam(name, Var(name))
        if rng.random() < 0.45:
            name = pool[rng.randrange(len(pool))]
            return Lam(name, go(scope + (name,), budget - 1))
        split = rng.randint(1, budget - 1)
        return App(go(scope, split), go(scope, budget - split))

    return TopTerm(binders, go((), size))
