"""Projection-based head reduction.

Two artifacts: a stack machine that keeps evaluating a lambda with no
pending argument by substituting a projection into the call stack for its
variable, and the index-form small-step semantics obtained by treating
those projections as references to a prefix of anonymous top-level
binders.  The star/hash translations connect the index form to the plain
named small-step semantics and are property-tested as inverses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .syntax import (
    App,
    IllegalStateError,
    Index,
    Lam,
    NormalFormClass,
    Proj,
    Term,
    Var,
    all_names,
    canonical_binder,
    fresh,
    is_pure,
    subst,
)
from .weakhead import decompose_wh, plug

__all__ = [
    "PStuck",
    "PPush",
    "PCoTerm",
    "PCommand",
    "proj_load",
    "proj_step",
    "proj_terminal",
    "replace_projection",
    "proj_readback_step",
    "proj_readback",
    "is_legal_proj",
    "split_pcoterm",
    "TopTerm",
    "derived_step",
    "derived_readback_step",
    "derived_readback",
    "replace_index",
    "collect_indices",
    "is_legal_top",
    "translate_star",
    "translate_hash",
]


@dataclass(frozen=True, slots=True)
class PStuck:
    """A stuck co-term: the top level with `depth` frames dropped."""

    depth: int


@dataclass(frozen=True, slots=True)
class PPush:
    arg: Term
    rest: "PCoTerm"


PCoTerm = Union[PStuck, PPush]


@dataclass(frozen=True, slots=True)
class PCommand:
    term: Term
    coterm: PCoTerm


def proj_load(t: Term) -> PCommand:
    return PCommand(t, PStuck(0))


def proj_step(c: PCommand) -> Optional[tuple[str, PCommand]]:
    """One transition of the projection machine.

    Push and beta are the Krivine rules; "project" fires when a lambda
    faces a stuck co-term: the variable becomes a projection out of that
    co-term and evaluation continues under the (now implicit) binder.
    """
    match c.term:
        case App(fun, arg):
            return "push", PCommand(fun, PPush(arg, c.coterm))
        case Lam(binder, body):
            match c.coterm:
                case PPush(arg, rest):
                    return "beta", PCommand(subst(body, binder, arg), rest)
                case PStuck(depth):
                    next_term = subst(body, binder, Proj(depth))
                    return "project", PCommand(next_term, PStuck(depth + 1))
        case _:
            return None
    return None


def proj_terminal(c: PCommand) -> bool:
    return isinstance(c.term, (Var, Proj))


def replace_projection(v: Term, depth: int, x: str) -> Term:
    """Turn every Proj(depth) in v into Var(x); other projections stay.

    Plain structural replacement: the caller guarantees x is fresh for v,
    including its binders, so no capture checks are needed.
    """
    match v:
        case Proj(d) if d == depth:
            return Var(x)
        case App(fun, arg):
            return App(replace_projection(fun, depth, x), replace_projection(arg, depth, x))
        case Lam(binder, body):
            return Lam(binder, replace_projection(body, depth, x))
        case _:
            return v


def proj_readback_step(c: PCommand) -> tuple[str, Union[PCommand, Term]]:
    """One readback move: fold a pushed argument back into an application,
    or reverse one projection step by reintroducing a lambda whose binder
    replaces the deepest projection still in scope."""
    match c.coterm:
        case PPush(arg, rest):
            return "pop", PCommand(App(c.term, arg), rest)
        case PStuck(depth) if depth > 0:
            hint = canonical_binder(depth - 1)
            x = fresh(all_names(c.term), hint)
            body = replace_projection(c.term, depth - 1, x)
            return "lambda", PCommand(Lam(x, body), PStuck(depth - 1))
        case _:
            return "done", c.term


def proj_readback(c: PCommand) -> Term:
    while True:
        rule, nxt = proj_readback_step(c)
        if rule == "done":
            assert not isinstance(nxt, PCommand)
            if not is_pure(nxt):
                raise IllegalStateError(f"projection survived readback: {nxt!r}")
            return nxt
        assert isinstance(nxt, PCommand)
        c = nxt


def split_pcoterm(coterm: PCoTerm) -> tuple[tuple[Term, ...], PStuck]:
    """Peel the pushed arguments off a co-term, top of stack first."""
    args: list[Term] = []
    while isinstance(coterm, PPush):
        args.append(coterm.arg)
        coterm = coterm.rest
    return tuple(args), coterm


def _max_proj_depth(t: Term) -> int:
    """Largest projection depth occurring in t, or -1 when there is none."""
    match t:
        case Proj(depth):
            return depth
        case App(fun, arg):
            return max(_max_proj_depth(fun), _max_proj_depth(arg))
        case Lam(_, body):
            return _max_proj_depth(body)
        case _:
            return -1


def is_legal_proj(c: PCommand) -> bool:
    """Every projection in the focused term or a stacked argument must
    reach strictly less deep than the terminating stuck co-term."""
    args, stuck = split_pcoterm(c.coterm)
    bound = stuck.depth
    if _max_proj_depth(c.term) >= bound:
        return False
    return all(_max_proj_depth(a) < bound for a in args)


@dataclass(frozen=True, slots=True)
class TopTerm:
    """A body under `binders` anonymous top-level lambdas.

    The body may mention Index(i) for i < binders; Index(0) is the
    outermost binder, absorbed first.
    """

    binders: int
    body: Term


def derived_step(t: TopTerm) -> Optional[tuple[str, TopTerm]]:
    """Absorb a top-level lambda into the anonymous prefix, or contract
    the head redex inside the body; None when the body is neutral."""
    if isinstance(t.body, Lam):
        absorbed = subst(t.body.body, t.body.binder, Index(t.binders))
        return "absorb", TopTerm(t.binders + 1, absorbed)
    decomposition = decompose_wh(t.body)
    if isinstance(decomposition, NormalFormClass):
        return None
    ctx, redex = decomposition
    lam = redex.fun
    assert isinstance(lam, Lam)
    contracted = plug(ctx, subst(lam.body, lam.binder, redex.arg))
    return "beta", TopTerm(t.binders, contracted)


def replace_index(v: Term, value: int, x: str) -> Term:
    match v:
        case Index(i) if i == value:
            return Var(x)
        case App(fun, arg):
            return App(replace_index(fun, value, x), replace_index(arg, value, x))
        case Lam(binder, body):
            return Lam(binder, replace_index(body, value, x))
        case _:
            return v


def collect_indices(v: Term) -> frozenset[int]:
    match v:
        case Index(i):
            return frozenset((i,))
        case App(fun, arg):
            return collect_indices(fun) | collect_indices(arg)
        case Lam(_, body):
            return collect_indices(body)
        case _:
            return frozenset()


def is_legal_top(t: TopTerm) -> bool:
    return all(i < t.binders for i in collect_indices(t.body))


def derived_readback_step(t: TopTerm) -> Optional[tuple[str, TopTerm]]:
    """Name the innermost anonymous binder.  With k - 1 binders left, the
    freed index is k - 1 and the fresh name wraps the body."""
    if t.binders == 0:
        return None
    k = t.binders - 1
    x = fresh(all_names(t.body), canonical_binder(k))
    return "name", TopTerm(k, Lam(x, replace_index(t.body, k, x)))


def derived_readback(t: TopTerm) -> Term:
    while True:
        step = derived_readback_step(t)
        if step is None:
            break
        _, t = step
    if collect_indices(t.body):
        raise IllegalStateError(f"index survived readback: {t.body!r}")
    return t.body


def translate_star(t: TopTerm) -> Term:
    """Normal form of the readback relation: name every anonymous binder."""
    return derived_readback(t)


def translate_hash(v: Term) -> TopTerm:
    """Normal form with respect to absorption: swallow the whole leading
    lambda prefix into the anonymous top level."""
    t = TopTerm(0, v)
    while isinstance(t.body, Lam):
        absorbed = subst(t.body.body, t.body.binder, Index(t.binders))
        t = TopTerm(t.binders + 1, absorbed)
    return t
