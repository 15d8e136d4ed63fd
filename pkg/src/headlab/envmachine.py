"""Environment (closure) machines.

Variables are resolved through persistent environments instead of by
substitution: pushing an argument captures the current environment in a
closure, and binding extends the environment without mutating anything a
previously built closure might share.  The head variant adds the same
projection rule as the coalesced machine, binding the variable to a
projection closure.  Results are recovered by forcing: recursively
substituting environment bindings back into the term.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .syntax import App, Lam, Proj, Term, Var, all_names, fresh, subst
from .projection import PCommand, PPush, PStuck, PCoTerm

__all__ = [
    "Closure",
    "Binding",
    "Env",
    "env_lookup",
    "EPush",
    "EStuck",
    "ECoTerm",
    "ECommand",
    "ForceBudgetExceeded",
    "env_krivine_load",
    "env_krivine_step",
    "env_krivine_halt",
    "env_head_load",
    "env_head_step",
    "env_head_halt",
    "force",
    "as_forced_command",
]


@dataclass(frozen=True, slots=True)
class Closure:
    term: Term
    env: "Env"


@dataclass(frozen=True, slots=True)
class Binding:
    name: str
    value: Closure
    rest: "Env"


# Environments are shared-tail linked lists; None is the empty one.
Env = Union[Binding, None]


def env_lookup(env: Env, name: str) -> Optional[Closure]:
    while env is not None:
        if env.name == name:
            return env.value
        env = env.rest
    return None


@dataclass(frozen=True, slots=True)
class EPush:
    arg: Closure
    rest: "ECoTerm"


@dataclass(frozen=True, slots=True)
class EStuck:
    depth: int


ECoTerm = Union[EPush, EStuck]


@dataclass(frozen=True, slots=True)
class ECommand:
    term: Term
    env: Env
    coterm: ECoTerm


class ForceBudgetExceeded(Exception):
    """Forcing was about to materialize more nodes than allowed."""


def env_krivine_load(t: Term) -> ECommand:
    return ECommand(t, None, EStuck(0))


def env_krivine_step(c: ECommand) -> Optional[tuple[str, ECommand]]:
    match c.term:
        case App(fun, arg):
            return "push", ECommand(fun, c.env, EPush(Closure(arg, c.env), c.coterm))
        case Lam(binder, body) if isinstance(c.coterm, EPush):
            extended = Binding(binder, c.coterm.arg, c.env)
            return "bind", ECommand(body, extended, c.coterm.rest)
        case Var(name):
            found = env_lookup(c.env, name)
            if found is None:
                return None
            return "lookup", ECommand(found.term, found.env, c.coterm)
        case _:
            return None


def env_krivine_halt(c: ECommand) -> tuple[str, str]:
    """Proper terminals are lambdas facing the bare top level; a variable
    with no binding means the program was open, which no rule covers but
    forcing can still read back."""
    match c.term:
        case Lam() if isinstance(c.coterm, EStuck):
            return "normal", ""
        case Var(name):
            return "open", f"unbound variable {name!r}"
        case _:
            return "stuck", "no transition applies"


def env_head_load(t: Term) -> ECommand:
    return ECommand(t, None, EStuck(0))


def env_head_step(c: ECommand) -> Optional[tuple[str, ECommand]]:
    match c.term:
        case App(fun, arg):
            return "push", ECommand(fun, c.env, EPush(Closure(arg, c.env), c.coterm))
        case Lam(binder, body):
            match c.coterm:
                case EPush(arg, rest):
                    return "bind", ECommand(body, Binding(binder, arg, c.env), rest)
                case EStuck(n):
                    # The projection pairs up with the current environment
                    # exactly as the rule is written, although nothing in a
                    # projection ever needs looking up.
                    bound = Binding(binder, Closure(Proj(n), c.env), c.env)
                    return "project", ECommand(body, bound, EStuck(n + 1))
        case Var(name):
            found = env_lookup(c.env, name)
            if found is None:
                return None
            return "lookup", ECommand(found.term, found.env, c.coterm)
        case _:
            return None


def env_head_halt(c: ECommand) -> tuple[str, str]:
    match c.term:
        case Proj():
            return "normal", ""
        case Var(name):
            return "open", f"unbound variable {name!r}"
        case _:
            return "stuck", "no transition applies"


def force(closure: Closure, max_nodes: Optional[int] = None) -> Term:
    """Materialize a closure as a term with no environment-bound variables.

    Under a binder the bound name is mapped to a unique marker first, the
    body is forced, and then the marker is renamed to a binder that cannot
    capture anything the forcing introduced.  Cyclic environments cannot
    be built with these constructors, so forcing terminates; the optional
    budget guards against materializing enormous results.
    """
    markers = itertools.count()
    produced = [0]

    def note() -> None:
        produced[0] += 1
        if max_nodes is not None and produced[0] > max_nodes:
            raise ForceBudgetExceeded()

    def go(t: Term, env: Env) -> Term:
        note()
        match t:
            case Var(name):
                found = env_lookup(env, name)
                if found is None:
                    return t
                return go(found.term, found.env)
            case App(fun, arg):
                return App(go(fun, env), go(arg, env))
            case Lam(binder, body):
                marker = f"%{next(markers)}"
                shadowed = Binding(binder, Closure(Var(marker), None), env)
                forced = go(body, shadowed)
                name = fresh(all_names(forced) - {marker}, binder)
                return Lam(name, subst(forced, marker, Var(name)))
            case _:
                return t

    return go(closure.term, closure.env)


def as_forced_command(c: ECommand, max_nodes: Optional[int] = None) -> PCommand:
    """Force the focus and every stacked closure, yielding a state of the
    substitution-based head machine for readback and comparison."""
    coterm = c.coterm
    args: list[Closure] = []
    while isinstance(coterm, EPush):
        args.append(coterm.arg)
        coterm = coterm.rest
    forced: PCoTerm = PStuck(coterm.depth)
    for arg in reversed(args):
        forced = PPush(force(arg, max_nodes), forced)
    return PCommand(force(Closure(c.term, c.env), max_nodes), forced)
