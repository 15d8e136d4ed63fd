"""Stack machines for the lambda calculus with first-class contexts.

Terms here can name their evaluation context (Mu) or pattern-match on it
(Case); a lambda embeds as a Case that rebinds its argument and passes
the remaining context on.  Two machines share the syntax: the plain one
halts when a Case faces something that is not a call stack, while the
projection variant splits a stuck co-term into its head projection and
tail and keeps running.  Legality ties the projections appearing in
terms to the depth of the stuck co-term they will be resolved against.

Substitution deserves a note: the machine rules substitute a term and a
co-term simultaneously, and either payload may carry the other sort of
free name into scope, so a single parallel substitution with renaming at
both binder kinds is the only correct shape.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .projection import PCommand, PPush, PStuck, PCoTerm
from .syntax import App, Lam, Proj, Term, Var, fresh
from .weakhead import KCommand, KCoTerm, KPush, TOP

__all__ = [
    "CVar",
    "CApp",
    "Mu",
    "Case",
    "CarS",
    "CTerm",
    "CoVar",
    "CPush",
    "CStuckCo",
    "CCoTerm",
    "CCommand",
    "free_names_term",
    "free_names_coterm",
    "subst_command",
    "control_load",
    "control_step",
    "control_proj_step",
    "control_halt",
    "is_legal_command",
    "legality_status",
    "embed_term",
    "unembed_term",
    "as_krivine_command",
    "as_projection_command",
]


@dataclass(frozen=True, slots=True)
class CVar:
    name: str


@dataclass(frozen=True, slots=True)
class CApp:
    fun: "CTerm"
    arg: "CTerm"


@dataclass(frozen=True, slots=True)
class Mu:
    """Capture the current co-term under a name and run the body."""

    covar: str
    body: "CCommand"


@dataclass(frozen=True, slots=True)
class Case:
    """Pattern-match on the co-term: bind its head argument and its tail."""

    binder: str
    cobinder: str
    body: "CCommand"


@dataclass(frozen=True, slots=True)
class CarS:
    """Head projection out of the stuck co-term `depth` frames down."""

    depth: int


CTerm = Union[CVar, CApp, Mu, Case, CarS]


@dataclass(frozen=True, slots=True)
class CoVar:
    name: str


@dataclass(frozen=True, slots=True)
class CPush:
    arg: CTerm
    rest: "CCoTerm"


@dataclass(frozen=True, slots=True)
class CStuckCo:
    """The top level with `depth` frames dropped; 0 is the top itself."""

    depth: int


CCoTerm = Union[CoVar, CPush, CStuckCo]


@dataclass(frozen=True, slots=True)
class CCommand:
    term: CTerm
    coterm: CCoTerm


def free_names_term(t: CTerm) -> tuple[frozenset[str], frozenset[str]]:
    """(free term variables, free co-variables) of a term."""
    match t:
        case CVar(name):
            return frozenset((name,)), frozenset()
        case CApp(fun, arg):
            fv1, fc1 = free_names_term(fun)
            fv2, fc2 = free_names_term(arg)
            return fv1 | fv2, fc1 | fc2
        case Mu(covar, body):
            fv, fc = free_names_command(body)
            return fv, fc - {covar}
        case Case(binder, cobinder, body):
            fv, fc = free_names_command(body)
            return fv - {binder}, fc - {cobinder}
        case _:
            return frozenset(), frozenset()


def free_names_coterm(e: CCoTerm) -> tuple[frozenset[str], frozenset[str]]:
    match e:
        case CoVar(name):
            return frozenset(), frozenset((name,))
        case CPush(arg, rest):
            fv1, fc1 = free_names_term(arg)
            fv2, fc2 = free_names_coterm(rest)
            return fv1 | fv2, fc1 | fc2
        case _:
            return frozenset(), frozenset()


def free_names_command(c: CCommand) -> tuple[frozenset[str], frozenset[str]]:
    fv1, fc1 = free_names_term(c.term)
    fv2, fc2 = free_names_coterm(c.coterm)
    return fv1 | fv2, fc1 | fc2


def _payload_names(tmap: dict[str, CTerm], cmap: dict[str, CCoTerm]):
    avoid_v: set[str] = set()
    avoid_c: set[str] = set()
    for payload in tmap.values():
        fv, fc = free_names_term(payload)
        avoid_v |= fv
        avoid_c |= fc
    for copayload in cmap.values():
        fv, fc = free_names_coterm(copayload)
        avoid_v |= fv
        avoid_c |= fc
    return frozenset(avoid_v), frozenset(avoid_c)


def subst_command(c: CCommand, tmap: dict[str, CTerm], cmap: dict[str, CCoTerm]) -> CCommand:
    """Simultaneous capture-avoiding substitution over a command."""
    avoid_v, avoid_c = _payload_names(tmap, cmap)
    return _sub_command(c, tmap, cmap, avoid_v, avoid_c)


def _sub_command(c, tmap, cmap, avoid_v, avoid_c) -> CCommand:
    return CCommand(
        _sub_term(c.term, tmap, cmap, avoid_v, avoid_c),
        _sub_coterm(c.coterm, tmap, cmap, avoid_v, avoid_c),
    )


def _sub_coterm(e, tmap, cmap, avoid_v, avoid_c) -> CCoTerm:
    match e:
        case CoVar(name):
            return cmap.get(name, e)
        case CPush(arg, rest):
            return CPush(
                _sub_term(arg, tmap, cmap, avoid_v, avoid_c),
                _sub_coterm(rest, tmap, cmap, avoid_v, avoid_c),
            )
        case _:
            return e


def _sub_term(t, tmap, cmap, avoid_v, avoid_c) -> CTerm:
    match t:
        case CVar(name):
            return tmap.get(name, t)
        case CApp(fun, arg):
            return CApp(
                _sub_term(fun, tmap, cmap, avoid_v, avoid_c),
                _sub_term(arg, tmap, cmap, avoid_v, avoid_c),
            )
        case Mu(covar, body):
            cmap2 = {k: v for k, v in cmap.items() if k != covar}
            if not tmap and not cmap2:
                return t
            if covar in avoid_c:
                _, fc = free_names_command(body)
                renamed = fresh(avoid_c | fc | set(cmap2), covar)
                cmap2[covar] = CoVar(renamed)
                covar = renamed
                # The rename is itself a payload now, so deeper binders
                # spelled the same way must keep out of its way too.
                avoid_c = avoid_c | {renamed}
            return Mu(covar, _sub_command(body, tmap, cmap2, avoid_v, avoid_c))
        case Case(binder, cobinder, body):
            tmap2 = {k: v for k, v in tmap.items() if k != binder}
            cmap2 = {k: v for k, v in cmap.items() if k != cobinder}
            if not tmap2 and not cmap2:
                return t
            if binder in avoid_v:
                fv, _ = free_names_command(body)
                renamed = fresh(avoid_v | fv | set(tmap2), binder)
                tmap2[binder] = CVar(renamed)
                binder = renamed
                avoid_v = avoid_v | {renamed}
            if cobinder in avoid_c:
                _, fc = free_names_command(body)
                renamed = fresh(avoid_c | fc | set(cmap2), cobinder)
                cmap2[cobinder] = CoVar(renamed)
                cobinder = renamed
                avoid_c = avoid_c | {renamed}
            return Case(binder, cobinder, _sub_command(body, tmap2, cmap2, avoid_v, avoid_c))
        case _:
            return t


def control_load(t: CTerm) -> CCommand:
    return CCommand(t, CStuckCo(0))


def control_step(c: CCommand) -> Optional[tuple[str, CCommand]]:
    """One transition of the plain machine: push an argument, let Mu
    capture its co-term, or pattern-match a Case against a call stack."""
    match c.term:
        case CApp(fun, arg):
            return "push", CCommand(fun, CPush(arg, c.coterm))
        case Mu(covar, body):
            return "mu", subst_command(body, {}, {covar: c.coterm})
        case Case(binder, cobinder, body) if isinstance(c.coterm, CPush):
            payload = {binder: c.coterm.arg}
            copayload = {cobinder: c.coterm.rest}
            return "beta", subst_command(body, payload, copayload)
        case _:
            return None


def control_proj_step(c: CCommand) -> Optional[tuple[str, CCommand]]:
    """The projection variant: everything the plain machine does, plus a
    Case facing a stuck co-term splits it eagerly into projections."""
    plain = control_step(c)
    if plain is not None:
        return plain
    match c.term:
        case Case(binder, cobinder, body) if isinstance(c.coterm, CStuckCo):
            depth = c.coterm.depth
            payload = {binder: CarS(depth)}
            copayload = {cobinder: CStuckCo(depth + 1)}
            return "split", subst_command(body, payload, copayload)
        case _:
            return None


def control_halt(c: CCommand, projective: bool) -> tuple[str, str]:
    """Classify a state no rule applies to: ("normal" | "stuck", reason)."""
    match c.term:
        case CVar():
            return "normal", ""
        case CarS() if projective:
            return "normal", ""
        case Case():
            if isinstance(c.coterm, CoVar):
                return "stuck", f"pattern-match on free co-variable {c.coterm.name!r}"
            return "stuck", "pattern-match on the empty top-level context"
        case _:
            return "stuck", "no transition applies"


def _collect_cars_term(t: CTerm, out: list[int]) -> None:
    match t:
        case CarS(depth):
            out.append(depth)
        case CApp(fun, arg):
            _collect_cars_term(fun, out)
            _collect_cars_term(arg, out)
        case Mu(_, body) | Case(_, _, body):
            _collect_cars_term(body.term, out)
            _collect_cars_coterm(body.coterm, out)
        case _:
            pass


def _collect_cars_coterm(e: CCoTerm, out: list[int]) -> None:
    while isinstance(e, CPush):
        _collect_cars_term(e.arg, out)
        e = e.rest


def is_legal_command(c: CCommand) -> bool:
    """Every projection in the focused term or a stacked argument must be
    strictly shallower than the terminating stuck co-term.  A command
    ending in a co-variable has nothing to check and passes vacuously."""
    args: list[CTerm] = [c.term]
    e = c.coterm
    while isinstance(e, CPush):
        args.append(e.arg)
        e = e.rest
    if isinstance(e, CoVar):
        return True
    bound = e.depth
    depths: list[int] = []
    for item in args:
        _collect_cars_term(item, depths)
    return all(d < bound for d in depths)


def legality_status(c: CCommand) -> str:
    e = c.coterm
    while isinstance(e, CPush):
        e = e.rest
    if isinstance(e, CoVar):
        return "not-applicable"
    return "legal" if is_legal_command(c) else "illegal"


def embed_term(t: Term) -> CTerm:
    """Render a pure lambda term in the control syntax: a lambda becomes a
    Case whose body immediately hands the result to the captured context."""
    counter = itertools.count()

    def go(t: Term) -> CTerm:
        match t:
            case Var(name):
                return CVar(name)
            case App(fun, arg):
                return CApp(go(fun), go(arg))
            case Lam(binder, body):
                covar = f"k{next(counter)}"
                return Case(binder, covar, CCommand(go(body), CoVar(covar)))
            case _:
                raise ValueError(f"only pure terms embed: {t!r}")

    return go(t)


def unembed_term(t: CTerm, allow_proj: bool = False) -> Term:
    """Invert the embedding.  Raises ValueError for terms outside the image
    (a Mu, or a Case whose body is not just a hand-off to its co-binder)."""
    match t:
        case CVar(name):
            return Var(name)
        case CApp(fun, arg):
            return App(unembed_term(fun, allow_proj), unembed_term(arg, allow_proj))
        case CarS(depth) if allow_proj:
            return Proj(depth)
        case Case(binder, cobinder, CCommand(body_term, CoVar(name))) if name == cobinder:
            _, free_covars = free_names_term(body_term)
            if cobinder in free_covars:
                raise ValueError("co-binder recaptured in the body")
            return Lam(binder, unembed_term(body_term, allow_proj))
        case _:
            raise ValueError(f"not an embedded term: {t!r}")


def as_krivine_command(c: CCommand) -> KCommand:
    """View a reachable plain-machine state as a Krivine state."""
    stack: KCoTerm = TOP
    args: list[CTerm] = []
    e = c.coterm
    while isinstance(e, CPush):
        args.append(e.arg)
        e = e.rest
    if not isinstance(e, CStuckCo) or e.depth != 0:
        raise ValueError("co-term does not end at the top level")
    for arg in reversed(args):
        stack = KPush(unembed_term(arg), stack)
    return KCommand(unembed_term(c.term), stack)


def as_projection_command(c: CCommand) -> PCommand:
    """View a projection-machine state over pure code as a state of the
    control-free projection machine."""
    args = []
    e = c.coterm
    while isinstance(e, CPush):
        args.append(e.arg)
        e = e.rest
    if not isinstance(e, CStuckCo):
        raise ValueError("open co-term")
    coterm: PCoTerm = PStuck(e.depth)
    for arg in reversed(args):
        coterm = PPush(unembed_term(arg, allow_proj=True), coterm)
    return PCommand(unembed_term(c.term, allow_proj=True), coterm)
