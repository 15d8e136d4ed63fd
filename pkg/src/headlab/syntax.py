"""Named lambda terms and the operations every evaluation engine shares.

Terms are immutable values and all operations here are pure, so they are
safe to use from any number of threads.  Besides the pure constructors
(Var, App, Lam) two engine-internal token kinds live here: call-stack
projections (Proj) and top-level binder indices (Index).  Substitution,
alpha comparison and printing treat them as inert atoms; the parser never
builds them, so user-supplied terms stay pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union

__all__ = [
    "Var",
    "App",
    "Lam",
    "Proj",
    "Index",
    "Term",
    "RESERVED_NAMES",
    "IllegalStateError",
    "NormalFormClass",
    "canonical_binder",
    "free_vars",
    "all_names",
    "fresh",
    "subst",
    "alpha_eq",
    "spine",
    "strip_binders",
    "classify",
    "is_pure",
    "term_metrics",
]


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Lam:
    binder: str
    body: "Term"


@dataclass(frozen=True, slots=True)
class Proj:
    """The argument sitting `depth` frames above the top of the call stack.

    Engine-internal: stands for projecting the head argument out of the
    stuck co-term obtained by dropping `depth` frames from the top level.
    """

    depth: int


@dataclass(frozen=True, slots=True)
class Index:
    """Positional reference to an anonymous top-level binder.

    Index(0) names the outermost absorbed binder; under a prefix of n
    anonymous binders the innermost one is Index(n - 1).
    """

    value: int


Term = Union[Var, App, Lam, Proj, Index]

# Concrete-syntax keywords for engine-internal tokens.  The parser refuses
# them as identifiers so printed machine states can never round-trip back
# in as ordinary user terms.
RESERVED_NAMES = frozenset({"tp", "car", "cdr", "pick", "drop"})


class IllegalStateError(Exception):
    """A readback found leftover engine-internal tokens in its result."""


# Binder names handed out by the term generator and by readback, indexed
# by binder depth.  Starting at "x" keeps small examples looking natural.
_POOL = "xyzwvutsrqponmlkjihgfedcba"


def canonical_binder(k: int, width: int = 26) -> str:
    """Default binder name for nesting depth k: x, y, z, ... then x1, y1, ..."""
    width = max(1, min(width, len(_POOL)))
    stem = _POOL[k % width]
    rnd = k // width
    return stem if rnd == 0 else f"{stem}{rnd}"


def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset((name,))
        case App(fun, arg):
            return free_vars(fun) | free_vars(arg)
        case Lam(binder, body):
            return free_vars(body) - {binder}
        case _:
            return frozenset()


def all_names(t: Term) -> frozenset[str]:
    """Every variable name occurring in t, free or bound, binder or use."""
    match t:
        case Var(name):
            return frozenset((name,))
        case App(fun, arg):
            return all_names(fun) | all_names(arg)
        case Lam(binder, body):
            return all_names(body) | {binder}
        case _:
            return frozenset()


def fresh(avoid: frozenset[str] | set[str], hint: str = "x") -> str:
    """Pick a name not in `avoid`, deterministically from (avoid, hint)."""
    if hint not in avoid:
        return hint
    i = 1
    while f"{hint}{i}" in avoid:
        i += 1
    return f"{hint}{i}"


def subst(t: Term, x: str, s: Term) -> Term:
    """Capture-avoiding substitution of s for the free occurrences of x in t.

    Bound variables are renamed only when an actual capture would occur,
    which keeps evaluation traces close to the input's own spelling.
    """
    return _subst(t, x, s, free_vars(s))


def _subst(t: Term, x: str, s: Term, s_free: frozenset[str]) -> Term:
    match t:
        case Var(name):
            return s if name == x else t
        case App(fun, arg):
            return App(_subst(fun, x, s, s_free), _subst(arg, x, s, s_free))
        case Lam(binder, body):
            if binder == x:
                return t
            if binder in s_free and x in free_vars(body):
                avoid = s_free | free_vars(body) | {x, binder}
                renamed = fresh(avoid, binder)
                body = _subst(body, binder, Var(renamed), frozenset((renamed,)))
                return Lam(renamed, _subst(body, x, s, s_free))
            return Lam(binder, _subst(body, x, s, s_free))
        case _:
            return t


def _nameless(t: Term, env: tuple[str, ...]):
    """Locally nameless skeleton: bound uses become distances, frees stay names."""
    match t:
        case Var(name):
            for i, bound in enumerate(reversed(env)):
                if bound == name:
                    return ("b", i)
            return ("f", name)
        case App(fun, arg):
            return ("a", _nameless(fun, env), _nameless(arg, env))
        case Lam(binder, body):
            return ("l", _nameless(body, env + (binder,)))
        case Proj(depth):
            return ("p", depth)
        case Index(value):
            return ("i", value)
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(a: Term, b: Term) -> bool:
    """True iff a and b are equal up to renaming of bound variables."""
    return _nameless(a, ()) == _nameless(b, ())


class NormalFormClass(Enum):
    NEUTRAL = "Neutral"
    WHNF = "Whnf"
    HNF = "Hnf"
    WHNF_AND_HNF = "WhnfAndHnf"
    REDUCIBLE = "Reducible"


def spine(t: Term) -> tuple[Term, tuple[Term, ...]]:
    """Split t into its application head and arguments in application order."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, tuple(args)


def strip_binders(t: Term) -> tuple[tuple[str, ...], Term]:
    """Peel the leading lambda prefix off t."""
    binders: list[str] = []
    while isinstance(t, Lam):
        binders.append(t.binder)
        t = t.body
    return tuple(binders), t


def classify(t: Term) -> NormalFormClass:
    """Total, mutually exclusive normal-form classification.

    Neutral terms (a variable applied to arguments) count as both weak-head
    and head normal; a lambda is always weak-head normal and is also head
    normal exactly when stripping its binder prefix exposes a neutral core.
    Index and Proj atoms are treated like variables so engine outputs that
    still carry them classify sensibly.
    """
    head, args = spine(t)
    if not isinstance(head, Lam):
        return NormalFormClass.NEUTRAL
    if args:
        return NormalFormClass.REDUCIBLE
    _, core = strip_binders(t)
    core_head, _ = spine(core)
    if isinstance(core_head, Lam):
        return NormalFormClass.WHNF
    return NormalFormClass.WHNF_AND_HNF


def is_pure(t: Term) -> bool:
    """True when t uses only the Var/App/Lam constructors."""
    match t:
        case Var():
            return True
        case App(fun, arg):
            return is_pure(fun) and is_pure(arg)
        case Lam(_, body):
            return is_pure(body)
        case _:
            return False


def term_metrics(t: Term) -> tuple[int, int]:
    """(node count, tree height) computed without recursion."""
    size = 0
    deepest = 0
    todo: list[tuple[Term, int]] = [(t, 1)]
    while todo:
        node, depth = todo.pop()
        size += 1
        if depth > deepest:
            deepest = depth
        match node:
            case App(fun, arg):
                todo.append((fun, depth + 1))
                todo.append((arg, depth + 1))
            case Lam(_, body):
                todo.append((body, depth + 1))
            case _:
                pass
    return size, deepest
