"""headlab: a lambda-calculus evaluation laboratory.

Weak-head and head reduction implemented as interchangeable engines
(small-step, big-step, and abstract machines, with and without
environments), plus readback, a random-term harness that cross-checks
them, and a command-line front end.
"""

from .syntax import (
    App,
    Index,
    Lam,
    NormalFormClass,
    Proj,
    Term,
    Var,
    alpha_eq,
    classify,
    free_vars,
    fresh,
    subst,
)
from .parse import ParseError, SourceSpan, parse_term
from .pretty import print_state, print_term
from .gen import GenConfig, gen_term, gen_terms
from .engines import (
    FuelExhausted,
    Normal,
    Outcome,
    Stuck,
    Trace,
    TraceEvent,
    compare,
    engine_names,
    evaluate,
)

__version__ = "0.1.0"
