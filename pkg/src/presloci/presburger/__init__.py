from .terms import LinearTerm
from .formula import (
    FALSE, TRUE, And, Bot, Dvd, Exists, Forall, Formula, Ge, Not, Or, Top,
    conj, disj, dvd, eq, evaluate, evaluate_formula, exists, forall, free_variables,
    ge, implies, is_quantifier_free, neg, substitute,
)
from .parser import PresburgerSyntaxError, parse_formula
from .qe import (
    ResourceLimitExceeded, eliminate_quantifiers, equivalent, is_satisfiable, is_valid,
)
