"""CTL formulas: parsing, normal form, model checking and traces."""

from .checker import (CheckResult, check, counterexample, format_trace, sat_set,
                      violates_at_end, witness)
from .formula import (AF, AG, AU, AX, EF, EG, EU, EX, FALSE, TRUE, And, Atom,
                      FalseF, Formula, Implies, Not, Or, TrueF, atoms, depth,
                      is_enf, to_enf, to_text)
from .parser import SpecEntry, parse_formula, parse_spec_file

__all__ = [
    "AF", "AG", "AU", "AX", "EF", "EG", "EU", "EX", "FALSE", "TRUE", "And",
    "Atom", "CheckResult", "FalseF", "Formula", "Implies", "Not", "Or",
    "SpecEntry", "TrueF", "atoms", "check", "counterexample", "depth",
    "format_trace", "is_enf", "parse_formula", "parse_spec_file", "sat_set",
    "to_enf", "to_text", "violates_at_end", "witness",
]
