"""Workbench for transition system specifications and their precongruence formats."""

from .syntax import ParseError, parse_tss, parse_term, print_tss
from .terms import App, Literal, Rule, Substitution, Tss, Var

__all__ = ["App", "Literal", "ParseError", "Rule", "Substitution", "Tss", "Var",
           "parse_term", "parse_tss", "print_tss"]
