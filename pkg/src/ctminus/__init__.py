"""Compositional truth experiments over the language of arithmetic.

Submodules:

* :mod:`ctminus.syntax`: terms, formulas, parsing, substitution, eta_b.
* :mod:`ctminus.goedel`: Goedel codes of syntax and finite sequences.
* :mod:`ctminus.evaluation`: three-valued truth oracles and axiom checks.
* :mod:`ctminus.stopping_disjunction`: disjunctions with stopping conditions.
* :mod:`ctminus.rank_lab`: rank functions and gamma sequences.
* :mod:`ctminus.satclass_builder`: finite satisfaction classes.
* :mod:`ctminus.cli`: the ``ctminus`` command.
"""

from .evaluation import (
    FALSE,
    TRUE,
    UNKNOWN,
    Budget,
    DomainOracle,
    PropositionalOracle,
    StandardModelOracle,
    TableOracle,
    TruthOracle,
    Verdict,
    check_ct_axioms,
)
from .goedel import decode_formula, decode_term, encode
from .syntax import Formula, Term, parse_formula, parse_term, render

__all__ = [
    "FALSE",
    "TRUE",
    "UNKNOWN",
    "Budget",
    "DomainOracle",
    "Formula",
    "PropositionalOracle",
    "StandardModelOracle",
    "TableOracle",
    "Term",
    "TruthOracle",
    "Verdict",
    "check_ct_axioms",
    "decode_formula",
    "decode_term",
    "encode",
    "parse_formula",
    "parse_term",
    "render",
]

__version__ = "0.1.0"
