"""Model checking and proof checking for the logic of unknowable truths."""
from .formula import (Ann, And, Atom, Complexity, Formula, Know, Neg, ParseError, Top, Unk,
                      TOP, BOT, is_el, is_pal, less_complex, measures, parse, render)
from .kripke import Model, dump_model, enumerate_models, frame_properties, load_model, restrict
from .bisim import characteristic, closed_subsets, partition, quotient
from .semantics import (Evaluator, Verdict, Witness, bounded_validity, eval_formula,
                        eval_with_witness, extension)
from .rewrite import eliminate_announcements, reduce_once
from .proofcheck import check_proof, load_proof, match_axiom, tautology_skeleton

__version__ = "0.1.0"
