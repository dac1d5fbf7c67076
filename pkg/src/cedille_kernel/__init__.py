"""A checker and evaluator for a fragment of the Calculus of Dependent Lambda
Eliminations, with an embedded corpus deriving coinductive types."""

from .checker import CheckOptions, Checker, Context, Env, ErrorKind, TypeCheckError
from .delta import DeltaVerdict, Discriminator, bohm_discriminate, delta_applicable
from .modules import CheckedModule, ModuleError, Workspace, load_graph
from .parser import ParseError, parse_expr, parse_module
from .pure import PApp, PLam, PureTerm, PVar, alpha_eq, pretty_pure, substitute
from .reduce import DEFAULT_FUEL, ReductionTrace, Verdict, beta_eta_equal, normalize, whnf
from .runner import CorpusFile, CorpusReport, complete_elided_proofs, corpus_root, run_corpus
from .syntax import erase, pretty

__all__ = [
    "CheckOptions",
    "Checker",
    "Context",
    "Env",
    "ErrorKind",
    "TypeCheckError",
    "DeltaVerdict",
    "Discriminator",
    "bohm_discriminate",
    "delta_applicable",
    "CheckedModule",
    "ModuleError",
    "Workspace",
    "load_graph",
    "ParseError",
    "parse_expr",
    "parse_module",
    "PApp",
    "PLam",
    "PureTerm",
    "PVar",
    "alpha_eq",
    "pretty_pure",
    "substitute",
    "DEFAULT_FUEL",
    "ReductionTrace",
    "Verdict",
    "beta_eta_equal",
    "normalize",
    "whnf",
    "CorpusFile",
    "CorpusReport",
    "complete_elided_proofs",
    "corpus_root",
    "run_corpus",
    "erase",
    "pretty",
]
