"""Search algorithms sharing one evaluation budget and trace contract."""

from .common import Evaluator, ProgressTrace, SearchConfig, SearchResult
from .genitor import genitor
from .hbss import hbss, hbss_sample, selection_probabilities
from .local import alls, alls_inverted, leap_length, rls
from .operators import ShiftMove, apply_shift, legal_shifts, move_forward, syswerda_crossover
from .oracle import exhaustive_oracle
from .swo import swo

__all__ = [
    "Evaluator",
    "ProgressTrace",
    "SearchConfig",
    "SearchResult",
    "ShiftMove",
    "alls",
    "alls_inverted",
    "apply_shift",
    "exhaustive_oracle",
    "genitor",
    "hbss",
    "hbss_sample",
    "leap_length",
    "legal_shifts",
    "move_forward",
    "rls",
    "selection_probabilities",
    "swo",
    "syswerda_crossover",
]
