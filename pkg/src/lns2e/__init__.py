"""Two-echelon routing heuristics: LNS solver, evaluators and benchmark tools."""

from .destroy_repair import Params, UnrepairableError, all_toggles
from .instance import (
    Customer,
    Diagnostic,
    DistanceConvention,
    Fleet,
    IllegalPairError,
    InfeasibleError,
    Instance,
    Satellite,
    UNBOUNDED,
    VARIANT_2ELRPSD,
    VARIANT_2EVRP,
    distance,
    validate_instance,
)
from .formats import ParseError, parse_instance, write_canonical
from .lns import RunStats, rebuild_first_level, solve
from .local_search import GranularNeighbourhood, local_search, two_opt, two_opt_star
from .oracle import TinyLimit, TooLargeError, exact_solve
from .solution import (
    Route,
    Solution,
    Violation,
    ViolationKind,
    check_feasibility,
    delta_insert,
    delta_remove,
    evaluate,
    parse_solution,
    satellite_throughput,
    write_solution,
)

__version__ = "0.1.0"
