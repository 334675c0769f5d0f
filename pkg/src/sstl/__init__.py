"""Monitoring of signal spatio-temporal logic over weighted-graph space.

The package evaluates formulas that mix time-bounded temporal operators with
metric spatial operators (somewhere, everywhere, surround) over traces
sampled at a finite set of graph locations, under both a Boolean and a
robustness (quantitative) semantics, and layers a statistical model-checking
harness plus reference reaction-diffusion trace generators on top.
"""

from .errors import (
    EqualityAtomError,
    GraphError,
    GridMismatchError,
    HorizonError,
    IntegrationError,
    SchemaError,
    SSTLError,
    TraceFormatError,
)
from .logic import (
    ParseError,
    parse_formula,
    parse_script,
    pretty,
    read_script,
    temporal_depth,
    until_count,
)
from .models import (
    Trace,
    TuringGenerator,
    TuringParams,
    read_trace,
    simulate_turing,
    simulate_turing_many,
    write_trace,
)
from .monitor_bool import BoolResult, monitor_bool, surround_by_enumeration
from .monitor_quant import (
    QuantResult,
    brute_force_surround,
    monitor_quant,
    quant_surround,
    robustness_at_index,
)
from .signals import (
    BooleanSignal,
    GridSnapWarning,
    QuantSignal,
    bool_and,
    bool_not,
    bool_or,
    bool_until,
    quant_max,
    quant_min,
    quant_neg,
    quant_pointwise,
    quant_until,
)
from .smc import SMCEstimate, SweepResult, estimate, pearson, sweep, wilson_interval
from .space import (
    SpaceModel,
    build_space,
    external_boundary,
    locations_in_range,
    read_graph,
    regular_grid,
    write_graph,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
