"""Digitization of dense-time behaviours for real-time verification.

The package is organised by concern:

* :mod:`digitization.timed_traces` - exact timestamps and the eps-digitization operator
* :mod:`digitization.timed_automata` - timed automata, Closed/Open classes, exact simulation
* :mod:`digitization.tick_semantics` - integral semantics as a finite automaton with TICK
* :mod:`digitization.mtl` - MTL parsing, syntactic classifiers and pointwise evaluation
* :mod:`digitization.closure_lab` - closure checkers, fuzz testers and the verification pipeline
* :mod:`digitization.cli` - the ``digitize`` command line tool
"""

from digitization.errors import DomainError, ParseError, ResourceError
from digitization.timed_traces import (
    Observation,
    TimedStateSequence,
    critical_epsilons,
    digitization_set,
    digitize_scalar,
    digitize_trace,
    parse_time,
)

__all__ = [
    "DomainError",
    "ParseError",
    "ResourceError",
    "Observation",
    "TimedStateSequence",
    "critical_epsilons",
    "digitization_set",
    "digitize_scalar",
    "digitize_trace",
    "parse_time",
]
