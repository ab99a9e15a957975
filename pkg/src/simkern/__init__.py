"""
Ce package contient le noyau de simulation à événements discrets : horloge virtuelle, ordonnanceur,
journal d'événements et générateurs pseudo-aléatoires nommés.
"""

from .event_log import EventKind, EventLog, EventRecord
from .exception_simkern import ClockRegressionError, SchedulingInPastError
from .kernel import EventHandle, PeriodicHandle, SimClock, SimKernel
from .random_stream import RandomStreams

__all__ = [
    "ClockRegressionError",
    "EventHandle",
    "EventKind",
    "EventLog",
    "EventRecord",
    "PeriodicHandle",
    "RandomStreams",
    "SchedulingInPastError",
    "SimClock",
    "SimKernel",
]
