import logging as _logging

_logging.getLogger(__name__).addHandler(_logging.NullHandler())

# Gallery machines and oracle patterns register themselves on import;
# import order follows the dependencies between the modules.
from . import (
    sopoly,
    oracle,
    resources,
    machine,
    transformers,
    gallery,
)
from .workbench import Workbench
from .sopoly import Description, LengthFn, MultiPoly, UniPoly
from .oracle import Oracle, TableOracle, AdaptiveOracle
from .machine import Machine, Program, run
from .resources import Trace
