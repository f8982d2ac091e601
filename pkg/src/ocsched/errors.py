"""Exception types shared across the scheduler."""


class SchedulingError(Exception):
    """Base class for all scheduler-specific failures."""


class DuplicateSource(SchedulingError, ValueError):
    """A permutation pair list names the same ingress port twice."""


class DuplicateDestination(SchedulingError, ValueError):
    """A permutation pair list names the same egress port twice."""


class OutOfRange(SchedulingError, ValueError):
    """A port index falls outside [0, size)."""


class UnsupportedNodeCount(SchedulingError, ValueError):
    """The collective algorithm cannot run on this node count."""


class EmptySteps(SchedulingError, ValueError):
    """A model or schedule was requested for an empty step list."""


class NumericalBreakdown(SchedulingError, ArithmeticError):
    """The simplex engine exhausted its pivot budget or lost feasibility."""


class TooLarge(SchedulingError, ValueError):
    """The brute-force oracle guard: too many binaries to enumerate."""


class Infeasible(SchedulingError):
    """One-shot baseline cannot cover the workload: more configs than OCSes."""

    def __init__(self, configs: int, ocs_count: int):
        self.configs = configs
        self.ocs_count = ocs_count
        super().__init__(
            f"one-shot needs {configs} configurations but only {ocs_count} OCSes exist"
        )


class DimensionMismatch(SchedulingError, ValueError):
    """Schedule array shapes disagree with the scenario/step dimensions."""


class RefusesInvalid(SchedulingError):
    """Bundle export rejected a schedule that fails simulator validation."""


class ParseError(SchedulingError, ValueError):
    """A structured input file (scenario, LP, bundle) breaks its grammar."""
