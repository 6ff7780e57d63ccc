"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A parameter violates an operation's precondition."""


class GraphParseError(ValueError):
    """Edge-list text could not be parsed into a valid graph.

    ``line`` is the 1-based offending line number, or None when the
    failure is a whole-file property (e.g. disconnected).
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class CapacityError(RuntimeError):
    """A requested exact computation exceeds the state-space guard."""


class ConsensusTimeout(RuntimeError):
    """A single run hit its step cap before reaching consensus.

    Carries the partial state so callers can inspect where the walk got
    stuck instead of silently truncating statistics.
    """

    def __init__(self, steps, state):
        super().__init__(f"no consensus after {steps} steps")
        self.steps = steps
        self.state = state


class ReplicationTimeout(RuntimeError):
    """One or more Monte Carlo replications hit the step cap.

    ``indices`` lists every offending replication index.
    """

    def __init__(self, indices, step_cap):
        indices = list(indices)
        preview = ", ".join(str(i) for i in indices[:10])
        if len(indices) > 10:
            preview += ", ..."
        super().__init__(
            f"{len(indices)} replication(s) exceeded step cap {step_cap}: [{preview}]"
        )
        self.indices = indices
        self.step_cap = step_cap
