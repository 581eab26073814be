"""Exception hierarchy. Everything raised on purpose derives from GraphDeltaError."""


class GraphDeltaError(Exception):
    pass


class PreconditionViolated(GraphDeltaError):
    """An operation does not apply to the graph it was given (corrupt or misordered log)."""

    def __init__(self, op, reason: str):
        self.op = op
        self.reason = reason
        super().__init__(f"{op}: {reason}")


class NodeAbsent(GraphDeltaError):
    def __init__(self, node: int):
        self.node = node
        super().__init__(f"node {node} is not in the snapshot")


class EmptyGraph(GraphDeltaError):
    pass


class NonMonotonicTime(GraphDeltaError):
    pass


class InvalidRange(GraphDeltaError, ValueError):
    pass


class ParseError(GraphDeltaError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class TargetOutOfRange(GraphDeltaError):
    pass


class SeedAbsentAtTarget(GraphDeltaError):
    def __init__(self, node: int, t: int):
        self.node = node
        self.t = t
        super().__init__(f"seed node {node} does not exist at tick {t}")


class EmptyCatalog(GraphDeltaError):
    pass


class InapplicablePlan(GraphDeltaError):
    pass


class NodeAbsentAtTick(GraphDeltaError):
    def __init__(self, node: int, t: int):
        self.node = node
        self.t = t
        super().__init__(f"node {node} does not exist at tick {t}")


class AllTicksAbsent(GraphDeltaError):
    def __init__(self, node: int, t_k: int, t_l: int):
        self.node = node
        super().__init__(f"node {node} is absent at every tick of [{t_k}, {t_l}]")


class InvalidParams(GraphDeltaError, ValueError):
    pass
