"""Exception hierarchy shared by every module."""

from __future__ import annotations


class LayoutError(Exception):
    """Base class for all errors raised by sorlayout."""


class DisconnectedGraph(LayoutError):
    def __init__(self, component_count: int):
        self.component_count = component_count
        super().__init__(
            f"graph is disconnected ({component_count} components); "
            "ideal distances are infinite"
        )


class InvalidSize(LayoutError, ValueError):
    pass


class SingularSystem(LayoutError):
    pass


class NoConvergence(LayoutError):
    def __init__(self, iterations: int, residual: float, message: str | None = None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            message
            or f"no convergence after {iterations} iterations (residual {residual:.3e})"
        )


class NonFiniteStress(LayoutError):
    """Stress became inf/nan. ``trace`` holds the iterations completed so far."""

    def __init__(self, iteration: int, trace=None):
        self.iteration = iteration
        self.trace = trace
        super().__init__(f"stress became non-finite at iteration {iteration}")


class InsufficientTail(LayoutError):
    def __init__(self, usable: int, required: int = 5):
        self.usable = usable
        self.required = required
        super().__init__(
            f"only {usable} usable tail points, need at least {required}"
        )


class UnsupportedDimension(LayoutError, ValueError):
    pass


class ParseError(LayoutError, ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class MissingHeader(ParseError):
    def __init__(self, line: int = 1):
        super().__init__(line, "missing 'vertices N' header")


class SelfLoop(ParseError):
    def __init__(self, vertex: int, line: int = 0):
        self.vertex = vertex
        super().__init__(line, f"self-loop on vertex {vertex}")


class DuplicateEdge(ParseError):
    def __init__(self, u: int, v: int, line: int = 0):
        self.u, self.v = u, v
        super().__init__(line, f"duplicate edge {u}-{v}")
