class MaxIterationsError(Exception):
    """Raised in strict mode when the PD loop hits its cap without passing the dual gate."""
    def __init__(self, frame: int, iterations: int, step_residual: float, rhs_residual: float):
        self.frame = frame
        self.iterations = iterations
        self.step_residual = step_residual
        self.rhs_residual = rhs_residual
        self.message = (f"Frame {frame}: no convergence after {iterations} iterations "
                        f"(step {step_residual:.3e}, rhs {rhs_residual:.3e})")
        super().__init__(self.message)

class InvalidStateError(Exception):
    """Raised when a simulation state has the wrong shape or non-finite entries."""
    pass
