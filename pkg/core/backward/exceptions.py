class AdjointDivergedError(Exception):
    """Raised when neither the factor-preconditioned iteration nor GMRES reaches the adjoint tolerance."""
    def __init__(self, frame: int, residual: float, iterations: int):
        self.frame = frame
        self.residual = residual
        self.iterations = iterations
        self.message = (f"Frame {frame}: adjoint solve stalled at relative residual {residual:.3e} "
                        f"after {iterations} iterations")
        super().__init__(self.message)

class CacheMismatchError(Exception):
    """Raised when a forward cache is paired with a factor built for another system."""
    pass
