class ProxDivergedError(Exception):
    """Raised when the stretch-space Newton iteration misses its residual tolerance within the cap."""
    def __init__(self, element: int, residual: float, iterations: int):
        self.element = element
        self.residual = residual
        self.iterations = iterations
        self.message = f"Proximal Newton did not converge for element {element}: residual {residual:.3e} after {iterations} iterations"
        super().__init__(self.message)

class SingularFilteredHessianError(Exception):
    """Raised when the unfiltered prox-map Hessian is too close to singular to invert."""
    def __init__(self, element: int, min_eigenvalue: float):
        self.element = element
        self.min_eigenvalue = min_eigenvalue
        self.message = f"Prox-map Hessian of element {element} is singular (|eigenvalue| = {min_eigenvalue:.3e})"
        super().__init__(self.message)
