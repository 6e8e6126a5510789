class LineSearchFailedError(Exception):
    """Raised when backtracking cannot find a step that decreases the objective."""
    def __init__(self, iteration: int, energy: float, gradient_norm: float):
        self.iteration = iteration
        self.energy = energy
        self.gradient_norm = gradient_norm
        self.message = (f"Line search failed at Newton iteration {iteration} "
                        f"(energy {energy:.6e}, gradient norm {gradient_norm:.3e})")
        super().__init__(self.message)
