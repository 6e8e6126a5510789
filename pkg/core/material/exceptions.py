class InvalidPoissonError(Exception):
    """Raised when Poisson's ratio leaves [0, 0.5), where the first Lame parameter is singular."""
    def __init__(self, poisson: float):
        self.poisson = poisson
        super().__init__(f"Poisson's ratio must satisfy 0 <= nu < 0.5, got {poisson}")

class NonPositiveJacobianError(Exception):
    """Raised when an energy that needs det(F) > 0 is evaluated on an inverted or flat element."""
    def __init__(self, min_jacobian: float, element: int = -1):
        self.min_jacobian = min_jacobian
        self.element = element
        location = f" at element {element}" if element >= 0 else ""
        super().__init__(f"Non-positive deformation Jacobian {min_jacobian:.3e}{location}")

class InvalidMaterialError(Exception):
    """Raised when material arrays are inconsistent with the mesh or out of range."""
    pass
