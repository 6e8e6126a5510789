class DegenerateElementError(Exception):
    """Raised when a tetrahedron has non-positive or vanishing rest volume."""
    def __init__(self, element: int, volume: float, message: str = "Degenerate or inverted element"):
        self.element = element
        self.volume = volume
        self.message = f"{message}: element {element} has rest volume {volume:.3e}"
        super().__init__(self.message)

class InvalidMeshError(Exception):
    """Raised when mesh connectivity or coordinates are malformed."""
    pass
