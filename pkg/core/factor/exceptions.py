class NotPositiveDefiniteError(Exception):
    """Raised when a pivot of the LDL^T factorization is not strictly positive."""
    def __init__(self, pivot_index: int, pivot_value: float, message: str = "Matrix is not positive definite"):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        self.message = f"{message}: pivot {pivot_index} = {pivot_value:.3e}"
        super().__init__(self.message)

class StaleFactorError(Exception):
    """Raised when a factor is used with a system whose signature it was not built for."""
    pass
