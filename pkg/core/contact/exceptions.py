class SingularContactSystemError(Exception):
    """Raised when the lifted contact system cannot be factorized."""
    def __init__(self, num_rows: int, original_exception: Exception, message: str = "Contact system is singular"):
        self.num_rows = num_rows
        self.original_exception = original_exception
        self.message = f"{message} ({num_rows} rows): {original_exception}"
        super().__init__(self.message)

class InvalidObstacleError(Exception):
    """Raised when an obstacle description is malformed."""
    pass
