class OptimizerStalledError(Exception):
    """Raised when the optimizer runs out of evaluations or cannot find an acceptable step."""
    def __init__(self, evaluations: int, best_loss: float, reason: str, result=None):
        self.evaluations = evaluations
        self.best_loss = best_loss
        self.reason = reason
        self.result = result
        self.message = f"Optimizer stalled after {evaluations} evaluations ({reason}); best loss {best_loss:.6e}"
        super().__init__(self.message)
