from enum import Enum

class EnergyKind(Enum):
    COROTATED = "corotated"
    NEO_HOOKEAN = "neohookean"

    @staticmethod
    def from_string(kind_str: str):
        try:
            return EnergyKind(kind_str)
        except ValueError:
            raise ValueError(f"Invalid energy kind: '{kind_str}'. Available energies are: {', '.join([kind.value for kind in EnergyKind])}")

class ConstraintKind(Enum):
    """Per-element projection registered with the global step."""
    ROTATION = "rotation"
    VOLUME = "volume"
    LOG_BARRIER = "log_barrier"
    NEO_HOOKEAN_PROX = "neohookean_prox"

    @property
    def is_proximal(self) -> bool:
        return self in (ConstraintKind.LOG_BARRIER, ConstraintKind.NEO_HOOKEAN_PROX)
