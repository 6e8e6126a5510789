from enum import Enum

class DesignVariableKind(Enum):
    YOUNG = "E"
    TRANSLATION = "translation"
    ORIENTATION = "orientation"
    VELOCITY = "velocity"
    FORCE = "force"

    @staticmethod
    def from_string(kind_str: str):
        try:
            return DesignVariableKind(kind_str)
        except ValueError:
            raise ValueError(f"Invalid design variable: '{kind_str}'. Available variables are: {', '.join([kind.value for kind in DesignVariableKind])}")

class GradcheckVariable(Enum):
    """Raw per-entry inputs compared against finite differences."""
    POSITION = "q0"
    VELOCITY = "v0"
    FORCE = "f_ext"
    WEIGHT = "w"
    YOUNG = "E"

    @staticmethod
    def from_string(variable_str: str):
        try:
            return GradcheckVariable(variable_str)
        except ValueError:
            raise ValueError(f"Invalid gradcheck variable: '{variable_str}'. Available variables are: {', '.join([variable.value for variable in GradcheckVariable])}")
