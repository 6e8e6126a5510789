from enum import Enum

class LossKind(Enum):
    TARGET_COM = "target_com"
    TRAJECTORY_MATCH = "trajectory_match"
    FINAL_POSE = "final_pose"
    RANDOM_LINEAR = "random_linear"

    @staticmethod
    def from_string(kind_str: str):
        try:
            return LossKind(kind_str)
        except ValueError:
            raise ValueError(f"Invalid loss kind: '{kind_str}'. Available kinds are: {', '.join([kind.value for kind in LossKind])}")
