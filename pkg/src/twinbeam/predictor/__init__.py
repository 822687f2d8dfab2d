from .models import ConditioningVector, TrainingConfig, TrajectoryBundle
