from .step_logger import StepLogger, configure_logging, get_step_logger

__all__ = [
    "StepLogger",
    "configure_logging",
    "get_step_logger",
]
