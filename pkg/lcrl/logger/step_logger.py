import logging
from datetime import datetime
from pathlib import Path
from typing import Optional

from ..config import LOG_DIR, LOG_LEVEL

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def configure_logging(log_dir: str = LOG_DIR, log_file: Optional[str] = None, level: str = LOG_LEVEL) -> Path:
    """Send records to a file under ``log_dir`` and to the console; returns the file path."""
    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)

    if log_file:
        target = log_path / log_file
    else:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        target = log_path / f"main_{timestamp}.log"

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=[
            logging.FileHandler(target),
            logging.StreamHandler(),
        ],
        force=True,
    )
    return target


class StepLogger:
    """Tagged step logging shared by the learner, the oracle and the CLI.

    Messages come out as ``[STEP_NAME] details``. Constructing a StepLogger with
    ``configure=True`` installs a timestamped file handler next to the console
    handler; library code that only wants to emit records uses ``get_step_logger``.
    """

    def __init__(
        self,
        log_dir: str = LOG_DIR,
        log_file: Optional[str] = None,
        level: str = LOG_LEVEL,
        configure: bool = True,
        name: str = "lcrl",
    ):
        self.log_file: Optional[Path] = None
        if configure:
            self.log_file = configure_logging(log_dir, log_file, level)

        self.logger = logging.getLogger(name)

    def log_step(self, step_name: str, details, level: str = "INFO"):
        """Log one step.

        Args:
            step_name: Tag printed in brackets, e.g. EPISODE or ORACLE_MEC
            details: Free-form details; non-strings are formatted with str()
            level: DEBUG, INFO, WARNING or ERROR (anything else logs at INFO)
        """
        log_message = f"[{step_name}] {details}"

        level = level.upper()
        if level == "DEBUG":
            self.logger.debug(log_message)
        elif level == "WARNING":
            self.logger.warning(log_message)
        elif level == "ERROR":
            self.logger.error(log_message)
        else:
            self.logger.info(log_message)

    def log_episode(self, record) -> None:
        self.log_step(
            "EPISODE",
            f"episode={record.episode} iterations={record.iterations} "
            f"reward={record.reward:.4f} terminal={record.terminal} psp0={record.psp0:.4f}",
            "DEBUG",
        )

    def get_log_file_path(self) -> Optional[str]:
        return str(self.log_file) if self.log_file else None


def get_step_logger(name: str = "lcrl") -> StepLogger:
    """A StepLogger that leaves handler configuration to the application."""
    return StepLogger(configure=False, name=name)
