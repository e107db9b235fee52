import logging

from lcrl.learner import EpisodeRecord
from lcrl.logger import StepLogger, configure_logging, get_step_logger


class TestStepLogger:
    def test_step_lines_reach_the_file(self, tmp_path):
        path = configure_logging(str(tmp_path), "run.log", "INFO")
        get_step_logger().log_step("TRAIN_START", "env=region3")
        get_step_logger().log_step("PSP_NONCONVERGENCE", "residual 1e-2", "ERROR")
        text = path.read_text()
        assert " - INFO - [TRAIN_START] env=region3" in text
        assert " - ERROR - [PSP_NONCONVERGENCE] residual 1e-2" in text

    def test_episode_lines_are_debug(self, tmp_path):
        logger = StepLogger(log_dir=str(tmp_path), log_file="quiet.log", level="INFO")
        logger.log_episode(EpisodeRecord(3, 10, 2.0, "sink", 4, 0.5, 0.01, 0.1))
        assert "[EPISODE]" not in (tmp_path / "quiet.log").read_text()

        logging.getLogger().setLevel(logging.DEBUG)
        logger.log_episode(EpisodeRecord(4, 10, 2.0, "sink", 4, 0.5, 0.01, 0.1))
        assert "[EPISODE] episode=4" in (tmp_path / "quiet.log").read_text()

    def test_default_file_name_is_timestamped(self, tmp_path):
        logger = StepLogger(log_dir=str(tmp_path))
        assert logger.get_log_file_path().startswith(str(tmp_path / "main_"))

    def test_library_logger_leaves_handlers_alone(self):
        assert get_step_logger().get_log_file_path() is None
