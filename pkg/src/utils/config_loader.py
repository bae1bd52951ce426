from configparser import ConfigParser
import os

from dotenv import load_dotenv


class Config:
    """Application configuration loader"""

    _instance = None
    _config = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(Config, cls).__new__(cls)
            cls._instance._load_config()
        return cls._instance

    @classmethod
    def reset(cls):
        """Forget the loaded settings so the next Config() re-reads them"""
        cls._instance = None

    def _load_config(self):
        """Load configuration from config.ini (or the file named by BIOROBOTS_CONFIG)"""
        load_dotenv()
        self._config = ConfigParser()
        config_path = os.environ.get('BIOROBOTS_CONFIG') or os.path.join(
            os.path.dirname(os.path.dirname(os.path.dirname(__file__))),
            'config',
            'config.ini'
        )
        self._config.read(config_path)
        self.config_path = config_path

    @property
    def app_name(self):
        return self._config.get('application', 'app_name', fallback='Biorobots DE')

    @property
    def app_version(self):
        return self._config.get('application', 'version', fallback='1.0.0')

    @property
    def log_level(self):
        return os.environ.get('BIOROBOTS_LOG_LEVEL') or self._config.get('application', 'log_level', fallback='INFO')

    @property
    def log_file(self):
        return self._config.get('application', 'log_file', fallback='') or None

    @property
    def jobs(self):
        return self._config.getint('execution', 'jobs', fallback=1)

    @property
    def output_dir(self):
        return self._config.get('execution', 'output_dir', fallback='results')

    @property
    def evaluator_timeout(self):
        return self._config.getfloat('evaluator', 'timeout_seconds', fallback=600.0)

    @property
    def retry_attempts(self):
        return self._config.getint('evaluator', 'retry_attempts', fallback=1)
