from .config_loader import Config
from .logging_config import configure_logging

__all__ = ['Config', 'configure_logging']
