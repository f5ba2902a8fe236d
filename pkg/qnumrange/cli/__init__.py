from .main import CommandResult, build_parser, run
from .selftest import SelfTestSuite, CheckRow

__all__ = ['CommandResult', 'build_parser', 'run', 'SelfTestSuite', 'CheckRow']
