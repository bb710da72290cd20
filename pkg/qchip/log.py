import logging
import sys

from aws_lambda_powertools import Logger

# stdout carries exported data only
logger = Logger(
    service="qchip",
    level="INFO",
    logger_handler=logging.StreamHandler(sys.stderr),
)


def set_level(level: str) -> None:
    logger.setLevel(level.upper())
