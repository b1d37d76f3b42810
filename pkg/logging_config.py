import logging


class CaseFilter(logging.Filter):
    """Supplies the 'case' field for records that were logged without one."""

    def filter(self, record):
        if not hasattr(record, 'case'):
            record.case = 'N/A'
        return True


def configure_logging(display_level=logging.INFO, log_file=None):
    """Configures the logging for our custom logging setup.

    Args:
        display_level (int): the logging display level, levels defined in logging, DEBUG, INFO, etc.
        log_file (string): optional file that receives the same records
    """
    # all logging goes through the root logger; the library modules only
    # attach a 'case' describing the evaluation point
    logger = logging.getLogger()
    logger.setLevel(logging.DEBUG)

    formatter = logging.Formatter('{levelname:.1s}, {case}, {message}, {funcName}, {module}',
                                  style='{',)
    case_filter = CaseFilter()

    consoleHandler = logging.StreamHandler()
    consoleHandler.setLevel(display_level)
    consoleHandler.setFormatter(formatter)
    consoleHandler.addFilter(case_filter)

    logger.addHandler(consoleHandler)

    if log_file is not None:
        fileHandler = logging.FileHandler(log_file)
        fileHandler.setFormatter(formatter)
        fileHandler.setLevel(display_level)
        fileHandler.addFilter(case_filter)

        logger.addHandler(fileHandler)
    return logger
