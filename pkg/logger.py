import logging
import os

LOG_LEVELS = {"info": logging.INFO, "debug": logging.DEBUG}


def create_logger(cfg, phase='simulate'):
    """Root logger writing to <log_dir>/<version>_<phase>.log and to the console"""
    if cfg.log_level not in LOG_LEVELS:
        raise NotImplementedError("Log level has to be one of info and debug")
    final_log_file = os.path.join(cfg.log_dir, '{}_{}.log'.format(cfg.version, phase))
    head = '%(asctime)-15s %(message)s'
    # several commands may run in one process, each gets its own file
    logging.basicConfig(filename=str(final_log_file), format=head, force=True)
    logger = logging.getLogger()
    logger.setLevel(LOG_LEVELS[cfg.log_level])
    logger.addHandler(logging.StreamHandler())
    return logger
