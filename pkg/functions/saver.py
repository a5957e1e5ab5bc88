import json
import os

import numpy as np

import config
from models.measure import Measure


class ResultSaver(object):
    """Class that handles writing result files and reading measure snapshots back."""

    def __init__(self, logger, output_dir):
        if output_dir is None:
            raise ValueError("Output directory must be not None!")
        self.logger = logger
        self.save_dir = os.path.abspath(output_dir)
        os.makedirs(self.save_dir, exist_ok=True)

    def resolve(self, path_or_name):
        if os.path.isabs(path_or_name) or os.path.dirname(path_or_name):
            return path_or_name
        return os.path.join(self.save_dir, path_or_name)

    def save_csv(self, path_or_name, header, rows, fmt=config.FLOAT_FMT):
        path = self.resolve(path_or_name)
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        rows = np.asarray(rows, dtype=object if not isinstance(fmt, str) else float)
        if rows.size == 0:
            rows = rows.reshape(0, len(header))
        self.logger.info("Dumping %d rows to: %s" % (rows.shape[0], path))
        np.savetxt(path, rows, fmt=fmt, delimiter=",", header=",".join(header), comments="")
        return path

    def save_json(self, path_or_name, obj):
        path = self.resolve(path_or_name)
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        self.logger.info("Dumping to: %s" % path)
        with open(path, "w") as f:
            json.dump(obj, f, indent=2, sort_keys=True)
        return path

    @staticmethod
    def snapshot(measure: Measure, t=None):
        doc = measure.to_dict()
        doc["total_mass"] = measure.total_mass()
        if t is not None:
            doc["t"] = t
        return doc

    def load_snapshot(self, path) -> Measure:
        if not os.path.exists(path):
            raise ValueError("Snapshot file [%s] does not exist!" % path)
        self.logger.info("Loading snapshot file: %s" % path)
        with open(path) as f:
            doc = json.load(f)
        return Measure.from_dict(config.SPACE, 1.0, doc)
