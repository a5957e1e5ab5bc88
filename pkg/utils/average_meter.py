from collections.abc import Iterable

import numpy as np


# noinspection PyAttributeOutsideInit
class AverageMeter(object):
    """Computes and stores the average, maximum and current value"""

    def __init__(self, multiplier=1.0):
        self.multiplier = multiplier
        self.reset()

    def reset(self):
        self.val = 0
        self.avg = 0
        self.sum = 0
        self.max = 0
        self.count = 0

    def update(self, val, n=1):
        if isinstance(val, Iterable):
            val = np.array(val, dtype=float)
            if val.size == 0:
                return
            largest = self.multiplier * float(np.max(val))
            self.update(np.mean(val), n=val.size)
            self.max = max(self.max, largest)
        else:
            self.val = self.multiplier * val
            self.max = max(self.max, self.val) if self.count else self.val
            self.sum += self.multiplier * val * n
            self.count += n
            self.avg = self.sum / self.count if self.count != 0 else 0

    def __str__(self):
        return "%.6g (%.6g, max %.6g)" % (self.val, self.avg, self.max)
