import numpy as np

# nodes closer than this are the same node
NODE_EPS = 1e-13


def uniform_nodes(lower, upper, max_step):
    n = max(int(np.ceil((upper - lower) / max_step - 1e-9)), 1)
    return np.linspace(lower, upper, n + 1)


def merge_nodes(*arrays, lower=None, upper=None):
    """Sorted union of node arrays, clipped to [lower, upper], near-duplicates collapsed.

    The endpoints always survive; an interior node within NODE_EPS of a kept neighbour is dropped.
    """
    nodes = np.unique(np.concatenate([np.atleast_1d(np.asarray(a, dtype=float)) for a in arrays]))
    if lower is not None:
        nodes = nodes[nodes >= lower]
        if nodes.size == 0 or nodes[0] != lower:
            nodes = np.insert(nodes, 0, lower)
    if upper is not None:
        nodes = nodes[nodes <= upper]
        if nodes.size == 0 or nodes[-1] != upper:
            nodes = np.append(nodes, upper)
    if nodes.size <= 2:
        return nodes
    keep = np.ones(nodes.size, dtype=bool)
    last = nodes[0]
    for k in range(1, nodes.size - 1):
        if nodes[k] - last < NODE_EPS:
            keep[k] = False
        else:
            last = nodes[k]
    if nodes[-1] - last < NODE_EPS and keep.sum() > 2:
        keep[np.nonzero(keep[:-1])[0][-1]] = False
    return nodes[keep]


def midpoints(nodes):
    return 0.5 * (nodes[1:] + nodes[:-1])

