"""Marching-squares iso-contour extraction on a rectilinear scalar field."""

import numpy as np

__all__ = ["marching_squares"]


def _edge_crossings(field, level, x, y):
    """Crossing point per grid edge, computed once so neighboring cells share it exactly.

    Returns {edge_id: (px, py)} where edge_id is ('h', i, j) for the edge
    (i,j)-(i+1,j) and ('v', i, j) for (i,j)-(i,j+1).
    """
    crossings = {}
    ni, nj = field.shape
    for i in range(ni - 1):
        for j in range(nj):
            va, vb = field[i, j], field[i + 1, j]
            if (va > level) != (vb > level):
                t = (level - va) / (vb - va)
                crossings[("h", i, j)] = (x[i] + t * (x[i + 1] - x[i]), y[j])
    for i in range(ni):
        for j in range(nj - 1):
            va, vb = field[i, j], field[i, j + 1]
            if (va > level) != (vb > level):
                t = (level - va) / (vb - va)
                crossings[("v", i, j)] = (x[i], y[j] + t * (y[j + 1] - y[j]))
    return crossings


def _cell_segments(field, level, crossings):
    """Segments as pairs of edge ids, with saddle cells split by the center value."""
    segments = []
    ni, nj = field.shape
    for i in range(ni - 1):
        for j in range(nj - 1):
            edges = [  # counter-clockwise: bottom, right, top, left
                ("h", i, j),
                ("v", i + 1, j),
                ("h", i, j + 1),
                ("v", i, j),
            ]
            hit = [e for e in edges if e in crossings]
            if len(hit) == 2:
                segments.append((hit[0], hit[1]))
            elif len(hit) == 4:
                center = 0.25 * (
                    field[i, j] + field[i + 1, j] + field[i, j + 1] + field[i + 1, j + 1]
                )
                if (center > level) == (field[i, j] > level):
                    segments.append((edges[0], edges[3]))
                    segments.append((edges[1], edges[2]))
                else:
                    segments.append((edges[0], edges[1]))
                    segments.append((edges[2], edges[3]))
    return segments


def _chain(segments):
    """Join segments sharing edge ids into maximal polylines of edge ids."""
    incident = {}
    for s, (a, b) in enumerate(segments):
        incident.setdefault(a, []).append(s)
        incident.setdefault(b, []).append(s)

    used = [False] * len(segments)
    chains = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        line = list(segments[start])
        for head in (True, False):
            while True:
                pt = line[-1] if head else line[0]
                nxt = next((s for s in incident[pt] if not used[s]), None)
                if nxt is None:
                    break
                used[nxt] = True
                a, b = segments[nxt]
                other = b if a == pt else a
                if head:
                    line.append(other)
                else:
                    line.insert(0, other)
        chains.append(line)
    return chains


def marching_squares(field, level, x, y):
    """Iso-contours of field (shape (len(x), len(y))) at the given level.

    Returns a list of (k, 2) vertex arrays in (x, y) coordinates; open
    contours terminate at the grid edge.  Neighboring cells share crossing
    points exactly, so chaining is unambiguous.
    """
    field = np.asarray(field, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if field.shape != (len(x), len(y)):
        raise ValueError(f"field shape {field.shape} does not match axes ({len(x)}, {len(y)})")
    crossings = _edge_crossings(field, level, x, y)
    segments = _cell_segments(field, level, crossings)
    return [np.array([crossings[e] for e in chain]) for chain in _chain(segments)]
