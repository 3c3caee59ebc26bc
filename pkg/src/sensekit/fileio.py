"""Plain-text file formats: matrix CSV, mask CSV, and edge lists.

Matrix cells are written in shortest round-trip decimal form, so a
write/read cycle is bit-exact.  An empty cell marks an unobserved entry;
reading always returns the matrix together with the mask it implies.
"""

import numpy as np

from .linalg import Mask, as_matrix

__all__ = [
    "read_edge_list",
    "read_mask_csv",
    "read_matrix_csv",
    "write_mask_csv",
    "write_matrix_csv",
]


def write_matrix_csv(path, m, mask=None, header=False):
    """Write a matrix as CSV; entries off `mask` become empty cells."""
    m = as_matrix(m)
    observed = None
    if mask is not None:
        if mask.shape != m.shape:
            raise ValueError(f"mask shape {mask.shape} != matrix shape {m.shape}")
        observed = mask.observed
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(",".join(f"col_{j}" for j in range(m.shape[1])) + "\n")
        for i in range(m.shape[0]):
            cells = (
                repr(float(m[i, j])) if observed is None or observed[i, j] else ""
                for j in range(m.shape[1])
            )
            fh.write(",".join(cells) + "\n")


def read_matrix_csv(path, header=False):
    """Read a matrix CSV; returns (matrix, mask) with empty cells unobserved.

    Unobserved entries hold 0 in the returned matrix; the mask records
    which cells actually carried a value.
    """
    rows, flags = [], []
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if header:
        lines = lines[1:]
    for line in lines:
        if line == "" and not rows:
            continue
        cells = line.split(",")
        rows.append([float(c) if c != "" else 0.0 for c in cells])
        flags.append([c != "" for c in cells])
    if not rows:
        raise ValueError(f"{path} contains no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path} has ragged rows (widths {sorted(widths)})")
    return np.array(rows), Mask(np.array(flags, dtype=bool))


def write_mask_csv(path, mask):
    """Write a mask as a 0/1 CSV of the same shape as the matrix it masks."""
    np.savetxt(path, mask.observed.astype(int), fmt="%d", delimiter=",")


def read_mask_csv(path):
    raw = np.loadtxt(path, delimiter=",", dtype=int, ndmin=2)
    if not np.all((raw == 0) | (raw == 1)):
        raise ValueError(f"{path} must contain only 0/1 cells")
    return Mask(raw.astype(bool))


def read_edge_list(path):
    """Parse an edge-list file: one "i j" pair per line, 0-based indices.

    Blank lines are skipped and '#' starts a comment (full-line or
    trailing).  Returns the list of (i, j) tuples in file order.
    """
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'i j', got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer agent index") from exc
            if i < 0 or j < 0:
                raise ValueError(f"{path}:{lineno}: indices must be nonnegative")
            edges.append((i, j))
    return edges
