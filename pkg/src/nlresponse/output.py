"""Deterministic file writers: CSV grids, 8-bit NetPBM (P5) images, JSON sidecars."""
import json
from pathlib import Path

import numpy as np

SIDECAR_SUFFIX = ".meta.json"


def write_csv(path, header, columns):
    """Write equal-length columns with full double precision."""
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    n = cols[0].size
    if any(c.size != n for c in cols):
        raise ValueError("CSV columns differ in length")
    np.savetxt(path, np.column_stack(cols), fmt="%.17g", delimiter=",", header=",".join(header), comments="")


def pgm_bytes(image):
    """P5 encoding of a 2D array, linearly mapped so min -> 0 and max -> 255.

    A constant image maps to all zeros.  Returns ``(bytes, vmin, vmax)``.
    """
    image = np.asarray(image, dtype=float)
    vmin, vmax = float(image.min()), float(image.max())
    if vmax > vmin:
        scaled = np.rint((image - vmin) / (vmax - vmin) * 255.0)
    else:
        scaled = np.zeros_like(image)
    pixels = scaled.astype(np.uint8)
    h, w = pixels.shape
    return b"P5\n%d %d\n255\n" % (w, h) + pixels.tobytes(), vmin, vmax


def spectrum_image(values):
    """Map [w_tau, w_t] to image rows (w_t descending) by columns (w_tau ascending)."""
    return np.asarray(values).T[::-1, :]


def write_pgm(path, image):
    data, vmin, vmax = pgm_bytes(image)
    Path(path).write_bytes(data)
    return vmin, vmax


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def write_sidecar(path, meta):
    side = Path(str(path) + SIDECAR_SUFFIX)
    write_json(side, meta)
    return side
