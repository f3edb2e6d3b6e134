"""Seeded synthetic images with known edges, for tests and demos."""

from dataclasses import dataclass

import numpy as np


@dataclass
class LineSpeckleFixture:
    image: np.ndarray
    line: np.ndarray
    speckles: np.ndarray  # (n, 2) array of (x, y)


def line_speckle(size=128, length=60, n_speckles=40, thickness=3, seed=0,
                 clearance=6) -> LineSpeckleFixture:
    """A 45 degree bright line plus isolated single-pixel speckles on black.

    Speckles keep a Chebyshev distance of at least ``clearance`` from the
    line and from each other, so each one is genuinely isolated.
    """
    rng = np.random.default_rng(seed)
    img = np.zeros((size, size))
    line = np.zeros((size, size), dtype=bool)
    start = (size - length) // 2
    half = thickness // 2
    for i in range(length):
        y = start + i
        for dx in range(-half, half + 1):
            line[y, start + i + dx] = True
    img[line] = 255.0

    near = np.zeros_like(line)
    ys, xs = np.nonzero(line)
    for y, x in zip(ys, xs):
        near[max(y - clearance, 0):y + clearance + 1, max(x - clearance, 0):x + clearance + 1] = True
    speckles = []
    while len(speckles) < n_speckles:
        x, y = (int(v) for v in rng.integers(1, size - 1, size=2))
        if near[y, x]:
            continue
        speckles.append((x, y))
        img[y, x] = 255.0
        near[max(y - clearance, 0):y + clearance + 1, max(x - clearance, 0):x + clearance + 1] = True
    return LineSpeckleFixture(img, line, np.array(speckles))


def boundary(labels) -> np.ndarray:
    """Pixels having a 4-neighbour with a different label."""
    lab = np.asarray(labels)
    out = np.zeros(lab.shape, dtype=bool)
    dv = lab[1:, :] != lab[:-1, :]
    dh = lab[:, 1:] != lab[:, :-1]
    out[1:, :] |= dv
    out[:-1, :] |= dv
    out[:, 1:] |= dh
    out[:, :-1] |= dh
    return out


def shapes_image(size=256, seed=0, n_shapes=4, n_speckles=60):
    """Piecewise-constant scene of rectangles and discs with impulse speckles.

    Returns
    -------
    image : ndarray (size, size)
    gt : ndarray of bool
        Boundaries of the clean label map; speckles are not edges.
    """
    rng = np.random.default_rng(seed)
    labels = np.zeros((size, size), dtype=np.int32)
    levels = [float(rng.integers(10, 60))]
    yy, xx = np.mgrid[0:size, 0:size]
    for s in range(1, n_shapes + 1):
        cx, cy = rng.integers(size // 6, size - size // 6, size=2)
        extent = int(rng.integers(size // 10, size // 4))
        if rng.random() < 0.5:
            mask = (np.abs(xx - cx) <= extent) & (np.abs(yy - cy) <= int(extent * rng.uniform(0.5, 1.0)))
        else:
            mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= extent ** 2
        labels[mask] = s
        levels.append(float(rng.integers(120, 250)))
    image = np.asarray(levels)[labels]
    gt = boundary(labels)
    for _ in range(n_speckles):
        x, y = rng.integers(2, size - 2, size=2)
        image[y, x] = 255.0 if image[y, x] < 128 else 0.0
    return image, gt


def shapes_corpus(n=10, size=256, seed=0):
    """``n`` (name, image, ground truth) triples with per-image seeds."""
    return [(f"synth_{i:02d}", *shapes_image(size, seed=seed * 1000 + i)) for i in range(n)]
