"""Reading and writing 8-bit PNG / PGM / PPM images."""

from pathlib import Path

import numpy as np
from PIL import Image

IMAGE_SUFFIXES = (".png", ".pgm", ".ppm", ".pnm")


def read_image(path) -> np.ndarray:
    """Load an image as float64 ``(H, W)`` or ``(H, W, 3)`` in [0, 255]."""
    with Image.open(path) as im:
        im.load()
        if im.mode in ("L", "1", "P", "LA", "I", "I;16", "F"):
            if im.mode == "P":
                im = im.convert("RGB")
            else:
                im = im.convert("L")
        elif im.mode != "RGB":
            im = im.convert("RGB")
        return np.asarray(im, dtype=np.float64)


def to_uint8(image) -> np.ndarray:
    return np.clip(np.rint(np.asarray(image, dtype=np.float64)), 0, 255).astype(np.uint8)


def write_image(path, image) -> None:
    """Write a float image; the format follows the file suffix."""
    arr = to_uint8(image)
    Image.fromarray(arr).save(Path(path))


def write_edge_map(path, edges) -> None:
    """Write a boolean map as a PNG holding only 0 and 255."""
    arr = np.where(np.asarray(edges, dtype=bool), 255, 0).astype(np.uint8)
    Image.fromarray(arr).save(Path(path), format="PNG")


def read_edge_map(path) -> np.ndarray:
    img = read_image(path)
    if img.ndim == 3:
        img = img.mean(axis=2)
    return img > 127


def list_images(directory) -> list:
    d = Path(directory)
    return sorted(p for p in d.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
