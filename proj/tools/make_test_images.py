#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Write the grayscale test images under data/ as binary PGM.

Uses the scikit-image "camera" photograph: 512x512 8-bit, downscaled by
block averaging to 256x256 and 64x64.
"""
import argparse
from pathlib import Path

import numpy as np
from skimage import data


def block_mean(img: np.ndarray, factor: int) -> np.ndarray:
    h, w = img.shape
    blocks = img.reshape(h // factor, factor, w // factor, factor).astype(np.float64)
    return np.clip(np.rint(blocks.mean(axis=(1, 3))), 0, 255).astype(np.uint8)


def write_pgm(path: Path, img: np.ndarray) -> None:
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(img.tobytes())


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    camera = data.camera()
    for size in (256, 64):
        path = args.out_dir / f"camera_{size}.pgm"
        write_pgm(path, block_mean(camera, camera.shape[0] // size))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
