#!/usr/bin/env python3
"""Write a 5,000-sample MNIST training subset as standard IDX files.

The subset is the one bundled with the `mlxtend` wheel (500 images per digit,
drawn from the MNIST training set). It is sorted by class in the wheel, so the
rows are interleaved with a fixed permutation before writing; taking the first
N samples of the output then yields a class-balanced prefix.

Usage:
    scripts/make_mnist_subset.py [--csv mnist_5k.csv.gz] [--out data/mnist]

Without --csv the wheel is fetched with `pip download`.
"""

import argparse
import glob
import gzip
import os
import random
import struct
import subprocess
import sys
import tempfile
import zipfile


def fetch_csv(tmp):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "mlxtend", "-d", tmp],
        check=True,
    )
    wheel = glob.glob(os.path.join(tmp, "mlxtend-*.whl"))[0]
    with zipfile.ZipFile(wheel) as z:
        return z.read("mlxtend/data/data/mnist_5k.csv.gz")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--csv", help="path to mnist_5k.csv.gz")
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "mnist"))
    ap.add_argument("--seed", type=int, default=20190601)
    args = ap.parse_args()

    if args.csv:
        with open(args.csv, "rb") as f:
            raw = f.read()
    else:
        with tempfile.TemporaryDirectory() as tmp:
            raw = fetch_csv(tmp)

    rows = []
    for line in gzip.decompress(raw).decode().splitlines():
        vals = [int(float(v)) for v in line.split(",")]
        pixels, label = vals[:-1], vals[-1]
        assert len(pixels) == 784 and 0 <= label <= 9
        rows.append((bytes(pixels), label))

    order = list(range(len(rows)))
    random.Random(args.seed).shuffle(order)
    rows = [rows[i] for i in order]

    os.makedirs(args.out, exist_ok=True)
    n = len(rows)
    with open(os.path.join(args.out, "train-images-idx3-ubyte"), "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, n, 28, 28))
        for pixels, _ in rows:
            f.write(pixels)
    with open(os.path.join(args.out, "train-labels-idx1-ubyte"), "wb") as f:
        f.write(struct.pack(">II", 0x00000801, n))
        f.write(bytes(label for _, label in rows))
    print(f"wrote {n} samples to {os.path.abspath(args.out)}")


if __name__ == "__main__":
    main()
