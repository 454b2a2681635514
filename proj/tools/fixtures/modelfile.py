# Copyright 2026 The pvqnet Authors
# SPDX-License-Identifier: Apache-2.0
"""Minimal ModelFile writer for externally trained float networks.

Any trainer can produce a pvqnet model by emitting this layout; see
docs/FORMATS.md for the byte-level description.
"""

import struct

import numpy as np

MAGIC = b"PVQNET01"


def _fmt_real(x):
    return repr(float(x))


def write_mlp(path, name, input_size, layers):
    """layers: list of dicts with keys kind ('fc' | 'dropout'), and for fc:
    weights (units x in, float32), biases (units,), activation."""
    lines = [f"name {name}", f"layer IN kind=input shape={input_size}"]
    body = bytearray()
    fc_index = 0
    drop_index = 0
    for layer in layers:
        if layer["kind"] == "fc":
            w = np.asarray(layer["weights"], dtype="<f4")
            b = np.asarray(layer["biases"], dtype="<f4")
            units = w.shape[0]
            lines.append(
                f"layer FC{fc_index} kind=fc units={units} "
                f"activation={layer['activation']} shift=0 params=float"
            )
            body += w.tobytes(order="C")
            body += b.tobytes(order="C")
            fc_index += 1
        elif layer["kind"] == "dropout":
            lines.append(
                f"layer DRP{drop_index} kind=dropout rate={_fmt_real(layer['rate'])}"
            )
            drop_index += 1
        else:
            raise ValueError(layer["kind"])
    header = ("\n".join(lines) + "\n").encode("ascii")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        f.write(bytes(body))


def write_idx_images(path, images):
    images = np.asarray(images, dtype=np.uint8)
    count, rows, cols = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, count, rows, cols))
        f.write(images.tobytes(order="C"))


def write_idx_labels(path, labels):
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, labels.shape[0]))
        f.write(labels.tobytes())
