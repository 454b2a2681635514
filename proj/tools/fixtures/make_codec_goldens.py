# Copyright 2026 The pvqnet Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the codec golden containers in tests/golden/.

Independent of the C++ implementation; the layout is described in
docs/FORMATS.md.
"""

import heapq
import os
import struct
import sys
from functools import lru_cache

VECTOR = [0, 0, 3, -1, 0, 0, 0, 1, -2, 0, 0, 9, 0, -1, 0, 0]
HUFFMAN_V = 4


class Bits:
    def __init__(self):
        self.bits = []

    def put(self, value, width):
        for i in reversed(range(width)):
            self.bits.append((value >> i) & 1)

    def eg0(self, u):
        width = (u + 1).bit_length()
        self.put(0, width - 1)
        self.put(u + 1, width)

    def payload(self):
        padded = self.bits + [0] * (-len(self.bits) % 8)
        out = bytearray()
        for i in range(0, len(padded), 8):
            byte = 0
            for b in padded[i:i + 8]:
                byte = (byte << 1) | b
            out.append(byte)
        return bytes(out)


def zigzag(v):
    return 2 * v - 1 if v > 0 else -2 * v


def container(codec_id, values, bits, params=b""):
    k = sum(abs(v) for v in values)
    head = struct.pack(">BQQQ", codec_id, len(values), k, len(bits.bits))
    return head + params + bits.payload()


def golomb(values):
    b = Bits()
    for v in values:
        b.eg0(zigzag(v))
    return container(1, values, b)


def rle(values):
    b = Bits()
    run = 0
    for v in values:
        if v == 0:
            run += 1
            continue
        b.eg0(run)
        b.eg0(zigzag(v) - 1)
        run = 0
    if run or not values:
        b.eg0(run)
    return container(2, values, b)


def huffman_lengths(freq):
    m = len(freq)
    used = [s for s in range(m) if freq[s]]
    if len(used) == 1:
        return [1 if freq[s] else 0 for s in range(m)]
    parent = [None] * m
    heap = [(freq[s], s) for s in used]
    heapq.heapify(heap)
    while len(heap) > 1:
        fa, a = heapq.heappop(heap)
        fb, b = heapq.heappop(heap)
        node = len(parent)
        parent.append(None)
        parent[a] = node
        parent[b] = node
        heapq.heappush(heap, (fa + fb, node))
    def depth(s):
        d = 0
        while parent[s] is not None:
            s = parent[s]
            d += 1
        return d
    return [depth(s) if freq[s] else 0 for s in range(m)]


def huffman(values, v_threshold):
    esc = 2 * v_threshold - 1
    freq = [0] * (2 * v_threshold)
    excess = [abs(v) - v_threshold for v in values if abs(v) >= v_threshold]
    for v in values:
        freq[zigzag(v) if abs(v) < v_threshold else esc] += 1
    lengths = huffman_lengths(freq)
    order = sorted((lengths[s], s) for s in range(len(lengths)) if lengths[s])
    codes, code, prev = {}, 0, 0
    for length, s in order:
        code <<= length - prev
        prev = length
        codes[s] = code
        code += 1
    residual = max(excess).bit_length() if excess else 0
    b = Bits()
    for v in values:
        s = zigzag(v) if abs(v) < v_threshold else esc
        b.put(codes[s], lengths[s])
        if s == esc:
            b.put(1 if v < 0 else 0, 1)
            b.put(abs(v) - v_threshold, residual)
    params = struct.pack(">IB", v_threshold, residual) + bytes(lengths)
    return container(3, values, b, params)


@lru_cache(maxsize=None)
def count(n, k):
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0:
        return 1
    return count(n - 1, k) + count(n - 1, k - 1) + count(n, k - 1)


def rank(values):
    n, rest, r = len(values), sum(abs(v) for v in values), 0
    for i, v in enumerate(values):
        for u in range(rest, v, -1):
            r += count(n - i - 1, rest - abs(u))
        rest -= abs(v)
    return r


def index(values):
    n, k = len(values), sum(abs(v) for v in values)
    width = (count(n, k) - 1).bit_length()
    b = Bits()
    b.put(rank(values), width)
    return container(4, values, b)


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    files = {
        "exp_golomb.bin": golomb(VECTOR),
        "rle_zero.bin": rle(VECTOR),
        "huffman_escape.bin": huffman(VECTOR, HUFFMAN_V),
        "pvq_index.bin": index(VECTOR),
    }
    for name, data in files.items():
        with open(os.path.join(out_dir, name), "wb") as f:
            f.write(data)
        print(name, len(data), data.hex())


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/golden")
