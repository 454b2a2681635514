# Copyright 2026 The pvqnet Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the reference MNIST fixture under tests/data.

Source digits: the 10,000 MNIST samples bundled with the `mnist` npm package
(`npm pack mnist`, files package/src/digits/<d>.json, pixels stored as
value/255 rounded to 3 decimals). Pixels are restored to uint8, shuffled
with a fixed seed and split 8000 train / 2000 held-out.

The 784-512-512-10 ReLU MLP (dropout 0.2) is trained with PyTorch on the
train split with small random affine augmentation. Training uses inputs in
[0, 1]; the exported first layer has the 1/255 factor folded into its
weights so the model consumes raw 8-bit pixels.

usage: python3 make_mnist_fixture.py <npm-mnist-package-dir> <out-dir>
"""

import json
import os
import sys

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from modelfile import write_idx_images, write_idx_labels, write_mlp

SPLIT_SEED = 20190101
TRAIN_SEED = 7
EPOCHS = 60


def load_digits(package_dir):
    xs, ys = [], []
    for d in range(10):
        with open(os.path.join(package_dir, "src", "digits", f"{d}.json")) as f:
            data = np.array(json.load(f)["data"], dtype=np.float64).reshape(-1, 784)
        xs.append(np.clip(np.rint(data * 255), 0, 255).astype(np.uint8))
        ys.append(np.full(len(data), d, np.uint8))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    perm = np.random.default_rng(SPLIT_SEED).permutation(len(x))
    return x[perm], y[perm]


def augment(x):
    img = x.view(-1, 1, 28, 28)
    n = img.shape[0]
    ang = (torch.rand(n) - 0.5) * 0.4
    sc = 1 + (torch.rand(n) - 0.5) * 0.2
    theta = torch.zeros(n, 2, 3)
    theta[:, 0, 0] = sc * torch.cos(ang)
    theta[:, 0, 1] = -sc * torch.sin(ang)
    theta[:, 1, 0] = sc * torch.sin(ang)
    theta[:, 1, 1] = sc * torch.cos(ang)
    theta[:, 0, 2] = (torch.rand(n) - 0.5) * 0.2
    theta[:, 1, 2] = (torch.rand(n) - 0.5) * 0.2
    grid = F.affine_grid(theta, img.shape, align_corners=False)
    return F.grid_sample(img, grid, align_corners=False).view(n, 784)


def main(package_dir, out_dir):
    torch.manual_seed(TRAIN_SEED)
    x, y = load_digits(package_dir)
    xt = torch.tensor(x, dtype=torch.float32) / 255.0
    yt = torch.tensor(y, dtype=torch.long)
    x_train, y_train = xt[:8000], yt[:8000]
    x_test, y_test = xt[8000:], yt[8000:]

    model = nn.Sequential(
        nn.Linear(784, 512), nn.ReLU(), nn.Dropout(0.2),
        nn.Linear(512, 512), nn.ReLU(), nn.Dropout(0.2),
        nn.Linear(512, 10))
    opt = torch.optim.Adam(model.parameters(), 1e-3)
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, EPOCHS)
    for _ in range(EPOCHS):
        model.train()
        perm = torch.randperm(8000)
        for i in range(0, 8000, 128):
            b = perm[i:i + 128]
            loss = F.cross_entropy(model(augment(x_train[b])), y_train[b])
            opt.zero_grad()
            loss.backward()
            opt.step()
        sched.step()
    model.eval()
    with torch.no_grad():
        acc = (model(x_test).argmax(1) == y_test).float().mean().item()
    print(f"held-out accuracy {acc:.4f}")

    w = [m.weight.detach().numpy().astype(np.float32) for m in model if isinstance(m, nn.Linear)]
    b = [m.bias.detach().numpy().astype(np.float32) for m in model if isinstance(m, nn.Linear)]
    w[0] = (w[0].astype(np.float64) / 255.0).astype(np.float32)
    write_mlp(os.path.join(out_dir, "mnist_mlp.pvqnet"), "mnist_mlp_784_512_512_10", 784, [
        {"kind": "fc", "weights": w[0], "biases": b[0], "activation": "relu"},
        {"kind": "dropout", "rate": 0.2},
        {"kind": "fc", "weights": w[1], "biases": b[1], "activation": "relu"},
        {"kind": "dropout", "rate": 0.2},
        {"kind": "fc", "weights": w[2], "biases": b[2], "activation": "none"},
    ])
    write_idx_images(os.path.join(out_dir, "mnist-heldout-images-idx3-ubyte"),
                     x[8000:].reshape(-1, 28, 28))
    write_idx_labels(os.path.join(out_dir, "mnist-heldout-labels-idx1-ubyte"), y[8000:])


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
