"""Dual-branch action-value network with hand-rolled backprop and AdaMax.

The network scores the two bank actions from an image plus five continuous
inputs. A convolutional branch (conv / relu / 2x2 max-pool stages, then
dense layers) digests the image; a stack of dense layers digests the
continuous variables; the branches are concatenated and finished by dense
layers down to one output per action. All hidden activations are
rectified linear, the output is linear.

Everything is plain numpy. Plain ``forward`` calls are pure and safe to
run concurrently; training uses an explicit cache-passing path so no
layer mutates shared state.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, asdict

import numpy as np


def _glorot(rng: np.random.Generator, shape, fan_in: int, fan_out: int, dtype):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


class Dense:
    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator, dtype):
        self.weight = _glorot(rng, (n_in, n_out), n_in, n_out, dtype)
        self.bias = np.zeros(n_out, dtype=dtype)

    @property
    def params(self):
        return [self.weight, self.bias]

    def forward(self, x):
        return x @ self.weight + self.bias

    def forward_cached(self, x):
        return x @ self.weight + self.bias, x

    def backward(self, cache, dout):
        x = cache
        dw = x.T @ dout
        db = dout.sum(axis=0)
        return dout @ self.weight.T, [dw, db]


class Relu:
    params: list = []

    def forward(self, x):
        return np.maximum(x, 0)

    def forward_cached(self, x):
        return np.maximum(x, 0), x

    def backward(self, cache, dout):
        return dout * (cache > 0), []


class Conv2D:
    """3x3-style convolution, stride 1, zero padding preserving spatial size.

    Data layout is channels-last: (batch, height, width, channels).
    """

    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator, dtype,
                 kernel: int = 3):
        if kernel % 2 != 1:
            raise ValueError("kernel size must be odd for same padding")
        self.kernel = kernel
        fan_in = kernel * kernel * n_in
        fan_out = kernel * kernel * n_out
        self.weight = _glorot(rng, (kernel, kernel, n_in, n_out), fan_in, fan_out, dtype)
        self.bias = np.zeros(n_out, dtype=dtype)

    @property
    def params(self):
        return [self.weight, self.bias]

    def _columns(self, x):
        n, h, w, c = x.shape
        k = self.kernel
        pad = (k - 1) // 2
        xp = np.zeros((n, h + 2 * pad, w + 2 * pad, c), dtype=x.dtype)
        xp[:, pad:pad + h, pad:pad + w, :] = x
        patches = [xp[:, di:di + h, dj:dj + w, :] for di in range(k) for dj in range(k)]
        return np.concatenate(patches, axis=3)  # (n, h, w, k*k*c)

    def forward(self, x):
        y, _ = self.forward_cached(x)
        return y

    def forward_cached(self, x):
        n, h, w, c = x.shape
        k = self.kernel
        cols = self._columns(x)
        w2 = self.weight.reshape(k * k * c, -1)
        y = cols.reshape(-1, k * k * c) @ w2 + self.bias
        return y.reshape(n, h, w, -1), (cols, x.shape)

    def backward(self, cache, dout):
        cols, x_shape = cache
        n, h, w, c = x_shape
        k = self.kernel
        pad = (k - 1) // 2
        kkc = k * k * c
        n_out = dout.shape[-1]
        dflat = dout.reshape(-1, n_out)
        dw = (cols.reshape(-1, kkc).T @ dflat).reshape(self.weight.shape)
        db = dflat.sum(axis=0)
        dcols = (dflat @ self.weight.reshape(kkc, n_out).T).reshape(n, h, w, k, k, c)
        dxp = np.zeros((n, h + 2 * pad, w + 2 * pad, c), dtype=dout.dtype)
        for di in range(k):
            for dj in range(k):
                dxp[:, di:di + h, dj:dj + w, :] += dcols[:, :, :, di, dj, :]
        return dxp[:, pad:pad + h, pad:pad + w, :], [dw, db]


class MaxPool2:
    """Non-overlapping 2x2 max pooling; odd trailing rows/columns are dropped."""

    params: list = []

    @staticmethod
    def _windows(x):
        n, h, w, c = x.shape
        oh, ow = h // 2, w // 2
        win = x[:, :2 * oh, :2 * ow, :].reshape(n, oh, 2, ow, 2, c)
        return win.transpose(0, 1, 3, 2, 4, 5).reshape(n, oh, ow, 4, c)

    def forward(self, x):
        return self._windows(x).max(axis=3)

    def forward_cached(self, x):
        win = self._windows(x)
        idx = win.argmax(axis=3)  # ties resolve to the first element
        y = np.take_along_axis(win, idx[:, :, :, None, :], axis=3).squeeze(3)
        return y, (idx, x.shape)

    def backward(self, cache, dout):
        idx, x_shape = cache
        n, h, w, c = x_shape
        oh, ow = h // 2, w // 2
        dwin = np.zeros((n, oh, ow, 4, c), dtype=dout.dtype)
        np.put_along_axis(dwin, idx[:, :, :, None, :], dout[:, :, :, None, :], axis=3)
        dwin = dwin.reshape(n, oh, ow, 2, 2, c).transpose(0, 1, 3, 2, 4, 5)
        dx = np.zeros(x_shape, dtype=dout.dtype)
        dx[:, :2 * oh, :2 * ow, :] = dwin.reshape(n, 2 * oh, 2 * ow, c)
        return dx, []


class Flatten:
    params: list = []

    def forward(self, x):
        return x.reshape(x.shape[0], -1)

    def forward_cached(self, x):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, cache, dout):
        return dout.reshape(cache), []


@dataclass(frozen=True)
class NetworkConfig:
    """Architecture hyperparameters.

    The defaults are the full-scale network; reduced profiles shrink the
    filter counts and layer widths but keep the same wiring.
    """

    image_shape: tuple[int, int, int]            # (h, w, channels)
    n_continuous: int = 5
    conv_stages: int = 3
    conv_filters: int = 64
    kernel_size: int = 3
    image_dense: tuple[int, ...] = (500, 100)
    continuous_dense: tuple[int, ...] = (100, 100, 100, 100, 100)
    merge_dense: tuple[int, ...] = (200, 200)
    n_actions: int = 2

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkConfig":
        d = dict(d)
        d["image_shape"] = tuple(d["image_shape"])
        for key in ("image_dense", "continuous_dense", "merge_dense"):
            d[key] = tuple(d[key])
        return cls(**d)


class QNetwork:
    """Action-value approximator: forward maps (image, continuous) to one
    value per action.
    """

    def __init__(self, config: NetworkConfig, rng: np.random.Generator | None = None,
                 dtype=np.float32):
        if rng is None:
            rng = np.random.default_rng()
        self.config = config
        self.dtype = dtype

        h, w, c = config.image_shape
        self.image_layers = []
        channels = c
        for _ in range(config.conv_stages):
            self.image_layers += [
                Conv2D(channels, config.conv_filters, rng, dtype, config.kernel_size),
                Relu(),
                MaxPool2(),
            ]
            channels = config.conv_filters
            h, w = h // 2, w // 2
        if h < 1 or w < 1:
            raise ValueError("image too small for the configured number of pool stages")
        self.image_layers.append(Flatten())
        width = h * w * channels
        for n in config.image_dense:
            self.image_layers += [Dense(width, n, rng, dtype), Relu()]
            width = n
        image_out = width

        self.continuous_layers = []
        width = config.n_continuous
        for n in config.continuous_dense:
            self.continuous_layers += [Dense(width, n, rng, dtype), Relu()]
            width = n
        cont_out = width

        self.merge_layers = []
        width = image_out + cont_out
        for n in config.merge_dense:
            self.merge_layers += [Dense(width, n, rng, dtype), Relu()]
            width = n
        self.merge_layers.append(Dense(width, config.n_actions, rng, dtype))
        self._image_out = image_out

    # -- parameter access ---------------------------------------------------

    @property
    def layers(self):
        return self.image_layers + self.continuous_layers + self.merge_layers

    def parameters(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.params]

    @property
    def n_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def clone(self) -> "QNetwork":
        """Deep copy: training either network never touches the other."""
        twin = QNetwork(self.config, rng=np.random.default_rng(0), dtype=self.dtype)
        for mine, theirs in zip(self.parameters(), twin.parameters()):
            theirs[...] = mine
        return twin

    # -- inference ----------------------------------------------------------

    def _check_shapes(self, images, conts):
        if images.shape[1:] != self.config.image_shape:
            raise ValueError(
                f"image shape {images.shape[1:]} does not match network input "
                f"{self.config.image_shape}")
        if conts.shape[1] != self.config.n_continuous:
            raise ValueError(
                f"expected {self.config.n_continuous} continuous inputs, got {conts.shape[1]}")

    def forward_batch(self, images: np.ndarray, conts: np.ndarray) -> np.ndarray:
        images = np.asarray(images, dtype=self.dtype)
        conts = np.asarray(conts, dtype=self.dtype)
        self._check_shapes(images, conts)
        a = images
        for layer in self.image_layers:
            a = layer.forward(a)
        b = conts
        for layer in self.continuous_layers:
            b = layer.forward(b)
        z = np.concatenate([a, b], axis=1)
        for layer in self.merge_layers:
            z = layer.forward(z)
        return z

    def forward(self, image: np.ndarray, cont: np.ndarray) -> np.ndarray:
        """Single-sample action values, shape (n_actions,)."""
        q = self.forward_batch(np.asarray(image)[None, ...], np.asarray(cont)[None, :])
        return q[0]

    # -- training -----------------------------------------------------------

    def _forward_cached(self, images, conts):
        caches = []
        a = images
        for layer in self.image_layers:
            a, cache = layer.forward_cached(a)
            caches.append(cache)
        b = conts
        for layer in self.continuous_layers:
            b, cache = layer.forward_cached(b)
            caches.append(cache)
        z = np.concatenate([a, b], axis=1)
        for layer in self.merge_layers:
            z, cache = layer.forward_cached(z)
            caches.append(cache)
        return z, caches

    def loss_and_gradients(self, images, conts, actions, targets):
        """Mean squared error of the taken actions' values against targets.

        Returns (loss, gradients) with gradients ordered like parameters().
        Only the taken action's output contributes for each sample.
        """
        images = np.asarray(images, dtype=self.dtype)
        conts = np.asarray(conts, dtype=self.dtype)
        self._check_shapes(images, conts)
        actions = np.asarray(actions, dtype=np.int64)
        targets = np.asarray(targets, dtype=self.dtype)
        if len(actions) == 0:
            raise ValueError("batch must be non-empty")

        q, caches = self._forward_cached(images, conts)
        n = q.shape[0]
        rows = np.arange(n)
        err = q[rows, actions] - targets
        loss = float(np.mean(err.astype(np.float64) ** 2))

        dq = np.zeros_like(q)
        dq[rows, actions] = (2.0 / n) * err

        n_img, n_cont = len(self.image_layers), len(self.continuous_layers)
        grads_rev = []
        d = dq
        for i in range(len(self.merge_layers) - 1, -1, -1):
            d, g = self.merge_layers[i].backward(caches[n_img + n_cont + i], d)
            grads_rev.append(g)
        d_img, d_cont = d[:, :self._image_out], d[:, self._image_out:]
        for i in range(n_cont - 1, -1, -1):
            d_cont, g = self.continuous_layers[i].backward(caches[n_img + i], d_cont)
            grads_rev.append(g)
        for i in range(n_img - 1, -1, -1):
            d_img, g = self.image_layers[i].backward(caches[i], d_img)
            grads_rev.append(g)

        grads = [g for layer_grads in reversed(grads_rev) for g in layer_grads]
        return loss, grads


class AdaMax:
    """Adaptive gradient descent scaled by an infinity-norm moment.

    Per step: m <- b1*m + (1-b1)*g, u <- max(b2*u, |g|), and each
    parameter moves by -(alpha / (1 - b1^t)) * m / u with u floored at
    1e-8 to avoid division by zero.
    """

    def __init__(self, params: list[np.ndarray], alpha: float = 0.002,
                 beta1: float = 0.9, beta2: float = 0.999):
        self.alpha = alpha
        self.beta1 = beta1
        self.beta2 = beta2
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.u = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        """Update params in place from one batch of gradients."""
        if len(params) != len(self.m) or len(grads) != len(self.m):
            raise ValueError("parameter/gradient count does not match optimizer state")
        self.t += 1
        scale = self.alpha / (1.0 - self.beta1 ** self.t)
        for p, g, m, u in zip(params, grads, self.m, self.u):
            if p.shape != m.shape or g.shape != m.shape:
                raise ValueError("parameter/gradient shape does not match optimizer state")
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            np.maximum(self.beta2 * u, np.abs(g), out=u)
            p -= (scale * m / np.maximum(u, 1e-8)).astype(p.dtype)


def copy_weights(src: QNetwork, dst: QNetwork) -> None:
    """Overwrite dst's parameters with src's values, in place."""
    src_params = src.parameters()
    dst_params = dst.parameters()
    if len(src_params) != len(dst_params):
        raise ValueError("networks have different architectures")
    for a, b in zip(src_params, dst_params):
        if a.shape != b.shape:
            raise ValueError("networks have different architectures")
        b[...] = a


# -- weight serialization ---------------------------------------------------

_MAGIC = b"FSQN"
_VERSION = 1


def save_weights(net: QNetwork, path) -> None:
    """Versioned binary dump: magic, architecture header, then each
    parameter as a shape-prefixed little-endian float32 array.
    """
    header = json.dumps(net.config.to_dict(), sort_keys=True).encode()
    params = net.parameters()
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<I", _VERSION))
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        f.write(struct.pack("<I", len(params)))
        for p in params:
            f.write(struct.pack("<I", p.ndim))
            f.write(struct.pack(f"<{p.ndim}I", *p.shape))
            f.write(np.ascontiguousarray(p, dtype="<f4").tobytes())


def load_weights(path) -> QNetwork:
    """Rebuild a network from save_weights output; round-trips bit-exactly."""
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a weight file")
        (version,) = struct.unpack("<I", f.read(4))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported weight format version {version}")
        (header_len,) = struct.unpack("<I", f.read(4))
        config = NetworkConfig.from_dict(json.loads(f.read(header_len).decode()))
        net = QNetwork(config, rng=np.random.default_rng(0), dtype=np.float32)
        params = net.parameters()
        (count,) = struct.unpack("<I", f.read(4))
        if count != len(params):
            raise ValueError(f"{path}: expected {len(params)} parameter arrays, found {count}")
        for p in params:
            (ndim,) = struct.unpack("<I", f.read(4))
            shape = struct.unpack(f"<{ndim}I", f.read(4 * ndim))
            if shape != p.shape:
                raise ValueError(f"{path}: parameter shape {shape} does not match {p.shape}")
            data = np.frombuffer(f.read(4 * int(np.prod(shape))), dtype="<f4")
            p[...] = data.reshape(shape)
    return net
