"""White-background guidance: loss on a decoded image and the masked latent step.

The loss compares the decoded image with a copy whose masked pixels are
forced to white::

    L = s * || D(x0_hat) - mask(D(x0_hat)) ||^2,   x0_hat = predict(x_t, t)

and the latent is nudged against its gradient, only inside the latent mask::

    x_t <- x_t - mask_latent(grad * (1 - abar_t) / abar_t)

No diffusion model lives here. ``decode`` and ``predict`` are plain
callables. When both also expose ``vjp`` the gradient is exact; otherwise
it falls back to central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from planvec.errors import GuidanceNumericError

FD_STEP = 1e-4


class Decoder(Protocol):
    def __call__(self, latent: np.ndarray) -> np.ndarray: ...


class Predictor(Protocol):
    def __call__(self, x_t: np.ndarray, t: int) -> np.ndarray: ...


class IdentityDecoder:
    def __call__(self, latent):
        return np.asarray(latent, dtype=np.float64)

    def vjp(self, latent, cotangent):
        return np.asarray(cotangent, dtype=np.float64)


class IdentityPredictor:
    def __call__(self, x_t, t):
        return np.asarray(x_t, dtype=np.float64)

    def vjp(self, x_t, t, cotangent):
        return np.asarray(cotangent, dtype=np.float64)


class LinearDecoder:
    """``image = reshape(W @ latent.ravel() + b, out_shape)``."""

    def __init__(self, weight: np.ndarray, out_shape: Sequence[int], bias: Optional[np.ndarray] = None):
        self.weight = np.asarray(weight, dtype=np.float64)
        self.out_shape = tuple(out_shape)
        if self.weight.shape[0] != int(np.prod(self.out_shape)):
            raise ValueError("weight rows must match the output size")
        self.bias = np.zeros(self.weight.shape[0]) if bias is None else np.asarray(bias, dtype=np.float64)

    def __call__(self, latent):
        flat = np.asarray(latent, dtype=np.float64).ravel()
        return (self.weight @ flat + self.bias).reshape(self.out_shape)

    def vjp(self, latent, cotangent):
        return (self.weight.T @ np.asarray(cotangent, dtype=np.float64).ravel()).reshape(np.shape(latent))


IDENTITY_DECODER = IdentityDecoder()
IDENTITY_PREDICTOR = IdentityPredictor()


def _finite(arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise GuidanceNumericError(f"non-finite values in {what}")
    return arr


def _broadcast_mask(mask: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    mask = np.asarray(mask, dtype=bool)
    if len(shape) < 2 or mask.shape != shape[-2:]:
        raise ValueError(f"mask shape {mask.shape} does not match spatial shape {shape[-2:]}")
    return np.broadcast_to(mask, shape)


def apply_white_mask(img: np.ndarray, mask: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    return np.where(_broadcast_mask(mask, img.shape), 1.0, img)


def white_loss(decoded: np.ndarray, mask: np.ndarray, s: float, reduction: str = "sum") -> float:
    """Scaled squared distance between ``decoded`` and its white-masked copy.

    ``reduction="mean"`` divides by the number of image elements (an MSE);
    the default is the plain sum of squares.
    """
    if s < 0:
        raise ValueError("scale must be non-negative")
    decoded = _finite(decoded, "decoded image")
    diff = decoded - apply_white_mask(decoded, mask)
    total = float(np.sum(diff * diff))
    if reduction == "mean":
        total /= decoded.size
    elif reduction != "sum":
        raise ValueError(f"unknown reduction {reduction!r}")
    return s * total


def _image_grad(decoded, mask, s, reduction):
    g = 2.0 * s * (decoded - 1.0) * _broadcast_mask(mask, decoded.shape)
    return g / decoded.size if reduction == "mean" else g


def white_loss_grad(
    x_t: np.ndarray,
    decode: Callable = IDENTITY_DECODER,
    mask: Optional[np.ndarray] = None,
    s: float = 1.0,
    predict_x0: Callable = IDENTITY_PREDICTOR,
    t: int = 0,
    reduction: str = "sum",
    fd_step: float = FD_STEP,
) -> np.ndarray:
    """Gradient of :func:`white_loss` with respect to the noisy latent ``x_t``."""
    if mask is None:
        raise ValueError("a pixel mask is required")
    x_t = _finite(x_t, "latent")
    if hasattr(decode, "vjp") and hasattr(predict_x0, "vjp"):
        x0 = _finite(predict_x0(x_t, t), "predicted latent")
        img = _finite(decode(x0), "decoded image")
        g_img = _image_grad(img, mask, s, reduction)
        grad = predict_x0.vjp(x_t, t, decode.vjp(x0, g_img))
        return _finite(grad, "gradient")

    def loss(x):
        return white_loss(decode(predict_x0(x, t)), mask, s, reduction)

    grad = np.empty_like(x_t)
    probe = x_t.copy()
    flat, gflat = probe.reshape(-1), grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + fd_step
        up = loss(probe)
        flat[i] = orig - fd_step
        down = loss(probe)
        flat[i] = orig
        gflat[i] = (up - down) / (2.0 * fd_step)
    return _finite(grad, "gradient")


@dataclass(frozen=True)
class GuidanceState:
    x_t: np.ndarray
    t: int
    alpha_bar: tuple[float, ...]
    s: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha_bar", tuple(float(a) for a in self.alpha_bar))
        object.__setattr__(self, "x_t", _finite(self.x_t, "latent"))
        if not 0 <= self.t < len(self.alpha_bar):
            raise ValueError(f"step {self.t} outside a schedule of {len(self.alpha_bar)}")
        if self.s < 0:
            raise ValueError("scale must be non-negative")
        ab = self.alpha_bar
        # 0 is let through so the update can report the singularity itself
        if any(not 0 <= a <= 1 for a in ab):
            raise ValueError("alpha_bar values must lie in (0, 1]")
        if any(b > a for a, b in zip(ab, ab[1:])):
            raise ValueError("alpha_bar must be non-increasing in t")

    @property
    def abar_t(self) -> float:
        return self.alpha_bar[self.t]


def latent_update(state: GuidanceState, grad: np.ndarray, latent_mask: np.ndarray) -> GuidanceState:
    grad = _finite(grad, "gradient")
    if grad.shape != state.x_t.shape:
        raise ValueError(f"gradient shape {grad.shape} != latent shape {state.x_t.shape}")
    abar = state.abar_t
    if abar == 0.0:
        raise GuidanceNumericError(f"alpha_bar is 0 at step {state.t}: division by zero")
    coef = (1.0 - abar) / abar
    m = _broadcast_mask(latent_mask, state.x_t.shape)
    x_new = np.where(m, state.x_t - grad * coef, state.x_t)
    return replace(state, x_t=_finite(x_new, "updated latent"))


def downscale_mask(mask: np.ndarray, latent_w: int, latent_h: int) -> np.ndarray:
    """Latent cell is set iff at least half of its pixel block is set."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    if latent_w < 1 or latent_h < 1 or w % latent_w or h % latent_h:
        raise ValueError(f"{w}x{h} mask is not an integer multiple of {latent_w}x{latent_h}")
    fy, fx = h // latent_h, w // latent_w
    blocks = mask.reshape(latent_h, fy, latent_w, fx).sum(axis=(1, 3))
    return 2 * blocks >= fy * fx


def guided_descent_demo(
    initial: np.ndarray,
    mask: np.ndarray,
    s: float,
    alpha_bar: Sequence[float],
    steps: int,
) -> list[float]:
    """Iterate loss gradient + masked update with identity decode/predict.

    Step ``k`` (0-based) uses ``alpha_bar[min(k, len - 1)]``. Returns the
    mean of the masked values after each step.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("mask selects no pixels")
    schedule = tuple(alpha_bar)
    state = GuidanceState(np.asarray(initial, dtype=np.float64), 0, schedule, s)
    latent_mask = downscale_mask(mask, mask.shape[1], mask.shape[0])
    trajectory = []
    for k in range(steps):
        state = replace(state, t=min(k, len(schedule) - 1))
        grad = white_loss_grad(state.x_t, IDENTITY_DECODER, mask, s)
        state = latent_update(state, grad, latent_mask)
        trajectory.append(float(state.x_t[..., mask].mean()))
    return trajectory
