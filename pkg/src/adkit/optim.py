"""Small optimizers driven by the AD kit: gradient descent, Newton's
method and a 2-2-1 sigmoid network trained on XOR by reverse mode."""
import math
from dataclasses import dataclass

import numpy as np

from .dual import grad_forward
from .elementary import sigmoid
from .functions import SplitMix64
from .nest import hessian
from .numdiff import DiffScheme, grad_numeric
from .tape import grad_reverse


class OptimizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GDConfig:
    eta: float = 0.1
    max_iters: int = 1000
    grad_tol: float = 1e-8
    mode: str = "reverse"
    halving: bool = False

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.mode not in GRADIENTS:
            raise ValueError(f"unknown gradient mode {self.mode!r}")


@dataclass(frozen=True)
class Step:
    iter: int
    w: tuple
    f: float
    grad_norm: float


def _grad_numeric(f, x):
    return f(x), grad_numeric(f, x, DiffScheme("center"))


def _grad_forward(f, x):
    return f(x), grad_forward(f, x)


GRADIENTS = {
    "reverse": grad_reverse,
    "forward": _grad_forward,
    "numeric": _grad_numeric,
}


def value_and_grad(f, w, mode="reverse"):
    y, g = GRADIENTS[mode](f, list(w))
    return float(y), [float(v) for v in g]


def _finite(y, g, k):
    if not math.isfinite(y) or not all(math.isfinite(v) for v in g):
        raise OptimizationError(f"non-finite objective or gradient at iteration {k}: f={y!r}")


def gradient_descent(f, w0, cfg=GDConfig()):
    """Iterate ``w <- w - eta * grad f(w)``; returns the list of steps.

    With ``cfg.halving`` the step is halved (up to 30 times) whenever it
    would increase ``f``; otherwise ``eta`` stays fixed.
    """
    w = [float(v) for v in w0]
    traj = []
    for k in range(cfg.max_iters + 1):
        y, g = value_and_grad(f, w, cfg.mode)
        _finite(y, g, k)
        gn = max((abs(v) for v in g), default=0.0)
        traj.append(Step(k, tuple(w), y, gn))
        if gn < cfg.grad_tol or k == cfg.max_iters:
            break
        eta = cfg.eta
        trial = [wi - eta * gi for wi, gi in zip(w, g)]
        if cfg.halving:
            for _ in range(30):
                if float(f(trial)) <= y:
                    break
                eta *= 0.5
                trial = [wi - eta * gi for wi, gi in zip(w, g)]
        w = trial
    return traj


def newton(f, w0, eta=1.0, max_iters=50, grad_tol=1e-12, halving=True):
    """Iterate ``w <- w - eta * H^-1 grad f`` with the exact AD Hessian.

    ``halving`` backs the step off by factors of two while it increases
    ``f`` (a safeguard, not part of the basic method).
    """
    w = np.array([float(v) for v in w0])
    traj = []
    for k in range(max_iters + 1):
        y, g = value_and_grad(f, w, "reverse")
        _finite(y, g, k)
        gn = max((abs(v) for v in g), default=0.0)
        traj.append(Step(k, tuple(w.tolist()), y, gn))
        if gn < grad_tol or k == max_iters:
            break
        h = np.array(hessian(f, w.tolist()), dtype=float)
        try:
            d = np.linalg.solve(h, np.array(g))
        except np.linalg.LinAlgError:
            raise OptimizationError(
                f"singular Hessian at iteration {k} (condition number {np.linalg.cond(h):.3g})"
            ) from None
        step = eta
        trial = w - step * d
        if halving:
            for _ in range(30):
                if float(f(trial.tolist())) <= y:
                    break
                step *= 0.5
                trial = w - step * d
        w = trial
    return traj


# -- XOR network ---------------------------------------------------------------

XOR = (((0.0, 0.0), 0.0), ((0.0, 1.0), 1.0), ((1.0, 0.0), 1.0), ((1.0, 1.0), 0.0))
N_PARAMS = 9  # W1 (2x2), b1 (2), w2 (2), b2


def mlp_init(seed):
    rng = SplitMix64(seed)
    return [rng.uniform(-1.0, 1.0) for _ in range(N_PARAMS)]


def mlp_forward(p, x):
    h0 = sigmoid(p[0] * x[0] + p[1] * x[1] + p[4])
    h1 = sigmoid(p[2] * x[0] + p[3] * x[1] + p[5])
    return sigmoid(p[6] * h0 + p[7] * h1 + p[8])


def mlp_loss(p, data=XOR):
    """``E = sum over samples of (t - y)^2 / 2``."""
    e = 0.0
    for x, t in data:
        r = t - mlp_forward(p, x)
        e = e + 0.5 * r * r
    return e


def mlp_train(seed=7, eta=0.5, epochs=5000, data=XOR):
    """Full-batch gradient descent on the XOR loss.

    Returns ``(loss_curve, params)`` where ``loss_curve[k]`` is the loss
    after ``k`` updates (so it has ``epochs + 1`` entries).
    """
    p = mlp_init(seed)
    curve = []
    for _ in range(epochs):
        e, g = grad_reverse(lambda q: mlp_loss(q, data), p)
        curve.append(float(e))
        p = [pi - eta * gi for pi, gi in zip(p, g)]
    curve.append(float(mlp_loss(p, data)))
    return curve, p
