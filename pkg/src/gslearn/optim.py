"""Adam with bias correction, one state per parameter matrix."""

from dataclasses import dataclass, field

import numpy as np

from .linalg import Matrix, ShapeError


@dataclass
class AdamState:
    """Moment estimates for a single parameter. `step` counts completed
    updates; `m` and `v` match the parameter's shape."""

    m: Matrix
    v: Matrix
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = field(default=0)

    @classmethod
    def for_param(cls, param: Matrix, lr: float = 0.01, beta1: float = 0.9,
                  beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        return cls(m=np.zeros_like(param), v=np.zeros_like(param), lr=lr,
                   beta1=beta1, beta2=beta2, eps=eps)


def adam_step(state: AdamState, param: Matrix, grad: Matrix) -> Matrix:
    """One bias-corrected Adam update. Mutates `state` in place and returns
    the new parameter value:

        m <- b1 m + (1 - b1) g
        v <- b2 v + (1 - b2) g^2
        param - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
    """
    if param.shape != grad.shape or param.shape != state.m.shape:
        raise ShapeError(
            f"adam_step: shapes differ, param {param.shape}, grad {grad.shape}, "
            f"state {state.m.shape}")
    state.step += 1
    t = state.step
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * (grad * grad)
    m_hat = state.m / (1.0 - state.beta1 ** t)
    v_hat = state.v / (1.0 - state.beta2 ** t)
    return param - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
