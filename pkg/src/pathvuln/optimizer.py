"""Adam optimizer with bias correction, matching the standard defaults."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import FIELD_ORDER, Gradients, ModelParams


@dataclass
class AdamState:
    """First/second moment accumulators plus the step counter."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0

    @classmethod
    def for_params(cls, params: ModelParams) -> "AdamState":
        return cls(
            m={name: np.zeros_like(arr) for name, arr in params.arrays().items()},
            v={name: np.zeros_like(arr) for name, arr in params.arrays().items()},
        )

    def copy(self) -> "AdamState":
        return AdamState(
            m={k: a.copy() for k, a in self.m.items()},
            v={k: a.copy() for k, a in self.v.items()},
            t=self.t,
        )


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_step(
    params: ModelParams,
    grads: Gradients,
    state: AdamState,
    config: AdamConfig = AdamConfig(),
) -> None:
    """One in-place update of every parameter array."""
    state.t += 1
    t = state.t
    b1, b2 = config.beta1, config.beta2
    garrays = grads.arrays()
    parrays = params.arrays()
    for name in FIELD_ORDER:
        g = garrays[name]
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        parrays[name] -= config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
