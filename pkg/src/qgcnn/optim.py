"""RMSProp with the squared-gradient average seeded by the first gradient."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError


@dataclass
class RMSProp:
    """Adaptive-step gradient descent.

    Unlike the usual zero start, the running average of squared gradients is
    initialised to ``g0**2`` on the first call, after which

        sq_avg <- alpha * sq_avg + (1 - alpha) * g**2
        theta  <- theta - eta * g / (sqrt(sq_avg) + epsilon)
    """

    eta: float = 0.01
    alpha: float = 0.99
    epsilon: float = 1e-8
    sq_avg: np.ndarray | None = field(default=None, repr=False)
    steps: int = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        params = np.asarray(params, dtype=np.float64)
        grad = np.asarray(grad, dtype=np.float64)
        if params.shape != grad.shape:
            raise UsageError(f"params {params.shape} and grad {grad.shape} differ")
        if self.sq_avg is None:
            self.sq_avg = grad**2
        else:
            if self.sq_avg.shape != grad.shape:
                raise UsageError(f"optimizer state {self.sq_avg.shape} does not match grad {grad.shape}")
            self.sq_avg = self.alpha * self.sq_avg + (1 - self.alpha) * grad**2
        self.steps += 1
        return params - self.eta * grad / (np.sqrt(self.sq_avg) + self.epsilon)
