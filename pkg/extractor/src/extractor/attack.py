"""Feature attack: what in an image drives one feature up?

Projected gradient ascent on a single feature activation, in raw pixel
coordinates.  Each iteration takes a fixed-length step along the
normalised gradient, projects the accumulated perturbation back onto the
L2 ball of radius ``epsilon`` (measured in raw [0, 255] pixel units), and
clamps pixels to the valid range.  Clamping moves each pixel towards its
starting value, so the ball constraint survives it; the perturbation norm
is recorded after every iteration.

The activation trace (initial value plus one entry per iteration) is the
attack's second output: a flat trace on a zero activation is how a dead
feature shows up, in which case the image is returned unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import torch


class AttackError(Exception):
    """Raised for unusable configurations or non-finite gradients."""


@dataclass(frozen=True)
class AttackConfig:
    """Ascent parameters; budgets are in raw [0, 255] pixel units."""

    feature_index: int
    epsilon: float = 500.0
    step_size: float = 1.0
    iterations: int = 500

    def __post_init__(self):
        if self.feature_index < 0:
            raise AttackError(f"feature index must be >= 0, got {self.feature_index}")
        if not self.epsilon > 0:
            raise AttackError(f"epsilon must be positive, got {self.epsilon}")
        if not self.step_size > 0:
            raise AttackError(f"step size must be positive, got {self.step_size}")
        if self.iterations < 1:
            raise AttackError(f"iterations must be >= 1, got {self.iterations}")


@dataclass
class AttackResult:
    """Perturbed image plus per-iteration diagnostics."""

    image: torch.Tensor
    trace: list[float]
    delta_norms: list[float]

    @property
    def initial_activation(self) -> float:
        return self.trace[0]

    @property
    def final_activation(self) -> float:
        return self.trace[-1]


def feature_attack(
    activation_fn: Callable[[torch.Tensor], torch.Tensor],
    image: torch.Tensor,
    config: AttackConfig,
) -> AttackResult:
    """Ascend ``activation_fn`` from ``image`` under the config's budget.

    ``activation_fn`` maps a raw pixel tensor to a scalar activation and
    must be differentiable through torch.  ``image`` is ``(3, H, W)`` (or
    any shape the activation accepts) in [0, 255] and is not modified.
    """
    origin = image.detach().clone()
    current = origin.clone()
    trace = [float(activation_fn(origin).detach())]
    delta_norms: list[float] = []

    for iteration in range(config.iterations):
        probe = current.detach().clone().requires_grad_(True)
        activation = activation_fn(probe)
        (gradient,) = torch.autograd.grad(activation, probe)
        if not torch.isfinite(gradient).all():
            raise AttackError(
                f"non-finite gradient at iteration {iteration} "
                f"(feature {config.feature_index})"
            )
        gradient_norm = float(gradient.norm(p=2))
        if gradient_norm == 0.0:
            # Dead feature: no ascent direction, leave the image alone.
            break
        with torch.no_grad():
            current = current + config.step_size * gradient / gradient_norm
            delta = current - origin
            delta_norm = float(delta.norm(p=2))
            if delta_norm > config.epsilon:
                delta = delta * (config.epsilon / delta_norm)
            current = (origin + delta).clamp(0.0, 255.0)
            delta_norms.append(float((current - origin).norm(p=2)))
            trace.append(float(activation_fn(current)))

    return AttackResult(image=current.detach(), trace=trace, delta_norms=delta_norms)
