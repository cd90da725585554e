"""Smooth test functions f with analytic derivatives."""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from fermiszego.errors import ValidationError


@dataclass(frozen=True)
class TestFunction:
    """A real smooth function of position.

    ``kind`` is ``polynomial`` (ascending coefficients),
    ``gaussian_bump`` (``[amplitude, center, width]`` giving
    ``amplitude * exp(-(x - center)^2 / width)``) or ``custom_smooth``
    (``func`` and ``deriv`` callables).
    """

    __test__ = False  # not a pytest class

    kind: str
    parameters: tuple = ()
    name: str = ""
    func: Optional[Callable] = field(default=None, compare=False)
    deriv: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "parameters", tuple(float(p) for p in self.parameters))
        if self.kind == "polynomial":
            if not self.parameters:
                raise ValidationError("polynomial needs coefficients")
        elif self.kind == "gaussian_bump":
            if len(self.parameters) != 3 or self.parameters[2] <= 0:
                raise ValidationError("gaussian_bump needs (amplitude, center, width>0)")
        elif self.kind == "custom_smooth":
            if self.func is None or self.deriv is None:
                raise ValidationError("custom_smooth needs func and deriv")
        else:
            raise ValidationError(f"unknown test function kind {self.kind!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "polynomial":
            return P.polyval(x, self.parameters) + 0.0 * x
        if self.kind == "gaussian_bump":
            a, c, w = self.parameters
            return a * np.exp(-((x - c) ** 2) / w)
        return np.asarray(self.func(x), dtype=float) + 0.0 * x

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "polynomial":
            return P.polyval(x, P.polyder(np.array(self.parameters))) + 0.0 * x
        if self.kind == "gaussian_bump":
            a, c, w = self.parameters
            return -2.0 * (x - c) / w * a * np.exp(-((x - c) ** 2) / w)
        return np.asarray(self.deriv(x), dtype=float) + 0.0 * x

    def scaled(self, c):
        """The function ``c * f``."""
        if self.kind == "polynomial":
            return TestFunction("polynomial", tuple(c * p for p in self.parameters), self.name)
        if self.kind == "gaussian_bump":
            a, m, w = self.parameters
            return TestFunction("gaussian_bump", (c * a, m, w), self.name)
        f, d = self.func, self.deriv
        return TestFunction("custom_smooth", (), self.name,
                            func=lambda x: c * f(x), deriv=lambda x: c * d(x))


def polynomial(*coeffs, name=""):
    return TestFunction("polynomial", coeffs, name)


def constant(c):
    return TestFunction("polynomial", (c,), f"const{c:g}")


def gaussian_bump(amplitude, center, width, name=""):
    return TestFunction("gaussian_bump", (amplitude, center, width), name)
