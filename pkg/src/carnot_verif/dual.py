"""Forward-mode second-order jets.

A Jet carries (value, first derivative, second derivative) through scalar
arithmetic, so radial profiles h(t) can expose exact h' and h'' without
symbolic machinery.  Components may be floats or numpy arrays of a common
shape; all operations broadcast.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Jet", "variable", "derivatives"]


class Jet:
    __slots__ = ("f", "d1", "d2")

    def __init__(self, f, d1=0.0, d2=0.0):
        self.f = f
        self.d1 = d1
        self.d2 = d2

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.f + other.f, self.d1 + other.d1, self.d2 + other.d2)
        return Jet(self.f + other, self.d1, self.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.f, -self.d1, -self.d2)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(
                self.f * other.f,
                self.d1 * other.f + self.f * other.d1,
                self.d2 * other.f + 2.0 * self.d1 * other.d1 + self.f * other.d2,
            )
        return Jet(self.f * other, self.d1 * other, self.d2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        return Jet(self.f / other, self.d1 / other, self.d2 / other)

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def _reciprocal(self):
        inv = 1.0 / self.f
        return Jet(inv, -self.d1 * inv * inv,
                   (2.0 * self.d1 * self.d1 * inv - self.d2) * inv * inv)

    def __pow__(self, a):
        # real exponent; for non-integer a the value must stay positive
        f, d1, d2 = self.f, self.d1, self.d2
        fa = np.power(f, a)
        fm1 = np.power(f, a - 1.0)
        fm2 = np.power(f, a - 2.0)
        return Jet(fa, a * fm1 * d1, a * (a - 1.0) * fm2 * d1 * d1 + a * fm1 * d2)

    # -- elementary functions ----------------------------------------------

    def exp(self):
        e = np.exp(self.f)
        return Jet(e, e * self.d1, e * (self.d2 + self.d1 * self.d1))

    def log(self):
        inv = 1.0 / self.f
        return Jet(np.log(self.f), self.d1 * inv,
                   self.d2 * inv - self.d1 * self.d1 * inv * inv)

    def sqrt(self):
        return self ** 0.5

    def __repr__(self):
        return f"Jet({self.f!r}, {self.d1!r}, {self.d2!r})"


def variable(t):
    """Jet seeded as the identity function at t."""
    t = np.asarray(t, dtype=float)
    return Jet(t, np.ones_like(t), np.zeros_like(t))


def derivatives(h, t):
    """Evaluate (h(t), h'(t), h''(t)) by pushing a jet through h."""
    out = h(variable(t))
    if isinstance(out, Jet):
        return out.f, np.asarray(out.d1, dtype=float), np.asarray(out.d2, dtype=float)
    # h ignored the jet (constant function)
    val = np.asarray(out, dtype=float)
    return val, np.zeros_like(val), np.zeros_like(val)
