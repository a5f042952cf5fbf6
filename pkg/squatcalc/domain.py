"""Axially symmetric regions of the quaternions, described by their trace in
the closed upper half plane ``{(u, v) : v >= 0}`` of a slice.

Every region answers two questions for arrays of points ``z = u + iv``:
``contains(z)`` and ``clearance(z)``, a lower bound on the distance from
``z`` to the complement of the region. The automatic contour builder uses the
clearance to keep its circles inside the domain of the function being
applied. Points with ``v < 0`` are reflected, so regions are symmetric by
construction.
"""
import numpy as np


def _reflect(z):
    z = np.asarray(z, dtype=complex)
    return z.real + 1j * np.abs(z.imag)


class Region:
    """Base class of region descriptors, supporting ``|`` (union) and ``&``
    (intersection).
    """

    __slots__ = ()

    def contains(self, z):
        return self.clearance(z) > 0.0

    def clearance(self, z):
        raise NotImplementedError

    def __or__(self, other):
        return Union(self, other)

    def __and__(self, other):
        if isinstance(other, Everywhere):
            return self
        if isinstance(self, Everywhere):
            return other
        return Intersection(self, other)


class Everywhere(Region):
    """The whole of ``H``.
    """

    __slots__ = ()

    def clearance(self, z):
        return np.full(np.shape(z), np.inf)

    def __repr__(self):
        return "Everywhere()"


class Sector(Region):
    """``{|arg(z - vertex)| < angle}`` opening to the right, or ``{|arg(
    vertex - z)| < angle}`` with ``side='left'``. With ``angle = pi`` this is
    ``H`` minus the cut ``(-inf, vertex]``, respectively ``[vertex, inf)``.
    """

    __slots__ = ('angle', 'vertex', 'side')

    def __init__(self, angle=np.pi, vertex=0.0, side='right'):
        if not (0.0 < angle <= np.pi):
            raise ValueError(f"Sector angle must lie in (0, pi], got {angle}.")
        if side not in ('right', 'left'):
            raise ValueError(f"side must be 'right' or 'left', got {side!r}.")
        self.angle = float(angle)
        self.vertex = float(vertex)
        self.side = side

    def clearance(self, z):
        w = _reflect(z) - self.vertex
        if self.side == 'left':
            w = -w.real + 1j * w.imag
        r = np.abs(w)
        gap = self.angle - np.angle(w)
        # nearest point of the boundary ray is either its vertex or a foot
        d = np.where(gap >= np.pi / 2, r, r * np.sin(gap))
        return np.where(gap > 0.0, d, -1.0)

    def __repr__(self):
        return (f"Sector(angle={self.angle!r}, vertex={self.vertex!r}, "
                f"side={self.side!r})")


class Annulus(Region):
    """``{r < |z| < R}``; ``R`` may be infinite.
    """

    __slots__ = ('r', 'R')

    def __init__(self, r=0.0, R=np.inf):
        if not (0.0 <= r < R):
            raise ValueError(f"Annulus needs 0 <= r < R, got r={r}, R={R}.")
        self.r, self.R = float(r), float(R)

    def clearance(self, z):
        a = np.abs(np.asarray(z))
        return np.minimum(a - self.r, self.R - a)

    def __repr__(self):
        return f"Annulus(r={self.r!r}, R={self.R!r})"


class Ball(Region):
    """The axially symmetric hull of the disc ``|z - centre| < radius``.
    """

    __slots__ = ('centre', 'radius')

    def __init__(self, centre, radius):
        centre = complex(centre)
        self.centre = complex(centre.real, abs(centre.imag))
        self.radius = float(radius)

    def clearance(self, z):
        return self.radius - np.abs(_reflect(z) - self.centre)

    def __repr__(self):
        return f"Ball(centre={self.centre!r}, radius={self.radius!r})"


class HalfPlane(Region):
    """``{u > a}`` (``side='right'``) or ``{u < a}`` (``side='left'``).
    """

    __slots__ = ('a', 'side')

    def __init__(self, a=0.0, side='right'):
        if side not in ('right', 'left'):
            raise ValueError(f"side must be 'right' or 'left', got {side!r}.")
        self.a, self.side = float(a), side

    def clearance(self, z):
        u = np.asarray(z).real
        return u - self.a if self.side == 'right' else self.a - u

    def __repr__(self):
        return f"HalfPlane(a={self.a!r}, side={self.side!r})"


class Punctured(Region):
    """``H`` minus the spheres through a finite set of points (poles).
    """

    __slots__ = ('points',)

    def __init__(self, points):
        self.points = tuple(complex(p.real, abs(p.imag))
                            for p in map(complex, points))

    def clearance(self, z):
        w = _reflect(z)
        if not self.points:
            return np.full(w.shape, np.inf)
        return np.min([np.abs(w - p) for p in self.points], axis=0)

    def __repr__(self):
        return f"Punctured(points={list(self.points)!r})"


class Union(Region):

    __slots__ = ('parts',)

    def __init__(self, *parts):
        self.parts = parts

    def clearance(self, z):
        return np.max([p.clearance(z) for p in self.parts], axis=0)

    def __repr__(self):
        return " | ".join(map(repr, self.parts))


class Intersection(Region):

    __slots__ = ('parts',)

    def __init__(self, *parts):
        self.parts = parts

    def clearance(self, z):
        return np.min([p.clearance(z) for p in self.parts], axis=0)

    def __repr__(self):
        return " & ".join(f"({p!r})" for p in self.parts)


EVERYWHERE = Everywhere()
SLIT_PLANE = Sector(np.pi)
