"""Integration paths in a complex slice ``C_I`` for the S-functional
calculus.

A :class:`ContourSpec` is a union of closed, positively oriented loops made
of circle arcs and line segments, symmetric under ``z -> conj(z)``. Its
quadrature nodes are composite Gauss-Legendre points on each arc.
"""
from typing import NamedTuple

import numpy as np

from .domain import EVERYWHERE
from .errors import DomainError, EnclosureError
from .quadrature import composite_rule
from .quaternion import E1, Quaternion, as_qarray


CLOSURE_ATOL = 1e-12
SYMMETRY_ATOL = 1e-10
DEFAULT_ORDER = 32
MAX_RESOLVE_NODES = 2**16


class CircleArc(NamedTuple):
    """``centre + radius exp(i theta)`` for ``theta`` from ``theta0`` to
    ``theta1``.
    """
    centre: complex
    radius: float
    theta0: float = 0.0
    theta1: float = 2 * np.pi

    def point(self, tau):
        theta = self.theta0 + (self.theta1 - self.theta0) * tau
        return self.centre + self.radius * np.exp(1j * theta)

    def derivative(self, tau):
        theta = self.theta0 + (self.theta1 - self.theta0) * tau
        return (1j * (self.theta1 - self.theta0) * self.radius *
                np.exp(1j * theta))

    def distance(self, z):
        z = np.asarray(z, dtype=complex)
        if abs(self.theta1 - self.theta0) >= 2 * np.pi - 1e-15:
            return np.abs(np.abs(z - self.centre) - self.radius)
        tau = np.linspace(0.0, 1.0, 4097)
        return np.min(np.abs(z[..., None] - self.point(tau)), axis=-1)

    def mirrored(self):
        return CircleArc(complex(self.centre).conjugate(), self.radius,
                         -self.theta1, -self.theta0)


class Segment(NamedTuple):
    """The straight line from ``a`` to ``b``.
    """
    a: complex
    b: complex

    def point(self, tau):
        return self.a + (self.b - self.a) * np.asarray(tau)

    def derivative(self, tau):
        return np.full(np.shape(tau), self.b - self.a, dtype=complex)

    def distance(self, z):
        z = np.asarray(z, dtype=complex)
        d = self.b - self.a
        tau = np.clip(((z - self.a) * np.conj(d)).real / abs(d)**2, 0.0, 1.0)
        return np.abs(z - self.point(tau))

    def mirrored(self):
        return Segment(complex(self.b).conjugate(),
                       complex(self.a).conjugate())


def _unit_imaginary(axis):
    q = as_qarray(axis)
    if abs(q[0]) > 1e-12 or abs(np.linalg.norm(q) - 1.0) > 1e-12:
        raise DomainError(f"The slice axis must be a unit imaginary "
                          f"quaternion, got {Quaternion.from_array(q)}.")
    return Quaternion.from_array(q)


class ContourSpec:
    """A closed, conjugation symmetric integration path in ``C_I``.

    Parameters
    ----------
    loops : sequence of sequence of CircleArc or Segment
        Each loop is a chain of arcs whose end points meet, traversed
        counterclockwise around the region it bounds.
    axis : Quaternion, optional
        The imaginary unit ``I`` of the slice.
    panels : int, optional
        Gauss-Legendre panels per arc.
    order : int, optional
        Points per panel.
    check : bool, optional
        Verify closure and symmetry.
    """

    __slots__ = ('loops', 'axis', 'panels', 'order')

    def __init__(self, loops, axis=E1, panels=2, order=DEFAULT_ORDER,
                 check=True):
        self.loops = tuple(tuple(loop) for loop in loops)
        self.axis = _unit_imaginary(axis)
        self.panels = int(panels)
        self.order = int(order)
        if check:
            if not self.is_closed():
                raise ValueError("Contour arcs do not chain into closed "
                                 "loops.")
            if not self.is_symmetric():
                raise ValueError("Contour is not symmetric about the real "
                                 "axis.")

    @property
    def arcs(self):
        return tuple(arc for loop in self.loops for arc in loop)

    @property
    def nodes_per_arc(self):
        return self.panels * self.order

    @property
    def n_nodes(self):
        return len(self.arcs) * self.nodes_per_arc

    def nodes(self):
        """Quadrature nodes ``z`` and complex weights ``dz`` such that
        ``sum(g(z) * dz)`` approximates the contour integral of ``g``.
        """
        tau, w = composite_rule(0.0, 1.0, self.panels, self.order)
        z = np.concatenate([arc.point(tau) for arc in self.arcs])
        dz = np.concatenate([arc.derivative(tau) * w for arc in self.arcs])
        return z, dz

    def refined(self, factor=2):
        return ContourSpec(self.loops, self.axis, self.panels * factor,
                           self.order, check=False)

    def with_axis(self, axis):
        return ContourSpec(self.loops, axis, self.panels, self.order,
                           check=False)

    def is_closed(self, atol=CLOSURE_ATOL):
        for loop in self.loops:
            for arc, nxt in zip(loop, loop[1:] + loop[:1]):
                if abs(arc.point(1.0) - nxt.point(0.0)) > atol * max(
                        1.0, abs(arc.point(1.0))):
                    return False
        return True

    def is_symmetric(self, atol=SYMMETRY_ATOL, samples=64):
        tau = np.linspace(0.0, 1.0, samples)
        pts = np.concatenate([arc.point(tau) for arc in self.arcs])
        scale = max(1.0, float(np.max(np.abs(pts))))
        return bool(np.all(self.distance(pts.conj()) <= atol * scale))

    def distance(self, z):
        """Distance from each of ``z`` to the path.
        """
        z = np.asarray(z, dtype=complex)
        return np.min([arc.distance(z) for arc in self.arcs], axis=0)

    def winding_number(self, a):
        """Winding number of the path around the complex point ``a``.
        """
        z, dz = self.refined(4).nodes()
        return int(np.rint((np.sum(dz / (z - a)) / (2j * np.pi)).real))

    def arc_spacings(self):
        """Largest gap between consecutive nodes, per arc.
        """
        tau, _ = composite_rule(0.0, 1.0, self.panels, self.order)
        return tuple(float(np.max(np.abs(np.diff(arc.point(tau)))))
                     for arc in self.arcs)

    def node_spacing(self):
        """Largest gap between consecutive nodes on any one arc.
        """
        return max(self.arc_spacings())

    def resolves(self, pts):
        """Whether every arc's nodes are closer together than any of
        ``pts`` is to that arc.
        """
        pts = np.atleast_1d(np.asarray(pts, dtype=complex))
        return all(float(np.min(arc.distance(pts))) > h
                   for arc, h in zip(self.arcs, self.arc_spacings()))

    def check_encloses(self, spheres, allow_outside=False):
        """Check that every sphere (both representatives ``u +- iv``) is
        strictly inside (or, with ``allow_outside``, strictly outside) the
        path and further from each arc than that arc's node spacing.

        Raises
        ------
        EnclosureError
        """
        spacings = self.arc_spacings()
        for sph in spheres:
            for z in {complex(sph.u, sph.v), complex(sph.u, -sph.v)}:
                for arc, h in zip(self.arcs, spacings):
                    d = float(arc.distance(z))
                    if d <= h:
                        raise EnclosureError(
                            f"Spectral sphere ({sph.u:.6g}, {sph.v:.6g}) "
                            f"lies within {d:.3e} of the contour (node "
                            f"spacing {h:.3e}).")
                w = self.winding_number(z)
                if w != 1 and not (allow_outside and w == 0):
                    raise EnclosureError(
                        f"Spectral sphere ({sph.u:.6g}, {sph.v:.6g}) has "
                        f"winding number {w} with respect to the contour.")

    def describe(self):
        out = []
        for loop in self.loops:
            for arc in loop:
                if isinstance(arc, CircleArc):
                    c = complex(arc.centre)
                    out.append({'type': 'arc', 'centre': [c.real, c.imag],
                                'radius': float(arc.radius),
                                'theta': [float(arc.theta0),
                                          float(arc.theta1)]})
                else:
                    out.append({'type': 'segment',
                                'from': [complex(arc.a).real,
                                         complex(arc.a).imag],
                                'to': [complex(arc.b).real,
                                       complex(arc.b).imag]})
        return {'axis': list(self.axis), 'arcs': out,
                'nodes': self.n_nodes}

    def __repr__(self):
        return (f"ContourSpec(loops={len(self.loops)}, arcs={len(self.arcs)}, "
                f"nodes={self.n_nodes})")


def circle_contour(centre=0.0, radius=1.0, axis=E1, panels=2,
                   order=DEFAULT_ORDER):
    """A circle around ``centre``; a non-real centre also gets its mirror
    image so that the path is symmetric.

    Examples
    --------

        >>> c = circle_contour(0.0, 2.0)
        >>> c.winding_number(1j), c.winding_number(3.0)
        (1, 0)

    """
    centre = complex(centre)
    if radius <= 0.0:
        raise ValueError(f"Radius must be positive, got {radius}.")
    if centre.imag == 0.0:
        loops = [(CircleArc(centre, float(radius)),)]
    else:
        if radius >= abs(centre.imag):
            raise ValueError(
                f"A circle of radius {radius} around {centre} overlaps its "
                "mirror image, centre it on the real axis instead.")
        arc = CircleArc(centre, float(radius))
        loops = [(arc,), (arc.mirrored(),)]
    return ContourSpec(loops, axis=axis, panels=panels, order=order)


def _disk_fits(domain, centre, radius, margin, rings=32, samples=256):
    """Whether the closed disk lies inside ``domain``, with ``margin`` to
    spare on its boundary. Every point of the disk is within ``delta`` of a
    sample, so samples clearing ``delta`` cover the interior.
    """
    theta = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    r = np.linspace(0.0, radius, rings + 1)
    clear = domain.clearance(centre + r[:, None] * np.exp(1j * theta))
    delta = np.hypot(radius / (2 * rings), np.pi * radius / samples)
    return bool(clear[-1].min() > margin and clear.min() > delta)


def _resolved(contour, pts, max_nodes=MAX_RESOLVE_NODES):
    """Refine ``contour`` until, on every arc, its nodes are closer together
    than the points ``pts`` (and their mirror images) are to that arc.
    """
    pts = np.atleast_1d(np.asarray(pts, dtype=complex))
    pts = np.concatenate([pts, pts.conj()])
    while not contour.resolves(pts) and 2 * contour.n_nodes <= max_nodes:
        contour = contour.refined()
    return contour


def resolve_contour(contour, spheres, max_nodes=MAX_RESOLVE_NODES):
    """Refine ``contour`` by panel doubling until its nodes resolve every
    sphere representative. A sphere lying on the path cannot be resolved;
    refinement then stops at ``max_nodes`` and :meth:`ContourSpec.
    check_encloses` reports it.
    """
    pts = [complex(s.u, s.v) for s in spheres]
    if not pts:
        return contour
    return _resolved(contour, pts, max_nodes)


def auto_contour(spheres, domain=EVERYWHERE, axis=E1, panels=2,
                 order=DEFAULT_ORDER, margin=0.5):
    """Build a contour enclosing all ``spheres`` inside ``domain``.

    A single circle on the real axis is used when it fits in ``domain``
    with room to spare; otherwise each sphere representative ``u +- iv``
    gets its own circle of radius half the distance to the nearest other
    representative or to the boundary of ``domain``.

    Raises
    ------
    DomainError
        If a sphere lies outside ``domain`` or on its boundary.
    """
    pts = [complex(s.u, s.v) for s in spheres]
    if not pts:
        return circle_contour(0.0, 1.0, axis, panels, order)
    pts = np.array(pts)
    reach = np.abs(pts)
    clear = domain.clearance(pts)
    if np.any(clear <= 0.0):
        bad = pts[np.argmin(clear)]
        raise DomainError(f"Spectral point {bad:.6g} is not inside the "
                          f"function's domain {domain!r}.")

    # one big circle
    c = 0.5 * (pts.real.min() + pts.real.max())
    R = float(np.max(np.abs(pts - c)))
    R_out = R + max(margin * max(R, 1.0), 1e-3)
    if _disk_fits(domain, c, R_out, 0.1 * (R_out - R)):
        return _resolved(circle_contour(c, R_out, axis, panels, order), pts)
    R_out = R + margin * float(np.min(clear))
    if R_out > R and _disk_fits(domain, c, R_out, 0.1 * (R_out - R)):
        return _resolved(circle_contour(c, R_out, axis, panels, order), pts)

    # small circles, never overlapping each other or their mirror images
    reps = np.concatenate([pts, pts[pts.imag > 0].conj()])
    loops = []
    for z in pts:
        others = reps[np.abs(reps - z) > 0]
        gap = np.min(np.abs(others - z)) if len(others) else np.inf
        r = 0.5 * min(gap, float(domain.clearance(z)),
                      max(1.0, float(np.max(reach))))
        arc = CircleArc(complex(z), r)
        loops.append((arc,))
        if z.imag != 0.0:
            loops.append((arc.mirrored(),))
    return _resolved(ContourSpec(loops, axis=axis, panels=panels,
                                 order=order), pts)
