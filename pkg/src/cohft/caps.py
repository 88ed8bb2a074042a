"""Resource caps shared by the correlator and potential engines.

Caps bound genus, insertion count, total cotangent-class degree, and series
order.  Requests beyond the caps raise CapExceeded rather than silently
truncating.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import CapExceeded, UnstablePair


@dataclass(frozen=True)
class Caps:
    g_max: int = 2
    n_max: int = 8
    degree_max: int = 12
    z_order: int = 8
    graph_g_max: int = 2
    graph_n_max: int = 6
    translation_legs_max: int = 6

    def with_(self, **kw) -> "Caps":
        return replace(self, **kw)

    def check_pair(self, g: int, n: int, where: str = ""):
        require_stable(g, n)
        if g > self.g_max or n > self.n_max:
            raise CapExceeded(f"(g={g}, n={n}) exceeds caps (g_max={self.g_max}, n_max={self.n_max}){' in ' + where if where else ''}")

    def check_degree(self, degree: int, where: str = ""):
        if degree > self.degree_max:
            raise CapExceeded(f"degree {degree} exceeds cap {self.degree_max}{' in ' + where if where else ''}")

    def check_graph_pair(self, g: int, n: int):
        require_stable(g, n)
        if g > self.graph_g_max or n > self.graph_n_max:
            raise CapExceeded(f"graph enumeration (g={g}, n={n}) exceeds caps (g<={self.graph_g_max}, n<={self.graph_n_max})")


DEFAULT_CAPS = Caps()


def is_stable(g: int, n: int) -> bool:
    return g >= 0 and n >= 0 and 2 * g - 2 + n > 0


def require_stable(g: int, n: int):
    if not is_stable(g, n):
        raise UnstablePair(f"(g={g}, n={n}) is unstable")
