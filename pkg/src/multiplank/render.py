"""SVG figures: multi-plank regions are contoured from the membership margin field."""
from __future__ import annotations

import numpy as np
from skimage.measure import find_contours

from .geom import GeometryError
from .multiplank import MultiPlank
from .scene import Scene

SIZE = 800
COLORS = ("#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860")


def viewport(scene: Scene) -> tuple[float, float, float, float]:
    if "view" in scene.options:
        xmin, xmax, ymin, ymax = (float(v) for v in scene.options["view"])
        return xmin, xmax, ymin, ymax
    pts = [np.zeros((1, 2))]
    for i, V in enumerate(scene.generating_sets):
        pts.append(np.asarray(V) + scene.translation(i))
    for name in scene.bodies:
        pts.append(scene.body(name).vertices[:, :2])
    if scene.gauge:
        pts.append(np.asarray(scene.gauge["polygon"]))
    if scene.fans:
        pts.append(np.array([f["apex"] for f in scene.fans]))
    R = max(1.5, 1.5 * float(np.abs(np.vstack(pts)).max()))
    return -R, R, -R, R


def field_contours(margin, view, resolution: int) -> list[np.ndarray]:
    """Level-0 contours of ``margin`` on a resolution x resolution grid, in world coordinates.

    The field is padded with an outside border so regions cut by the viewport close up.
    """
    xmin, xmax, ymin, ymax = view
    xs = np.linspace(xmin, xmax, resolution)
    ys = np.linspace(ymin, ymax, resolution)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    F = margin(np.column_stack([X.ravel(), Y.ravel()])).reshape(resolution, resolution)
    F = np.pad(np.clip(F, -1.0, 1.0), 1, constant_values=-1.0)
    out = []
    for c in find_contours(F, 0.0):
        r, q = c[:, 0] - 1, c[:, 1] - 1
        r = np.clip(r, 0, resolution - 1)
        q = np.clip(q, 0, resolution - 1)
        out.append(np.column_stack([xmin + q * (xmax - xmin) / (resolution - 1),
                                    ymin + r * (ymax - ymin) / (resolution - 1)]))
    return out


class _Canvas:
    def __init__(self, view):
        self.view = view
        self.parts: list[str] = []

    def screen(self, p) -> tuple[float, float]:
        xmin, xmax, ymin, ymax = self.view
        return (p[0] - xmin) / (xmax - xmin) * SIZE, (ymax - p[1]) / (ymax - ymin) * SIZE

    def xy(self, p) -> str:
        sx, sy = self.screen(p)
        return f"{sx:.3f},{sy:.3f}"

    def path(self, P, closed: bool = False) -> str:
        d = "M" + " L".join(self.xy(p) for p in P)
        return d + (" Z" if closed else "")

    def open(self, gid: str):
        self.parts.append(f'<g id="{gid}">')

    def close(self):
        # empty layers are dropped
        if self.parts[-1].startswith("<g "):
            self.parts.pop()
        else:
            self.parts.append("</g>")

    def add(self, s: str):
        self.parts.append(s)

    def circle(self, c, r_world: float, style: str):
        xmin, xmax = self.view[:2]
        r = r_world / (xmax - xmin) * SIZE
        sx, sy = self.screen(c)
        self.add(f'<circle cx="{sx:.3f}" cy="{sy:.3f}" r="{r:.3f}" {style}/>')


def _planks(scene: Scene, closed: bool):
    out = []
    for i, V in enumerate(scene.generating_sets):
        if scene.dim != 2:
            break
        # membership only sees differences of generators, so centering does not move the region
        out.append(MultiPlank.from_points(V, scene.translation(i), closed, scene.tol()))
    return out


def render_svg(scene: Scene, resolution: int = 512, closed: bool = False, strata: bool | None = None) -> str:
    if scene.dim != 2:
        raise GeometryError("rendering needs a 2D scene")
    view = viewport(scene)
    cv = _Canvas(view)
    cv.add(f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">')
    cv.add(f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>')
    xmin, xmax, ymin, ymax = view
    cv.open("axes")
    cv.add(f'<path d="{cv.path([(xmin, 0), (xmax, 0)])}" stroke="#999" stroke-width="0.8"/>')
    cv.add(f'<path d="{cv.path([(0, ymin), (0, ymax)])}" stroke="#999" stroke-width="0.8"/>')
    cv.close()

    gauge = None
    if scene.gauge:
        from .normed import Gauge, NormedMultiPlank, normed_center

        gauge = Gauge(scene.gauge["polygon"])
        cv.open("gauge")
        cv.add(f'<path d="{cv.path(gauge.vertices, True)}" fill="none" stroke="#333" '
               f'stroke-dasharray="4 3" stroke-width="1.2"/>')
        cv.close()

    for name, spec in sorted(scene.bodies.items()):
        K = scene.body(name)
        cv.open(f"body-{name}")
        cv.add(f'<path d="{cv.path(K.vertices, True)}" fill="none" stroke="#222" stroke-width="1.5"/>')
        cv.close()

    cv.open("multiplanks")
    planks = _planks(scene, closed)
    normed = gauge is not None and bool(scene.options.get("normed", False))
    for i, P in enumerate(planks):
        if normed:
            NP = NormedMultiPlank(normed_center(P.V, gauge), gauge)
            margin = (lambda X, NP=NP, t=P.translation: NP.margin(X - t))
        else:
            margin = P.margin
        color = COLORS[i % len(COLORS)]
        d = " ".join(cv.path(c, True) for c in field_contours(margin, view, resolution))
        if d:
            cv.add(f'<path d="{d}" fill="{color}" fill-opacity="0.25" fill-rule="evenodd" '
                   f'stroke="{color}" stroke-width="1"/>')
    cv.close()

    if strata if strata is not None else scene.options.get("strata", False):
        from .stratify import stratify

        cv.open("strata")
        R = 2 * max(xmax - xmin, ymax - ymin)
        for P in planks:
            if P.rank < 2:
                continue
            st = stratify(P.gen)
            for T in st.simplices:
                Tw = T + P.translation
                cv.add(f'<path d="{cv.path(Tw, True)}" fill="none" stroke="#000" stroke-width="1"/>')
                # wing boundaries: outward normals at both ends of every edge
                c = Tw.mean(axis=0)
                for a in range(3):
                    p, q = Tw[a], Tw[(a + 1) % 3]
                    e = q - p
                    nrm = np.array([e[1], -e[0]]) / np.linalg.norm(e)
                    if (c - p) @ nrm > 0:
                        nrm = -nrm
                    for s in (p, q):
                        cv.add(f'<path d="{cv.path([s, s + R * nrm])}" stroke="#000" '
                               f'stroke-width="0.6" stroke-dasharray="2 2"/>')
        cv.close()

    if scene.fans:
        cv.open("fans")
        cv.circle((0.0, 0.0), 1.0, 'fill="none" stroke="#222" stroke-width="1.2"')
        R = 2 * max(xmax - xmin, ymax - ymin)
        for f in scene.fan_objects():
            a = np.asarray(f.apex)
            for d in f.directions:
                cv.add(f'<path d="{cv.path([a, a + R * d])}" stroke="#c44e52" stroke-width="1.5"/>')
        cv.close()

    cv.open("meb")
    for P in planks:
        c = P.translation
        cv.circle(c, P.inradius, 'fill="none" stroke="#555" stroke-width="0.8" stroke-dasharray="5 3"')
    cv.close()

    cv.open("points")
    for P in planks:
        for v in P.V + P.translation:
            cv.circle(v, (xmax - xmin) / 200, 'fill="#000"')
    cv.close()
    cv.add("</svg>")
    return "\n".join(cv.parts) + "\n"
