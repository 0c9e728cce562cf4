"""Static SVG figure of a tree, optionally with a witness line

Points are drawn as circles and edges as segments. Trees in R^3 are
drawn projected on their first two coordinates, without a witness.
"""

import logging
import os

logger = logging.getLogger(__name__)

CANVAS = 512
MARGIN = 16
POINT_RADIUS = 2.5
EDGE_STROKE = 1.0
WITNESS_STROKE = 1.5


class _Frame(object):
    """Maps data coordinates onto the canvas, y pointing up"""

    def __init__(self, points, canvas=CANVAS, margin=MARGIN):
        xs = [float(p[0]) for p in points]
        ys = [float(p[1]) for p in points]
        self.xmin, self.xmax = min(xs), max(xs)
        self.ymin, self.ymax = min(ys), max(ys)
        pad = 0.05 * max(self.xmax - self.xmin, self.ymax - self.ymin, 1.0)
        self.xmin -= pad
        self.xmax += pad
        self.ymin -= pad
        self.ymax += pad
        self.canvas = canvas
        self.margin = margin
        span = max(self.xmax - self.xmin, self.ymax - self.ymin)
        self.scale = (canvas - 2 * margin) / span

    def __call__(self, x, y):
        return (
            self.margin + (float(x) - self.xmin) * self.scale,
            self.canvas - self.margin - (float(y) - self.ymin) * self.scale,
        )

    def clip_line(self, a, b, c):
        """Endpoints of a x + b y + c = 0 inside the padded bounding box"""
        a, b, c = float(a), float(b), float(c)
        found = []
        if b:
            for x in (self.xmin, self.xmax):
                y = -(a * x + c) / b
                if self.ymin <= y <= self.ymax:
                    found.append((x, y))
        if a:
            for y in (self.ymin, self.ymax):
                x = -(b * y + c) / a
                if self.xmin <= x <= self.xmax:
                    found.append((x, y))
        if len(found) < 2:
            return None
        return found[0], max(found, key=lambda q: (q[0] - found[0][0]) ** 2 + (q[1] - found[0][1]) ** 2)


def render_tree(tree, report=None, title=None):
    """SVG text for a tree and an optional CrossingReport witness"""
    if not tree.points:
        raise ValueError("Cannot draw an empty tree")
    frame = _Frame(tree.points)
    fallback = set(tree.fallback_edges)
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 %d %d" width="%d" height="%d">'
        % (CANVAS, CANVAS, CANVAS, CANVAS),
        '  <rect width="100%" height="100%" fill="#fff"/>',
    ]
    if title:
        lines.append(
            '  <text x="%d" y="%d" font-size="12" font-family="sans-serif">%s</text>'
            % (MARGIN, MARGIN - 4, title)
        )
    for i, j in tree.edges:
        x1, y1 = frame(*tree.points[i][:2])
        x2, y2 = frame(*tree.points[j][:2])
        colour = "#c33" if (i, j) in fallback else "#333"
        lines.append(
            '  <line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" stroke="%s" stroke-width="%s"/>'
            % (x1, y1, x2, y2, colour, EDGE_STROKE)
        )
    for point in tree.points:
        x, y = frame(*point[:2])
        lines.append('  <circle cx="%.2f" cy="%.2f" r="%s" fill="#000"/>' % (x, y, POINT_RADIUS))
    if report is not None and tree.dimension == 2:
        ends = frame.clip_line(report.normal[0], report.normal[1], report.offset)
        if ends is None:
            logger.warning("Witness line misses the drawing area")
        else:
            (x1, y1), (x2, y2) = frame(*ends[0]), frame(*ends[1])
            lines.append(
                '  <line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" stroke="#16c" '
                'stroke-width="%s" stroke-dasharray="6 3"/>'
                % (x1, y1, x2, y2, WITNESS_STROKE)
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_tree_svg(filename, tree, report=None, title=None):
    dirname = os.path.dirname(filename)
    if dirname and not os.path.exists(dirname):
        os.makedirs(dirname)
    with open(filename, "w") as fhandle:
        fhandle.write(render_tree(tree, report=report, title=title))
    logger.info("Wrote figure %s", filename)
