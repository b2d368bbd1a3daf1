"""Route exports: GeoJSON and a minimal standalone SVG."""

import json


def route_to_geojson(route, scenario):
    """Shuttle path as a LineString plus per-passenger walk segments."""
    path = [list(route.points[0])] + [list(route.points[c]) for c in route.sequence]
    features = [
        {
            "type": "Feature",
            "properties": {"kind": "shuttle-path", "cost": route.cost},
            "geometry": {"type": "LineString", "coordinates": path},
        }
    ]
    for req in scenario.requests:
        cp = scenario.pattern.pickup_cluster(req.id)
        cd = scenario.pattern.dropoff_cluster(req.id)
        if cp and not scenario.is_onboard(req.id):
            features.append(_walk(req.id, "pickup-walk", req.pickup, route.points[cp]))
        if cd:
            features.append(_walk(req.id, "dropoff-walk", route.points[cd], req.dropoff))
    for i, cid in enumerate(route.sequence):
        features.append(
            {
                "type": "Feature",
                "properties": {"kind": "stop", "order": i + 1, "cluster": cid},
                "geometry": {"type": "Point", "coordinates": list(route.points[cid])},
            }
        )
    return {"type": "FeatureCollection", "features": features}


def _walk(passenger, kind, src, dst):
    return {
        "type": "Feature",
        "properties": {"kind": kind, "passenger": passenger},
        "geometry": {"type": "LineString", "coordinates": [list(src), list(dst)]},
    }


def route_to_svg(route, scenario, size=640):
    """Self-contained SVG: stops, shuttle path, space windows, walks."""
    xs, ys = [], []
    for p in route.points:
        xs.append(p[0])
        ys.append(p[1])
    for r in scenario.requests:
        for q, rad in ((r.pickup, r.pickup_radius), (r.dropoff, r.dropoff_radius)):
            xs.extend((q[0] - rad, q[0] + rad))
            ys.extend((q[1] - rad, q[1] + rad))
    pad = 0.05 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    x0, y0 = min(xs) - pad, min(ys) - pad
    span = max(max(xs) - min(xs), max(ys) - min(ys)) + 2 * pad
    scale = size / span

    def sx(p):
        return (p[0] - x0) * scale

    def sy(p):
        return size - (p[1] - y0) * scale  # y grows upward

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for req in scenario.requests:
        for q, rad, color in (
            (req.pickup, req.pickup_radius, "#7fbf7f"),
            (req.dropoff, req.dropoff_radius, "#bf7f7f"),
        ):
            parts.append(
                f'<circle cx="{sx(q):.1f}" cy="{sy(q):.1f}" r="{max(rad * scale, 2):.1f}" '
                f'fill="{color}" fill-opacity="0.25" stroke="{color}"/>'
            )
    path = [route.points[0]] + [route.points[c] for c in route.sequence]
    d = "M " + " L ".join(f"{sx(p):.1f} {sy(p):.1f}" for p in path)
    parts.append(f'<path d="{d}" fill="none" stroke="#3050c0" stroke-width="2"/>')
    for req in scenario.requests:
        cp = scenario.pattern.pickup_cluster(req.id)
        cd = scenario.pattern.dropoff_cluster(req.id)
        segs = []
        if cp and not scenario.is_onboard(req.id):
            segs.append((req.pickup, route.points[cp]))
        if cd:
            segs.append((route.points[cd], req.dropoff))
        for a, b in segs:
            parts.append(
                f'<line x1="{sx(a):.1f}" y1="{sy(a):.1f}" x2="{sx(b):.1f}" y2="{sy(b):.1f}" '
                'stroke="#808080" stroke-dasharray="4 3"/>'
            )
    for i, cid in enumerate(route.sequence):
        p = route.points[cid]
        parts.append(f'<circle cx="{sx(p):.1f}" cy="{sy(p):.1f}" r="4" fill="#3050c0"/>')
        parts.append(
            f'<text x="{sx(p) + 6:.1f}" y="{sy(p) - 6:.1f}" font-size="11">{i + 1}</text>'
        )
    p0 = route.points[0]
    parts.append(
        f'<rect x="{sx(p0) - 4:.1f}" y="{sy(p0) - 4:.1f}" width="8" height="8" fill="#c03030"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def dumps(doc):
    """Deterministic JSON encoding used for all file outputs."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
