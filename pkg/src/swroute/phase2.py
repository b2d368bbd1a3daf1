"""Placement at a fixed visit order: convex stop-point optimization.

Given the sequence, the remaining decisions are the routing points, one per
cluster inside its feasible area. The objective is the weighted sum of
segment times (each weighted by who is waiting/riding), walking times, and
any waits forced by the departure rule, which are folded into the departure
of the stop where they occur. Folding at the stop prices a forced wait at
that stop's multiplier; since multipliers never increase along the route
when the waiting weight is at least the riding weight, this equals the
optimal wait allocation and the resulting cost is convex in the points.

The solver is a projected first-order method: a short normalized
subgradient phase followed by projected gradient descent with a smoothed
norm and backtracking line search. Projections onto the disk-intersection
areas come from the geometry module and are exact.

`brute_place` is the independent check: a branch-and-bound grid refinement
over the product of areas with a global Lipschitz pruning bound, returning
the best lattice point at the requested resolution.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridTooLarge, NonConvergence
from .geometry import scenario_areas
from .model import PICKUP, dist, realize_route
from .phase1 import sunk_cost

_PATIENCE = 200
_SUBGRAD_ITERS = 500


@dataclass(frozen=True)
class WalkTerm:
    passenger: int
    kind: str
    cluster: int
    anchor: tuple
    coeff: float  # objective weight of this walk time
    ready_stop: int  # 1-based stop position whose departure it gates, or 0


@dataclass
class PlacementProblem:
    """Everything the placer needs, precomputed from (sequence, scenario)."""

    scenario: object
    sequence: tuple
    areas: list  # per cluster id, index 0 = start point
    order: list  # [0, sequence...]
    waiting_counts: list  # passengers not yet picked up, per segment
    riding_counts: list  # passengers on board, per segment
    multipliers: list  # segment cost weight, per segment (1-based pos - 1)
    walk_terms: list
    free_ids: list  # cluster ids whose point is actually adjustable
    constant: float  # sunk dynamic cost

    @property
    def n_stops(self):
        return len(self.sequence)


def build_placement(sequence, scenario, areas=None):
    cfg = scenario.config
    pattern = scenario.pattern
    if areas is None:
        areas = scenario_areas(scenario)

    pos_of = {cid: j + 1 for j, cid in enumerate(sequence)}
    waiting = []
    riding = []
    mult = []
    n_wait = sum(
        1 for r in scenario.requests
        if not scenario.is_onboard(r.id) and pattern.pickup_cluster(r.id)
    )
    onboard = len(scenario.onboard)
    for cid in sequence:
        waiting.append(n_wait)
        riding.append(onboard)
        mult.append(cfg.gamma1 + cfg.gamma2 * (cfg.alpha1 * n_wait + cfg.alpha2 * onboard))
        cluster = pattern.cluster(cid)
        n_wait -= sum(1 for k in cluster.pickups() if not scenario.is_onboard(k))
        onboard += sum(1 for k in cluster.pickups() if not scenario.is_onboard(k))
        onboard -= len(cluster.dropoffs())

    terms = []
    for req in scenario.requests:
        cp = pattern.pickup_cluster(req.id)
        if cp and not scenario.is_onboard(req.id):
            terms.append(
                WalkTerm(req.id, PICKUP, cp, req.pickup,
                         cfg.gamma2 * cfg.alpha3_pickup, pos_of[cp])
            )
        cd = pattern.dropoff_cluster(req.id)
        if cd:
            terms.append(
                WalkTerm(req.id, "dropoff", cd, req.dropoff,
                         cfg.gamma2 * cfg.alpha3_dropoff, 0)
            )

    free = [cid for cid in sequence if not areas[cid].degenerate]
    problem = PlacementProblem(
        scenario=scenario,
        sequence=tuple(sequence),
        areas=areas,
        order=[0] + list(sequence),
        waiting_counts=waiting,
        riding_counts=riding,
        multipliers=mult,
        walk_terms=terms,
        free_ids=free,
        constant=sunk_cost(scenario),
    )
    problem.ready_map = {}
    for i, term in enumerate(terms):
        if term.ready_stop:
            t_req = scenario.request(term.passenger).request_time
            problem.ready_map.setdefault(term.ready_stop, []).append((i, t_req))
    problem.walk_coeffs = np.array([t.coeff for t in terms])
    problem.walk_anchors = np.array([t.anchor for t in terms]).reshape(len(terms), 2)
    problem.walk_clusters = [t.cluster for t in terms]
    return problem


def evaluate_points(problem, pts):
    """Realized cost of one point assignment (waits folded at each stop)."""
    return _eval_batch(problem, np.asarray(pts, dtype=float)[None, :, :])[0]


def _eval_batch(problem, pts):
    """Vectorized realized cost for a (B, n_points, 2) batch."""
    sc = problem.scenario
    veh = sc.vehicle
    ta = veh.stop_overhead
    B = pts.shape[0]

    if len(problem.walk_terms):
        d = pts[:, problem.walk_clusters, :] - problem.walk_anchors[None, :, :]
        walks = np.hypot(d[..., 0], d[..., 1]) / veh.walk_speed
    else:
        walks = np.zeros((B, 0))

    cost = np.zeros(B)
    t_prev = np.full(B, sc.start_time)
    for j, cid in enumerate(problem.sequence, start=1):
        d = pts[:, cid, :] - pts[:, problem.order[j - 1], :]
        dep = t_prev + np.hypot(d[:, 0], d[:, 1]) / veh.shuttle_speed + ta
        for i, t_req in problem.ready_map.get(j, ()):
            dep = np.maximum(dep, t_req + walks[:, i])
        cost += problem.multipliers[j - 1] * (dep - t_prev)
        t_prev = dep

    if len(problem.walk_terms):
        cost += walks @ problem.walk_coeffs
    return cost + problem.constant


def _value_and_grad(problem, pts, mu):
    """Realized cost (with mu-smoothed norms) and its (sub)gradient."""
    sc = problem.scenario
    veh = sc.vehicle
    ta = veh.stop_overhead
    n = problem.n_stops
    m = problem.multipliers

    walks = []
    wdirs = []
    for term in problem.walk_terms:
        dx = pts[term.cluster][0] - term.anchor[0]
        dy = pts[term.cluster][1] - term.anchor[1]
        nr = math.sqrt(dx * dx + dy * dy + mu * mu)
        walks.append(nr / veh.walk_speed)
        if nr > 0.0:
            wdirs.append((dx / (nr * veh.walk_speed), dy / (nr * veh.walk_speed)))
        else:
            wdirs.append((0.0, 0.0))  # subgradient at the kink

    ready = problem.ready_map
    T = [sc.start_time]
    branch = [0]  # -1 motion, otherwise walk-term index
    tnorm = [0.0]
    tdir = [(0.0, 0.0)]
    for j in range(1, n + 1):
        a, b = problem.order[j - 1], problem.order[j]
        dx = pts[b][0] - pts[a][0]
        dy = pts[b][1] - pts[a][1]
        nr = math.sqrt(dx * dx + dy * dy + mu * mu)
        tnorm.append(nr / veh.shuttle_speed)
        if nr > 0.0:
            tdir.append((dx / (nr * veh.shuttle_speed), dy / (nr * veh.shuttle_speed)))
        else:
            tdir.append((0.0, 0.0))
        dep = T[j - 1] + tnorm[j] + ta
        br = -1
        for i, t_req in ready.get(j, ()):
            cand = t_req + walks[i]
            if cand > dep:
                dep, br = cand, i
        T.append(dep)
        branch.append(br)

    cost = problem.constant
    for j in range(1, n + 1):
        cost += m[j - 1] * (T[j] - T[j - 1])

    g_walk = [t.coeff for t in problem.walk_terms]
    for w, c in zip(walks, g_walk):
        cost += w * c

    # reverse pass: sensitivity of the cost to each departure time
    grad = np.zeros_like(pts)
    s_next = 0.0
    for j in range(n, 0, -1):
        direct = m[j - 1] - (m[j] if j < n else 0.0)
        s = direct + (s_next if j < n and branch[j + 1] == -1 else 0.0)
        if branch[j] == -1:
            a, b = problem.order[j - 1], problem.order[j]
            ux, uy = tdir[j]
            grad[b][0] += s * ux
            grad[b][1] += s * uy
            grad[a][0] -= s * ux
            grad[a][1] -= s * uy
        else:
            g_walk[branch[j]] += s
        s_next = s

    for i, term in enumerate(problem.walk_terms):
        ux, uy = wdirs[i]
        grad[term.cluster][0] += g_walk[i] * ux
        grad[term.cluster][1] += g_walk[i] * uy
    return cost, grad


@dataclass(frozen=True)
class PlacementResult:
    points: tuple
    segment_times: tuple  # effective per-segment times excluding stop overhead
    walks: dict  # passenger -> (walk_pickup, walk_dropoff)
    cost: float
    evaluations: int
    converged: bool


def _step(problem, pts, grad, eta):
    """Move only the free points, then project them back into their areas."""
    out = pts.copy()
    for cid in problem.free_ids:
        moved = (pts[cid][0] - eta * grad[cid][0], pts[cid][1] - eta * grad[cid][1])
        out[cid] = problem.areas[cid].project(moved)
    return out


def solve_placement(problem, warm_start=None):
    """Minimize the realized cost over the product of feasible areas."""
    sc = problem.scenario
    cfg = sc.config
    areas = problem.areas

    pts = np.array(
        [areas[i].centroid() for i in range(len(areas))], dtype=float
    )
    if warm_start is not None:
        warm = np.array(warm_start, dtype=float)
        pts = _step(problem, warm, np.zeros_like(warm), 0.0)

    best_pts = pts.copy()
    best = evaluate_points(problem, pts)
    evals = 1
    if not problem.free_ids:
        return _finish(problem, best_pts, evals, True)

    r_scale = max(
        max(w.radius for w in areas[cid].windows) for cid in problem.free_ids
    )
    r_scale = max(r_scale, 1e-9)
    cap = cfg.place_iter_cap

    # phase A: normalized projected subgradient, diminishing steps
    x = pts.copy()
    for it in range(min(_SUBGRAD_ITERS, cap // 4)):
        _, g = _value_and_grad(problem, x, 0.0)
        gn = np.linalg.norm(g[problem.free_ids])
        if gn < 1e-15:
            break
        x = _step(problem, x, g / gn, r_scale / math.sqrt(it + 1.0))
        val = evaluate_points(problem, x)
        evals += 1
        if val < best:
            best, best_pts = val, x.copy()

    # phase B: smoothed projected gradient descent with backtracking
    converged = False
    for mu in (1e-2 * r_scale, 1e-4 * r_scale, 1e-7 * r_scale):
        x = best_pts.copy()
        fx, g = _value_and_grad(problem, x, mu)
        eta = r_scale / max(np.linalg.norm(g[problem.free_ids]), 1e-12)
        window_best = best
        since = 0
        while evals < cap:
            accepted = False
            for _ in range(40):
                y = _step(problem, x, g, eta)
                fy, gy = _value_and_grad(problem, y, mu)
                evals += 1
                step = np.linalg.norm((y - x)[problem.free_ids])
                if fy <= fx - 1e-4 * step * step / max(eta, 1e-18):
                    accepted = True
                    break
                eta *= 0.5
                if eta < 1e-16 * r_scale:
                    break
            if not accepted:
                converged = True
                break
            if step < 1e-13 * r_scale:
                converged = True
                break
            x, fx, g = y, fy, gy
            eta *= 1.6
            exact = evaluate_points(problem, x)
            evals += 1
            if exact < best:
                best, best_pts = exact, x.copy()
            since += 1
            if since >= _PATIENCE:
                if (window_best - best) <= cfg.eps_place * max(abs(best), 1.0):
                    converged = True
                    break
                window_best = best
                since = 0
        if evals >= cap:
            break

    if not converged and evals >= cap:
        raise NonConvergence(f"placement stopped improving too slowly after {evals} evaluations")
    return _finish(problem, best_pts, evals, converged)


def _finish(problem, pts, evals, converged):
    sc = problem.scenario
    route = realize_route(problem.sequence, [tuple(p) for p in pts], sc)
    ta = sc.vehicle.stop_overhead
    seg = []
    t_prev = sc.start_time
    for dep in route.departures:
        seg.append(dep - t_prev - ta)
        t_prev = dep
    walks = {p.passenger: (p.walk_pickup, p.walk_dropoff) for p in route.passengers}
    return PlacementResult(
        points=route.points,
        segment_times=tuple(seg),
        walks=walks,
        cost=route.cost,
        evaluations=evals,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# independent grid oracle
# ---------------------------------------------------------------------------


def point_lipschitz(problem):
    """Per-point Lipschitz constants of the realized cost.

    Moving one cluster point by rho changes its two adjacent segment times
    by at most rho/v_s each and any walk anchored there by rho/v_p, so all
    departures from that stop onward shift by at most chi*rho; summing the
    multiplier-weighted shifts bounds the cost change.
    """
    sc = problem.scenario
    vs = sc.vehicle.shuttle_speed
    vp = sc.vehicle.walk_speed
    suffix = 0.0
    suffix_m = {}
    for j in range(problem.n_stops, 0, -1):
        suffix += problem.multipliers[j - 1]
        suffix_m[j] = suffix

    out = {}
    pos_of = {cid: j for j, cid in enumerate(problem.sequence, start=1)}
    for cid in problem.free_ids:
        pos = pos_of[cid]
        chi = 2.0 / vs
        walk_part = 0.0
        for term in problem.walk_terms:
            if term.cluster == cid:
                walk_part += term.coeff / vp
                if term.ready_stop:
                    chi = max(chi, 1.0 / vp)
        out[cid] = 2.0 * chi * suffix_m[pos] + walk_part
    return out


def lipschitz_bound(problem):
    """Aggregate Lipschitz constant (simultaneous unit moves of all points)."""
    return sum(point_lipschitz(problem).values())


def _grad_batch(problem, pts):
    """Vectorized realized cost and a valid subgradient per batch row.

    Same recurrence as the scalar path: forward fold with branch tracking,
    reverse sweep over departure sensitivities.
    """
    sc = problem.scenario
    veh = sc.vehicle
    ta = veh.stop_overhead
    B = pts.shape[0]
    n = problem.n_stops
    m = problem.multipliers
    K = len(problem.walk_terms)

    if K:
        d = pts[:, problem.walk_clusters, :] - problem.walk_anchors[None, :, :]
        wnorm = np.hypot(d[..., 0], d[..., 1])
        walks = wnorm / veh.walk_speed
        with np.errstate(invalid="ignore", divide="ignore"):
            wdirs = d / (wnorm[..., None] * veh.walk_speed)
        wdirs[~np.isfinite(wdirs)] = 0.0
    else:
        walks = np.zeros((B, 0))
        wdirs = np.zeros((B, 0, 2))

    deps = np.empty((B, n + 1))
    deps[:, 0] = sc.start_time
    branches = np.full((B, n + 1), -1, dtype=np.int64)
    tdirs = np.zeros((B, n + 1, 2))
    cost = np.zeros(B)
    for j, cid in enumerate(problem.sequence, start=1):
        d = pts[:, cid, :] - pts[:, problem.order[j - 1], :]
        tn = np.hypot(d[:, 0], d[:, 1])
        with np.errstate(invalid="ignore", divide="ignore"):
            td = d / (tn[:, None] * veh.shuttle_speed)
        td[~np.isfinite(td)] = 0.0
        tdirs[:, j, :] = td
        dep = deps[:, j - 1] + tn / veh.shuttle_speed + ta
        br = branches[:, j]
        for i, t_req in problem.ready_map.get(j, ()):
            cand = t_req + walks[:, i]
            take = cand > dep
            dep = np.where(take, cand, dep)
            br = np.where(take, i, br)
        deps[:, j] = dep
        branches[:, j] = br
        cost += m[j - 1] * (dep - deps[:, j - 1])
    if K:
        cost += walks @ problem.walk_coeffs

    grad = np.zeros_like(pts)
    g_walk = np.repeat(problem.walk_coeffs[None, :], B, axis=0) if K else np.zeros((B, 0))
    s_next = np.zeros(B)
    for j in range(n, 0, -1):
        direct = m[j - 1] - (m[j] if j < n else 0.0)
        carry = np.where(branches[:, j + 1] == -1, s_next, 0.0) if j < n else 0.0
        s = direct + carry
        motion = branches[:, j] == -1
        sv = np.where(motion, s, 0.0)[:, None] * tdirs[:, j, :]
        a, b = problem.order[j - 1], problem.order[j]
        grad[:, b, :] += sv
        grad[:, a, :] -= sv
        for i, _ in problem.ready_map.get(j, ()):
            g_walk[:, i] += np.where(branches[:, j] == i, s, 0.0)
        s_next = s
    for i, cid in enumerate(problem.walk_clusters):
        grad[:, cid, :] += g_walk[:, i, None] * wdirs[:, i, :]
    return cost + problem.constant, grad


def multipliers_nonincreasing(problem):
    """True when segment weights never grow along the route, the regime in
    which the realized cost is convex and support-plane bounds are valid."""
    m = problem.multipliers
    return all(m[j] <= m[j - 1] + 1e-12 for j in range(1, len(m)))


@dataclass(frozen=True)
class BruteResult:
    points: tuple
    cost: float
    resolution: float  # achieved relative cell half-width
    cell_bound: float  # Lipschitz slack of one final cell
    nodes: int


def brute_place(problem, grid_resolution=1e-3, node_budget=1_500_000):
    """Certified near-optimal placement on a refined lattice over the areas.

    Branch-and-bound on boxes, split 2x2 per area down to ``grid_resolution``
    times each area's tightest radius. A box is dropped when its projected
    center cannot improve the incumbent by more than the final-cell slack,
    using per-point Lipschitz constants and (in the convex weight regime) a
    support-plane bound from a valid subgradient. On return,

        cost - cell_bound <= true optimum <= cost,

    i.e. the result is within one grid-cell Lipschitz bound of optimal.
    """
    free = problem.free_ids
    base = np.array([a.centroid() for a in problem.areas], dtype=float)
    if not free:
        cost = evaluate_points(problem, base)
        return BruteResult(tuple(map(tuple, base)), cost, 0.0, 0.0, 1)

    lips = point_lipschitz(problem)
    convex = multipliers_nonincreasing(problem)
    radii = {cid: problem.areas[cid].tightest.radius for cid in free}
    centers = {cid: problem.areas[cid].tightest.center for cid in free}
    target = {cid: max(grid_resolution * radii[cid], 1e-12) for cid in free}

    # nodes: (B, nfree, 2) box centers; halves shared per level and area
    nodes = np.array([[centers[cid] for cid in free]])
    halves = {cid: radii[cid] for cid in free}
    eps_target = sum(lips[cid] * target[cid] * math.sqrt(2.0) for cid in free)

    incumbent = evaluate_points(problem, base)
    best_pts = base.copy()
    total = 0

    offsets = np.array([(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)])

    while True:
        splitting = [cid for cid in free if halves[cid] > target[cid]]
        if not splitting:
            break
        children = nodes
        for ai, cid in enumerate(free):
            if cid not in splitting:
                continue
            h = halves[cid]
            shift = np.zeros((4, len(free), 2))
            shift[:, ai, :] = offsets * h
            children = (children[:, None, :, :] + shift[None, :, :, :]).reshape(
                -1, len(free), 2
            )
            halves[cid] = h / 2.0
        total += children.shape[0]
        if total > node_budget:
            raise GridTooLarge(f"{total} grid nodes exceed budget {node_budget}")

        # project the per-area centers, drop boxes that cannot reach the area
        pts = np.repeat(base[None, :, :], children.shape[0], axis=0)
        keep = np.ones(children.shape[0], dtype=bool)
        for ai, cid in enumerate(free):
            proj = _project_batch(problem.areas[cid], children[:, ai, :])
            off = np.hypot(*(children[:, ai, :] - proj).T)
            keep &= off <= halves[cid] * math.sqrt(2.0) + 1e-12
            pts[:, cid, :] = proj
        children = children[keep]
        pts = pts[keep]
        if children.shape[0] == 0:
            break

        if convex:
            vals, grads = _grad_batch(problem, pts)
        else:
            vals = _eval_batch(problem, pts)
        i_best = int(np.argmin(vals))
        if vals[i_best] < incumbent:
            incumbent = float(vals[i_best])
            best_pts = pts[i_best].copy()

        slack = sum(lips[cid] * halves[cid] * math.sqrt(2.0) for cid in free)
        if convex:
            # support-plane bound: C(y) >= C(c) + g.(y - c) over each cell
            gslack = np.zeros(vals.shape[0])
            for ai, cid in enumerate(free):
                gn = np.hypot(grads[:, cid, 0], grads[:, cid, 1])
                gslack += gn * (halves[cid] * math.sqrt(2.0))
            slack = np.minimum(slack, gslack)
        # keep only cells that could still beat the incumbent by more than
        # the final-cell slack: prunes exact ties, keeps the certificate
        keep = vals - slack < incumbent - eps_target
        nodes = children[keep]
        if nodes.shape[0] == 0:
            break

    res = max(halves[cid] / radii[cid] for cid in free)
    return BruteResult(
        points=tuple(map(tuple, best_pts)),
        cost=float(incumbent),
        resolution=res,
        cell_bound=eps_target,
        nodes=total,
    )


def _project_batch(area, pts):
    """Vectorized projection for the grid oracle."""
    if len(area.windows) == 1:
        w = area.windows[0]
        d = pts - np.asarray(w.center)
        nr = np.hypot(d[:, 0], d[:, 1])
        scale = np.minimum(1.0, w.radius / np.maximum(nr, 1e-300))
        return np.asarray(w.center) + d * scale[:, None]
    out = np.empty_like(pts)
    for i, p in enumerate(pts):
        out[i] = area.project((p[0], p[1]))
    return out
