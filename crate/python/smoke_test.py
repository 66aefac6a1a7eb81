"""Exercise the compiled module end to end. Exits non-zero on the first failure."""

import json
import math

import cat0lab as c


def close(a, b, tol=1e-9):
    assert abs(a - b) <= tol, (a, b)


e = c.SpdPoint.identity()
p = c.SpdPoint.diag([2.0, 1.0, 0.5])
close(e.dist(p), math.sqrt(2.0) * math.log(2.0))
close(e.geodesic(p, 0.5).dist(p), 0.5 * e.dist(p))
close(e.exp(e.log(p)).dist(p), 0.0)

g = c.GroupElement([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]])
report = g.classify()
assert report["jordan"]["case_id"] == 5 and report["kind"] == "hyperbolic", report
close(report["translation_length"], 2.0 * math.sqrt(2.0) * math.log(2.0))
close(g.displacement(e), report["translation_length"])
try:
    c.GroupElement([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    raise AssertionError("determinant 2 accepted")
except ValueError:
    pass

v = [c.BoundaryPoint.standard_vertex(k) for k in range(6)]
close(v[0].distance(v[1]), math.pi / 3)
close(v[1].distance(v[4]), math.pi)
par = c.GroupElement.normal_form(2, [2.0])
assert par.classify()["kind"] == "parabolic"
pts = par.sample_fixed_set(20, 1)
assert all(par.fixes(x) for x in pts)

f = c.Functional.half_dist_sq(p)
trace = f.flow(e, 20.0, 0.1)
assert trace.last().dist(p) < 1e-6
assert all(b <= a + 1e-12 for a, b in zip(trace.values, trace.values[1:]))
lim = c.Functional.displacement(par).flow(e, 10000.0, 1.0).boundary_limit()
assert par.fixes(lim)

xs = [math.pi * k / 100 for k in range(101)]
m = c.MetricSample([str(k) for k in range(101)], [[abs(a - b) for b in xs] for a in xs])
centers = m.minimax_center()
close(centers["rad"], math.pi / 2)
assert centers["centers"] == [50]
back = c.MetricSample.from_json(m.to_json())
assert back.minimax_center() == centers
close(c.comparison_angle(math.pi / 2, math.pi / 2, math.pi / 2), math.pi / 2)
close(c.simplex_geometry(1)["rad"], math.pi / 4)

suite = c.run_suite("tits-metric", seed=3, samples=50)
assert suite["passed"], json.dumps(suite, indent=1)

print("smoke test ok")
