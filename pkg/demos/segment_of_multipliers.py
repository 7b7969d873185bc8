"""Walk through the bundled bilevel problem whose multiplier set is a segment.

Run with ``python demos/segment_of_multipliers.py``.
"""
from sharpmpec import (
    analyze_point,
    bundled_path,
    check_2_nondegenerate,
    directional,
    parse_certificate,
    parse_problem,
    search_sharp,
    verify_sharp,
)


def show(v):
    return "(" + ", ".join(str(x) for x in v) + ")"


data, _ = parse_problem(bundled_path("example1.json"))
geom = analyze_point(data)
print("vertices of the multiplier set:", [show(v) for v in geom.extreme])
print("critical cone equalities:", [show(r) for r in geom.K.eq])

for v in [(1, 0, 0), (0, 1, 0), (1, 1, 0), (2, 1, 0), (0, 0, 0)]:
    dd = directional(data, geom, v)
    nd = check_2_nondegenerate(data, geom, v)
    print(f"v={show(v)}: maximizing multipliers {[show(x) for x in dd.vertices]}, "
          f"2-nondegenerate={'yes' if nd.holds else 'no'}")

cert = parse_certificate(bundled_path("example1_cert.json"))
report = verify_sharp(data, geom, cert)
print("\nbundled certificate:", report.verdict)
for c in report.conditions:
    print(f"  {c.id:>16}  {c.verdict:<5} {c.detail}")

found = search_sharp(data, geom)
print("\nsearch picked v̄ =", show(found.cert.vbar), "with verdict", found.report.verdict)
