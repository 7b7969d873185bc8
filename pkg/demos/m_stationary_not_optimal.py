"""An M-stationary point that is not a local minimizer.

Lists every M-stationary multiplier class at the bundled point, then runs the
singleton-multiplier sharp check and the implication audit on what it finds.
Run with ``python demos/m_stationary_not_optimal.py``.
"""
from sharpmpec import (
    analyze_point,
    bundled_path,
    corollary_unique_check,
    mscq_sufficient_check,
    parse_problem,
    search_mstat,
    sharp_vs_mstat_audit,
)
from sharpmpec.stationarity import Found


def show(v):
    return "(" + ", ".join(str(x) for x in v) + ")"


data, _ = parse_problem(bundled_path("example2.json"))
geom = analyze_point(data)
print("multiplier set vertices:", [show(v) for v in geom.extreme])
print("MSCQ sufficient check:", type(mscq_sufficient_check(data, geom)).__name__)

print("\nM-stationary classes:")
for c in search_mstat(data):
    tags = ", ".join(f"{i + 1}:{t}" for i, t in c.branches)
    print(f"  w={show(c.w)} ξ={show(c.xi)}  [{tags}]")

res = corollary_unique_check(data, geom)
if isinstance(res, Found):
    c = res.cert
    print(f"\nsingleton-multiplier certificate at v̄={show(c.vbar)}, I={sorted(i + 1 for i in c.I)}, "
          f"I⁺={sorted(i + 1 for i in c.Iplus)}, w={show(c.w)}, ξ={show(c.xi)}")
    audit = sharp_vs_mstat_audit(data, geom, c)
    print("implication audit:", audit.verdict)
    for note in audit.notes:
        print("  ", note)
else:
    print("\nno singleton-multiplier certificate:", res)
