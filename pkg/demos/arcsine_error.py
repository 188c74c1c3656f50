"""Measure the arcsine circuit's output error against math.asin and show
where it lands relative to the two tolerance forms."""

from avarith import verify_exhaustive
from avarith.registry import arcsine_tolerances, lookup

for n in (8, 10, 12):
    spec = lookup("arcsine").default_spec(n)
    err = verify_exhaustive(spec).metrics["max_error"]
    declared, derived = arcsine_tolerances(spec)
    if err <= declared:
        verdict = "within declared"
    elif err <= derived:
        verdict = "exceeds declared, within derived"
    else:
        verdict = "FAILS"
    print(f"n={n:2d}: max error {err:.5f}  declared {declared:.5f}  derived {derived:.5f}  {verdict}")
