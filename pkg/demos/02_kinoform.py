"""Write a phase-only mask for the qutrit state alpha_1 and check what it makes.

The mask stores amplitude in the depth of a blazed grating.  An FFT with
a pinhole on the first order stands in for the lens and fibre.
"""

from pathlib import Path

from qusix.kinoform import KINOFORM_GRID, TargetMode, first_order, kinoform_png, make_kinoform
from qusix.optics import field_overlap, intensity_png, synthesize_mode
from qusix.states import resolve_superposition

out = Path("demo_output")
out.mkdir(exist_ok=True)

sup = resolve_superposition("O2:alpha1")
print("OAM content:", [(m, round(abs(c), 3)) for m, c in sup.terms])

ideal = synthesize_mode(sup, KINOFORM_GRID)
k = make_kinoform(TargetMode.from_field(ideal), period=16, spec=KINOFORM_GRID)
field, efficiency = first_order(k)

print(f"fidelity with the ideal mode: {field_overlap(ideal, field):.5f}")
print(f"first-order efficiency:       {efficiency:.3f}")
kinoform_png(k, out / "alpha1_kinoform.png")
intensity_png(field, out / "alpha1_generated.png")
print(f"images written to {out}/")
