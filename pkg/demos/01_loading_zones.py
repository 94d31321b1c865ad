"""Where can the centre of mass sit so that the reference tetrahedron rests on one face only?"""
import numpy as np

from monotet.geometry import dihedral_angles
from monotet.scene import reference_scene
from monotet.tipping import classify_batch, obtuse_paths, pattern_codes
from monotet.zones import enumerate_zones

t = reference_scene().tetrahedron

# Three consecutive obtuse edges through all four vertices are what makes loading possible.
for edge, angle in dihedral_angles(t).items():
    print(f"edge {edge}: {angle:8.4f} deg{'  obtuse' if angle > 90 else ''}")
print("obtuse paths:", [p.order for p in obtuse_paths(t)])

# Each chain pattern along the path owns a convex zone of COM positions.
report = enumerate_zones(t)
print(f"\nwhole body: {report.total_volume_cm3:.4f} cm3")
for z in report.zones:
    print(f"  {str(z.pattern):12s} type {z.zone_type:2s} {z.volume_cm3:.4f} cm3")

# Drop random COMs into each zone and let the simulator decide.
rng = np.random.default_rng(0)
for z in report.zones:
    codes = classify_batch(t, z.region.sample_uniform(20_000, rng))
    hits = np.all(codes == pattern_codes(z.pattern), axis=1).mean()
    print(f"  {z.pattern}: simulator agrees on {hits:.2%} of samples")
