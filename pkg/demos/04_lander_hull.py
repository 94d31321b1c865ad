"""A non-convex body rolls on its convex hull: a tall box on four splayed legs."""
from monotet.geometry import convex_hull, volume_centroid
from monotet.scene import lander_mesh
from monotet.tipping import tumble_sequence

mesh = lander_mesh()
vol, com = mesh.volume_centroid()
hull = convex_hull(mesh.vertices)
print(f"mesh {len(mesh.vertices)} vertices, {vol / 1000:.1f} cm3; "
      f"hull {hull.n_vertices} vertices, {len(hull.facets)} facets, {volume_centroid(hull).volume / 1000:.1f} cm3")
print("COM", com.round(3))
for fi in range(len(hull.facets)):
    trace = tumble_sequence(hull, com, fi)
    print(f"  facet {fi}: {' -> '.join(map(str, trace.faces))} ({trace.outcome})")
