"""A carbon tube frame with a tungsten carbide core: how heavy must the core be, how small can the model get?"""
from monotet import design as dz
from monotet.patterns import parse_pattern
from monotet.scene import reference_scene
from monotet.zones import enumerate_zones

t = reference_scene().tetrahedron
report = enumerate_zones(t)
frame = dz.CARBON_TUBE_FRAME
mass, _ = dz.frame_model(t, frame)
print(f"frame: {mass:.3f} g, i.e. {mass / report.total_volume_cm3:.5f} g/cm3 smeared over the body")

zone = report.zone(parse_pattern("B->A->D<-C"))
fit = dz.fit_core(t, frame, dz.TUNGSTEN_CARBIDE.density, zone)
print(f"core plane normal {fit.core.interface.normal.round(4)}, COM {fit.margin:.3f} mm inside the zone")
print("simulated pattern:", dz.verify_design(t, frame, fit.core))
print(f"still works down to {dz.min_scale(t, frame, fit.core, zone):.3f} of this size")

# The smaller zones need far denser cores, one of them more than the built interface can ever give.
for z in report.zones:
    rho = dz.min_core_density(t, frame, z)
    fixed = dz.fixed_interface_density(t, frame, fit.core, z)
    print(f"  {str(z.pattern):12s} type {z.zone_type:2s} needs {rho:8.2f} g/cm3 "
          f"(with the plane above: {fixed:.4g})")
