"""Feasibility arithmetic for a rubidium-87 realization.

Maps a concrete laser-dressed Rb-87 setup onto the dimensionless model and
prints the numbers an experimentalist would check first: how wide the packet
is in recoil lengths, how slowly it disperses over one precession time, and
which dynamical regime the resulting delta_x lands in.
"""

import math

from spinmeter import rubidium87, to_dimensionless, to_physical

HBAR = 1.054571817e-34


def report_for(trap_over_recoil, larmor_half_over_recoil, theta=math.pi / 3):
    phys = rubidium87(trap_over_recoil, larmor_half_over_recoil)
    params, rep = to_dimensionless(phys, theta=theta)
    k_r = 2.0 * math.pi / phys.laser_wavelength

    print(f"trap = {trap_over_recoil} E_r/hbar, "
          f"coupling omega = {larmor_half_over_recoil} E_r/hbar, theta = pi/3")
    print(f"  recoil energy          {rep.recoil_energy / HBAR:12.1f} rad/s x hbar")
    print(f"  packet width           {rep.delta_x_physical * 1e6:12.4f} um"
          f"  ({rep.delta_x_physical * k_r:.3f} recoil lengths)")
    print(f"  spin-orbit length x_so {rep.x_so * 1e6:12.4f} um")
    print(f"  dimensionless delta_x  {rep.delta_x_dimensionless:12.4f}")
    print(f"  spreading per t_so     {rep.spreading_ratio:12.4f}"
          f"  (fractional width growth over one precession)")
    print(f"  dimensionless mass     {params.mass:12.1f}")
    print(f"  regime hint            {rep.regime_hint:>12}")
    print()
    return phys, params


def run():
    print("Rb-87 dressed at 804.1 nm, spin-orbit velocity = recoil velocity\n")
    phys, params = report_for(0.01, 0.1)
    report_for(0.0001, 0.1)

    back = to_physical(params.delta_x, params.mass, phys.laser_wavelength,
                       phys.atom_mass, phys.v_so)
    drift = max(
        abs(back.trap_frequency / phys.trap_frequency - 1.0),
        abs(back.larmor_half / phys.larmor_half - 1.0),
    )
    print(f"round trip to_physical(to_dimensionless(...)): max rel drift {drift:.2e}")


if __name__ == "__main__":
    run()
