"""Physical constants and unit conversions.

Natural units throughout: c = hbar = m_e = 1.  Lengths are in units of the
electron (loop-particle) reduced Compton wavelength, energies in units of the
electron rest energy.
"""

ALPHA = 1.0 / 137.035999
ELECTRON_MASS_EV = 510998.95
MUON_MASS = 206.768283  # in electron masses
PROTON_MASS = 1836.15267343  # in electron masses
HBARC_MEV_FM = 197.3269804

# reduced Compton wavelength of the electron, hbar/(m_e c)
COMPTON_FM = HBARC_MEV_FM / (ELECTRON_MASS_EV * 1e-6)

LEPTON_MASSES = {"electron": 1.0, "muon": MUON_MASS}


def fm_to_natural(length_fm):
    return length_fm / COMPTON_FM


def natural_to_fm(length):
    return length * COMPTON_FM


def natural_to_ev(energy):
    return energy * ELECTRON_MASS_EV


def format_energy(energy):
    """Return ``(value, unit)`` for a natural-unit energy, unit picked by magnitude."""
    ev = natural_to_ev(energy)
    mag = abs(ev)
    if mag == 0.0 or mag >= 1.0:
        return ev, "eV"
    if mag >= 1e-3:
        return ev * 1e3, "meV"
    return ev * 1e6, "µeV"
