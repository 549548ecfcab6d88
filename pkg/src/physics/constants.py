"""CODATA 2018 constants and the unit conversions built on them."""

ELEMENTARY_CHARGE = 1.602176634e-19      # C (exact)
PLANCK = 6.62607015e-34                  # J s (exact)
SPEED_OF_LIGHT = 299792458.0             # m/s (exact)
DEBYE = 3.33564095198152e-30             # C m (1e-21 / c)
ELECTRON_VOLT = 1.602176634e-19  # J (exact)

# 1 kV/cm in V/m
KV_PER_CM = 1.0e5
# 1 MHz in Hz
MHZ = 1.0e6

# alpha / h for alpha in D^2/eV, expressed in MHz/(kV/cm)^2
DEBYE2_PER_EV_TO_KAPPA = DEBYE**2 / ELECTRON_VOLT / PLANCK * KV_PER_CM**2 / MHZ
