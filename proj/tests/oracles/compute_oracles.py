"""Independent arbitrary-precision evaluation of the closed-form reference values
frozen into the C++ unit and acceptance tests. Run with: python3 compute_oracles.py"""
from mpmath import mp, mpf, pi, sqrt, log, exp, ln

mp.dps = 40

h = mpf("6.62607015e-34")
c = mpf("299792458")
k = mpf("1.380649e-23")
NA = mpf("6.02214076e23")


def nu(lam_nm):
    return c / (mpf(lam_nm) * mpf("1e-9"))


print("nu(1064 nm) [Hz]          =", mp.nstr(nu(1064), 17))
print("E(1060 nm) [J]            =", mp.nstr(h * nu(1060), 17))
prefactor = sqrt(2) * (log(2) / pi) ** mpf(1.5)
print("gaussian-beam prefactor   =", mp.nstr(prefactor, 17))
S = pi * mpf("27.5e-4") * mpf("28.5e-4")
print("beam area 55x57 um [cm^2] =", mp.nstr(S, 17))
phi10 = (mpf("0.01") / (h * nu(1060))) / S
print("flux 10 mW 1060 nm        =", mp.nstr(phi10, 17))
print("sigma_max(1.54e4) [cm^2]  =", mp.nstr(mpf("1.54e4") * mpf("3.82e-21"), 17))
print("ln10*1e3/NA               =", mp.nstr(ln(10) * 1000 / NA, 17))
dnu = nu(672) - nu(1060)
print("nu_max - nu (672/1060)    =", mp.nstr(dnu, 17))
print("boltzmann 1060nm 300K     =", mp.nstr(exp(-h * dnu / (k * 300)), 17))

# Rh6G C2PEF at 1 mW, 1060 nm (cm units: N_mol in cm^-3).
gamma, kappa, eta = mpf("0.075"), mpf("0.042"), mpf("0.9")
nmol = NA * mpf("1.1e-3") * mpf("1e-3")
sigma = mpf("9.9e-50")
nph = mpf("1e-3") / (h * nu(1060))
f2 = prefactor * gamma * kappa * eta * nmol * 1 * sigma / S * nph ** 2
print("Rh6G F2 at 1 mW [cps]     =", mp.nstr(f2, 17))

# check_boltzmann_slope expected slope at 290 K (per cm^-1), c in cm/s.
print("log10(e) hc/kT @290 [cm]  =", mp.nstr(h * c * 100 / (k * 290) / ln(10), 17))
