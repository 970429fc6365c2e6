"""Local formulas for Ehrhart coefficients from lattice-tiling regions."""
