"""Transverse waves in pre-strained incompressible hyperelastic solids.

Modules
-------
kinematics       pre-strain, polarisation triad, invariants of the shear motion
materials        strain-energy models, shear stresses, acoustic stiffness
mr_exact         exact Mooney-Rivlin theory: speeds, decoupling, d'Alembert solutions
hyperbolic_core  finite-volume solver for the full equations of motion
asymptotics      amplitude equations (Temple pair, Burgers, near-principal system)
compare          asymptotic-versus-full comparison harness
config, cli      JSON configuration and the ``shearwave`` command
"""
__version__ = "0.1.0"
