"""MLPs with per-neuron trainable SiLU vs. spline-edge KANs, from scratch.

Submodules follow the pipeline: numerics -> bspline -> activations ->
network -> training -> data -> bench -> cli.
"""

__version__ = "0.1.0"
