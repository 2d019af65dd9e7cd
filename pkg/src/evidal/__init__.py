"""Evidential classification with uncertainty-driven active labeling.

The package trains a small feedforward classifier whose head outputs
non-negative class evidence, interprets that evidence as a Dirichlet
opinion (belief masses plus a scalar uncertainty), and uses the
uncertainty to decide which unlabeled samples are worth annotating next.
"""

__version__ = "0.1.0"
