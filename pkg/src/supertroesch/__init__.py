"""Exact GF(p) computations with p-complexes of symmetric powers on graded
superspaces: construction, contraction, splicing into injective resolutions,
and the resulting Ext tables and ring relations."""

__version__ = "0.1.0"
