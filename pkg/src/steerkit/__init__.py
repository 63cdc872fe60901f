"""steerkit: SDP bounds on trace-distance steerability, steering ellipsoids,
and the LHS-surface volume witness for two-qubit states."""

__version__ = "0.1.0"
