"""arclogic: object-centric logic-program induction for ARC-style grid tasks."""

__version__ = "0.1.0"
