"""Execution-grounded vulnerability lifecycle toolkit.

Three stages behind one invariant: detection flags are only acted on after
sandboxed execution confirms exploitability, and repair runs only on
confirmed samples.
"""

__version__ = "0.1.0"
