"""Exception hierarchy shared across the lifecycle stages."""

from __future__ import annotations


class VlfError(Exception):
    """Base class for all library errors."""


# --- parsing / documents ---

class UnknownLanguage(VlfError):
    """File extension maps to no supported language."""


class EncodingError(VlfError):
    """Source bytes are not valid UTF-8."""


class GrammarUnavailable(VlfError):
    """No grammar adapter registered for the requested language."""


class SchemaInvalid(VlfError):
    """Document violates the uAST schema invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        head = "; ".join(v.message for v in self.violations[:3])
        super().__init__(f"{len(self.violations)} schema violation(s): {head}")


class DocumentParseError(VlfError):
    """Serialized document bytes are not well-formed."""


# --- numerics ---

class ShapeMismatch(VlfError):
    """Array argument has the wrong shape."""


class EmptyBatch(VlfError):
    """Loss evaluation requires a non-empty batch."""


class DegenerateDataset(VlfError):
    """Training requires both classes present."""


class LengthMismatch(VlfError):
    """Paired sequences differ in length."""


# --- embedding providers ---

class ProviderUnavailable(VlfError):
    """Remote embedding provider unreachable or returned an error status."""


class DimensionMismatch(VlfError):
    """Provider returned a vector of the wrong length."""


# --- validation ---

class PlannerUnavailable(VlfError):
    """Exploit planner unreachable or misconfigured."""


class NoHypothesis(VlfError):
    """Planner found no sink pattern to hypothesize about."""


class UnsupportedVector(VlfError):
    """Harness generator does not support the hypothesized attack vector."""


class TemplateError(VlfError):
    """Harness template could not be instantiated."""


class DriverUnavailable(VlfError):
    """Sandbox driver not configured or runtime missing."""


class SpawnFailure(VlfError):
    """Sandbox process could not be spawned."""


# --- repair ---

class GeneratorUnavailable(VlfError):
    """Patch generator unreachable."""


class UnpatchableClass(VlfError):
    """No rewrite template for this vulnerability class and no remote generator."""


class OverlappingEdits(VlfError):
    """Patch edits overlap, are unsorted, or exceed source bounds."""


class SyntaxRejected(VlfError):
    """Patched source re-parsed with error-recovery nodes."""


class GateViolation(VlfError):
    """Repair was requested for a sample without an Exploited verdict."""


# --- pipeline ---

class ConfigError(VlfError):
    """Lifecycle configuration is invalid."""


class MissingLabels(VlfError):
    """Ground-truth labels do not cover all samples in the manifest."""
