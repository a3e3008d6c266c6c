"""Provost: self-hosted institutional quality-assurance automation engine.

Unifies academic records into a single durable store and automates the
workflows built on top of it: outcome achievement statistics (CLO/PLO),
reviewed machine-assisted grading with provenance, dual-scale grade
conversion, accreditation compliance checks, and trigger-driven insight
reports, all gated by configurable autonomy levels.
"""

__version__ = "0.1.0"
