"""End-to-end verifiers and their reports."""
