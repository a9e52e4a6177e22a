"""Quadratic fields: forms, units, ray class groups, local symbols."""
