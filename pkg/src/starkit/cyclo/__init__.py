"""Cyclotomic fields, Dirichlet characters, L-values and Stickelberger elements."""
