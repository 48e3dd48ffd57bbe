"""Verification toolkit for f(u^2 + k v^2) = f(u)^2 + k f(v)^2."""
