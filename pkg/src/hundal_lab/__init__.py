"""Operator-splitting iterations on a discretized Hundal cone."""
