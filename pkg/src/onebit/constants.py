"""Shared irrational constants, evaluated once at full double precision."""

import math

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT5 = math.sqrt(5.0)
SQRT10 = math.sqrt(10.0)

#: Golden ratio.
PHI = (1.0 + SQRT5) / 2.0
