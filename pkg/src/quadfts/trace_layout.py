"""Column layout of the raw trace array shared by both simulation backends.

The compiled kernel hardcodes these offsets; test_backends checks the two
backends agree column-by-column.
"""

from __future__ import annotations

FIELDS = (
    ("t", 1),
    ("P", 3),
    ("V", 3),
    ("Q", 4),
    ("Omega", 3),
    ("P_d", 3),
    ("V_d", 3),
    ("A_d", 3),
    ("J_d", 3),
    ("S_d", 3),
    ("F_d", 3),
    ("T", 1),
    ("Gamma", 3),
    ("s", 3),
    ("F", 3),
    ("Q_d", 4),
    ("Omega_d", 3),
    ("theta", 3),
    ("psi", 3),
    ("Q_err", 4),
    ("Omega_err", 3),
    ("s_dot", 3),
    ("s_ddot", 3),
    ("F_dot", 3),
    ("F_ddot", 3),
    ("Omega_d_dot", 3),
    ("psi_dot", 3),
    ("exponents", 3),
    ("T_dot", 1),
    ("lyap", 1),
)

OFFSET: dict[str, int] = {}
WIDTH: dict[str, int] = {}
_off = 0
for _name, _w in FIELDS:
    OFFSET[_name] = _off
    WIDTH[_name] = _w
    _off += _w
NCOLS = _off


def col(name: str) -> slice:
    o = OFFSET[name]
    return slice(o, o + WIDTH[name])
