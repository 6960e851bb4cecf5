"""Truncation parameters shared by every module.

All verification claims are "modulo hbar^n_hbar, on a stated window of
z-exponents".  A Context pins both truncations plus the Fock-space weight
cap; it is immutable so values built under one context can be shared
freely between threads.
"""

from dataclasses import dataclass, replace

DEFAULT_N_HBAR = 6
DEFAULT_M_Z = 12
DEFAULT_WEIGHT_CAP = 6


@dataclass(frozen=True)
class Context:
    n_hbar: int = DEFAULT_N_HBAR
    m_z: int = DEFAULT_M_Z
    weight_cap: int = DEFAULT_WEIGHT_CAP

    def __post_init__(self):
        if self.n_hbar < 2:
            raise ValueError("n_hbar must be >= 2")
        if self.m_z < 4:
            raise ValueError("m_z must be >= 4")
        if self.weight_cap < 1:
            raise ValueError("weight_cap must be >= 1")

    @property
    def z_top(self) -> int:
        # Internal working ceiling for z-exponents.  Series are built with
        # this much headroom so that derivative/shift operators (degree
        # < n_hbar each) still leave the reporting window [-m_z, m_z] intact.
        return self.m_z + 2 * self.n_hbar

    def with_order(self, n_hbar: int) -> "Context":
        return replace(self, n_hbar=n_hbar)


DEFAULT_CONTEXT = Context()


class WindowOverflowError(Exception):
    """A check could not cover its required exponent window.

    Carries the window that would have been needed so the CLI can suggest
    a larger m_z.
    """

    def __init__(self, message, required_m_z=None):
        super().__init__(message)
        self.required_m_z = required_m_z
