"""Parsing of quantities with unit suffixes at the CLI/file boundary.

Everything past this module is SI.
"""

import re
from decimal import Decimal

from casimir.constants import CODATA2018
from casimir.errors import InputError

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")

# unit -> power of ten, so conversions round once, in decimal
LENGTH = {
    "": 0, "m": 0, "cm": -2, "mm": -3, "um": -6, "µm": -6, "μm": -6,
    "nm": -9, "pm": -12, "A": -10,
}
FORCE = {"": 0, "N": 0, "mN": -3, "uN": -6, "µN": -6, "μN": -6, "nN": -9, "pN": -12, "fN": -15}
TEMPERATURE = {"": 0, "K": 0}
RESISTIVITY = {
    "": 0, "Ohm*m": 0, "Ohm m": 0, "Ohmm": 0,
    "uOhm*cm": -8, "uOhmcm": -8, "uOhm cm": -8, "uOhm.cm": -8, "µOhm*cm": -8,
    "µΩ·cm": -8, "μΩ·cm": -8,
}


def _split(text):
    m = _NUMBER.match(str(text))
    if m is None:
        raise InputError(f"cannot parse quantity {text!r}")
    return m.group(1), m.group(2)


def split(text):
    """Split ``"100nm"`` into ``(100.0, "nm")``."""
    num, unit = _split(text)
    return float(num), unit


def _parse(text, table, kind):
    num, unit = _split(text)
    try:
        exp = table[unit]
    except KeyError:
        raise InputError(f"unknown {kind} unit {unit!r} in {text!r}") from None
    return float(Decimal(num).scaleb(exp))


def parse_length(text):
    return _parse(text, LENGTH, "length")


def parse_force(text):
    return _parse(text, FORCE, "force")


def parse_temperature(text):
    return _parse(text, TEMPERATURE, "temperature")


def parse_resistivity(text):
    return _parse(text, RESISTIVITY, "resistivity")


def parse_frequency(text):
    """Angular frequency in rad/s; accepts ``eV`` and ``meV`` as photon energies."""
    value, unit = split(text)
    if unit in ("", "rad/s", "1/s", "s^-1"):
        return value
    if unit == "eV":
        return value * CODATA2018.e_charge / CODATA2018.hbar
    if unit == "meV":
        return value * 1e-3 * CODATA2018.e_charge / CODATA2018.hbar
    raise InputError(f"unknown frequency unit {unit!r} in {text!r}")


def length_scale(unit):
    try:
        return 10.0 ** LENGTH[unit.strip()]
    except KeyError:
        raise InputError(f"unknown length unit {unit!r}") from None


def force_scale(unit):
    try:
        return 10.0 ** FORCE[unit.strip()]
    except KeyError:
        raise InputError(f"unknown force unit {unit!r}") from None


def scaled(number, exponent):
    """``float(number * 10**exponent)`` rounded once; ``number`` may be a string."""
    return float(Decimal(str(number).strip()).scaleb(exponent))


def length_exponent(unit):
    try:
        return LENGTH[unit.strip()]
    except KeyError:
        raise InputError(f"unknown length unit {unit!r}") from None


def force_exponent(unit):
    try:
        return FORCE[unit.strip()]
    except KeyError:
        raise InputError(f"unknown force unit {unit!r}") from None
