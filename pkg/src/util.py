"""This file contains utility functions for the project."""
import math

SI_PREFIXES = [(1.0, "s"), (1e-3, "ms"), (1e-6, "us"), (1e-9, "ns"), (1e-12, "ps"), (1e-15, "fs")]


def convert_seconds(num: float) -> str:
    """
    This function will convert seconds to ms, us, ns, ps or fs
    """
    if math.isinf(num):
        return "inf s"

    for scale, unit in SI_PREFIXES:
        if abs(num) >= scale:
            return f"{num / scale:3.3g} {unit}".strip()

    return f"{num:.3e} s"


def format_sci(num: float) -> str:
    """Scientific notation with 6 significant digits, as used in CSV output."""
    if math.isinf(num):
        return "inf" if num > 0 else "-inf"
    return f"{num:.5e}"


def encode_float(num: float):
    """JSON-safe float: infinities become strings, finite values keep their exact repr."""
    if math.isinf(num):
        return "inf" if num > 0 else "-inf"
    if math.isnan(num):
        return "nan"
    return float(num)


def decode_float(value) -> float:
    """Inverse of encode_float."""
    return float(value)
