import math
from typing import Any, Dict, List, Optional


def round_value(value: Any, digits: Optional[int]) -> Any:
    """Rounds finite floats to `digits` decimals; anything else passes through."""
    if digits is None or isinstance(value, bool) or not isinstance(value, float):
        return value
    if not math.isfinite(value):
        return value
    return round(value, digits)


def round_record(record: Dict[str, Any], digits: Optional[int]) -> Dict[str, Any]:
    return {key: round_value(value, digits) for key, value in record.items()}


def parse_float_list(text: str) -> List[float]:
    """Parses a comma-separated list such as '-0.1,-0.05,0'."""
    values = [part.strip() for part in text.split(",")]
    if not text.strip() or any(not part for part in values):
        raise ValueError(f"Invalid number list: {text!r}")
    return [float(part) for part in values]
