import numpy as np


def adapt_numpy_integer(value: np.integer) -> int:
    return int(value)


def adapt_numpy_floating(value: np.floating) -> float:
    return float(value)


NUMPY_ADAPTERS = {
    np.int32: adapt_numpy_integer,
    np.int64: adapt_numpy_integer,
    np.float32: adapt_numpy_floating,
    np.float64: adapt_numpy_floating,
}
