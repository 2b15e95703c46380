from typing import Annotated

import numpy as np
from pydantic import BeforeValidator


def _as_list(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


FloatList = Annotated[list[float], BeforeValidator(_as_list)]
