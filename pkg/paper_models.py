"""
The five published burden-index models and the published PCA/forecast tables.

The tables are reference data only. They are shown by `paper-models
--published` and used in consistency checks, never as fitting input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Tuple

from errors import UnknownIndex
from expr_parser import parse
from expr_tree import Expr

INDEX_IDS: Tuple[str, ...] = ("CPC1", "CPC2", "NPC", "IPC1", "IPC2")

# Printed equations; spaced exponents ("1.63e - 6") normalized to 1.63e-6.
MODEL_TEXT: Dict[str, str] = {
    "CPC1": "6.31 + 14.73/t + 14.59/t^2 + 6.63*cos(t)/t^3 - 1.63e-6*t^4",
    "CPC2": "1.62 + 0.08*t + 5.79e-5*t^3 + 0.04*cos(-12.96*t) - 0.004*t^2",
    "NPC": "9.32 + 0.16*t + 0.02*t^2 - 0.0005*t^3",
    "IPC1": "1.479 + 0.10*t - 0.12*log(t) - 6.72e-5*t^3 - 0.0002*t^2*sin(0.39*t)",
    "IPC2": "0.78 + 0.006*t^2 + 1.08e-7*t^5 - 0.10*t - 6.59e-6*t^4",
}

INDEX_MEANING: Dict[str, str] = {
    "CPC1": "passed-on disease",
    "CPC2": "vector-borne disease",
    "NPC": "non-communicable disease",
    "IPC1": "accident",
    "IPC2": "intentional injury",
}

# Published fit statistics: (r2, r, mse, mae, complexity).
PUBLISHED_FIT: Dict[str, Tuple[float, float, float, float, int]] = {
    "CPC1": (0.9998, 0.9999, 0.0002, 0.011, 37),
    "CPC2": (0.9973, 0.9990, 3.0003e-5, 0.002, 28),
    "NPC": (0.9997, 0.9998, 0.0031, 0.041, 19),
    "IPC1": (0.9994, 0.9997, 6.23e-5, 0.006, 34),
    "IPC2": (0.9999, 0.9999, 4.31e-7, 0.000, 33),
}


@dataclass(frozen=True)
class PublishedComponents:
    group_id: str
    causes: Tuple[str, ...]
    loadings: Tuple[Tuple[float, ...], ...]  # one row per cause, one column per component
    eigenvalues: Tuple[float, ...]
    percent_explained: Tuple[float, ...]
    cumulative_percent: Tuple[float, ...]
    p: int

    def column(self, k: int) -> Tuple[float, ...]:
        return tuple(row[k - 1] for row in self.loadings)


PUBLISHED_COMPONENTS: Dict[str, PublishedComponents] = {
    "communicable": PublishedComponents(
        group_id="communicable",
        causes=("HIV", "Diarrhea", "Malaria", "Maternal", "Neonatal", "Nutritional",
                "Other Communicable"),
        loadings=(
            (-0.329, 0.582),
            (0.451, -0.122),
            (0.199, 0.689),
            (-0.222, 0.248),
            (0.424, 0.320),
            (0.451, -0.022),
            (0.465, 0.082),
        ),
        eigenvalues=(4.439, 1.266),
        percent_explained=(63.4, 18.1),
        cumulative_percent=(63.4, 81.5),
        p=7,
    ),
    "noncommunicable": PublishedComponents(
        group_id="noncommunicable",
        causes=("Cancers", "Cardiovascular", "Respiratory", "Liver", "Digestive", "Neurology",
                "Mental", "Diabetes", "Musculus", "Other"),
        loadings=((0.320,), (0.322,), (0.322,), (0.320,), (0.283,), (0.322,), (0.320,),
                  (0.322,), (0.318,), (0.312,)),
        eigenvalues=(9.625,),
        percent_explained=(96.2,),
        cumulative_percent=(96.2,),
        p=10,
    ),
    "injury": PublishedComponents(
        group_id="injury",
        causes=("Transport", "Natural", "Conflict", "Self-harm", "Interpersonal", "Unintentional"),
        loadings=(
            (0.532, 0.168),
            (-0.154, 0.620),
            (-0.070, 0.553),
            (-0.356, 0.447),
            (0.542, 0.132),
            (0.517, 0.256),
        ),
        eigenvalues=(3.245, 1.421),
        percent_explained=(54.1, 23.7),
        cumulative_percent=(54.1, 77.8),
        p=6,
    ),
}

# Published forecast table: year -> (kind, {index: value}); only the printed rows.
PUBLISHED_FORECAST: Dict[int, Tuple[str, Mapping[str, float]]] = {
    1990: ("actual", {"CPC1": 10.03779, "CPC2": 1.736238, "NPC": 9.453226, "IPC1": 1.580009, "IPC2": 0.655857}),
    1991: ("actual", {"CPC1": 9.642837, "CPC2": 1.787833, "NPC": 9.698832, "IPC1": 1.595836, "IPC2": 0.868743}),
    2015: ("actual", {"CPC1": 6.083726, "CPC2": 1.818974, "NPC": 19.03911, "IPC1": 2.539031, "IPC2": 0.330246}),
    2016: ("actual", {"CPC1": 5.946195, "CPC2": 1.822348, "NPC": 19.34553, "IPC1": 2.525819, "IPC2": 0.421247}),
    2017: ("forecast", {"CPC1": 5.81208, "CPC2": 1.8095, "NPC": 19.3422, "IPC1": 2.52816, "IPC2": 0.435552}),
    2018: ("forecast", {"CPC1": 5.64442, "CPC2": 1.80177, "NPC": 19.5646, "IPC1": 2.48745, "IPC2": 0.428418}),
    2019: ("forecast", {"CPC1": 5.46157, "CPC2": 1.79572, "NPC": 19.7494, "IPC1": 2.41559, "IPC2": 0.419002}),
    2020: ("forecast", {"CPC1": 5.26203, "CPC2": 1.78936, "NPC": 19.8938, "IPC1": 2.30953, "IPC2": 0.408052}),
}


def normalize_index_id(index_id: str) -> str:
    key = str(index_id).strip().upper()
    if key not in MODEL_TEXT:
        raise UnknownIndex(index_id)
    return key


def paper_model(index_id: str) -> Expr:
    """
    Built-in model for one burden index.

    Args:
        index_id: CPC1, CPC2, NPC, IPC1 or IPC2 (case-insensitive)

    Returns:
        Expr: the printed equation as an expression tree
    """
    return parse(MODEL_TEXT[normalize_index_id(index_id)])

