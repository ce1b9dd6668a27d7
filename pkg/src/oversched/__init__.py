"""Permutation-based search for oversubscribed satellite-access scheduling."""

from .model import (
    Altitude,
    GeneratorParams,
    Permutation,
    ProblemInstance,
    Resource,
    TaskRequest,
    TimeWindow,
    generate_instance,
    load_instance,
    parse_instance,
    random_permutation,
    serialize_instance,
)
from .builder import (
    Objective,
    Schedule,
    build_schedule,
    build_schedule_split,
    gooley_schedule,
    greedy_activity_selector,
    insert_high_flexibility_order,
)
from .objectives import count_conflicts, sum_overlaps

__version__ = "0.1.0"
