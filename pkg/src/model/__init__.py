# Data model package

from .rationals import format_rational, format_ratio, parse_rational, parse_rational_list
from .dataset import (
    Beliefs,
    Dataset,
    DatasetLoader,
    Observation,
    corner_state,
    dataset_to_json,
    dump_dataset,
    load_dataset,
    make_beliefs,
    make_dataset,
    make_observation,
    validation_report,
    wealth,
)
