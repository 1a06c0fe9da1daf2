"""Parameter grids and their evaluation over independent work items."""
import itertools
import logging
from typing import Any, Callable, Dict, List, Sequence

from joblib import Parallel, delayed
from tqdm import tqdm

log = logging.getLogger(__name__)


def parameter_grid(parameters: Dict[str, Sequence[Any]]) -> List[Dict[str, Any]]:
    """Expands ``{name: values}`` into every combination, last key varying fastest.

    Args:
        parameters: A dictionary of parameters and possible values.

    Returns:
        A list of ``{name: value}`` options in deterministic order.
    """
    return [dict(zip(parameters.keys(), v)) for v in itertools.product(*parameters.values())]


def run_grid(fn: Callable[..., Any], options: List[Dict[str, Any]], n_jobs: int = 1, desc: str = None) -> List[Any]:
    """Evaluates ``fn(**option)`` for every option.

    Work items are independent; with ``n_jobs != 1`` they run in joblib
    workers. Results come back in the order of ``options`` either way.
    """
    log.debug(f"Running {len(options)} work items with n_jobs={n_jobs}")
    items = tqdm(options, desc=desc, disable=None)
    if n_jobs == 1:
        return [fn(**option) for option in items]
    return Parallel(n_jobs=n_jobs)(delayed(fn)(**option) for option in items)
