"""Welfare-maximising allocation: every item to the agent who values it most (least, for chores)."""
import logging

import numpy as np

from allocation_instance import Allocation, Instance, Mode, Provenance

logger = logging.getLogger(__name__)


def allocate_argmax(instance: Instance) -> Allocation:
    """
    Give each good to an agent with the column maximum, each chore to one with the column minimum.

    Ties go to the lowest agent index. The result has maximum social welfare
    (minimum total disutility for chores) by construction.
    """
    if instance.mode is Mode.GOODS:
        owners = np.argmax(instance.values, axis=0)
    else:
        owners = np.argmin(instance.values, axis=0)
    return Allocation.from_owners(owners, instance.n, Provenance.ARGMAX)
