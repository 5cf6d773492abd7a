"""Epsilon tag issuance and the per-thread stack of active differentiations.

Every forward or reverse differentiation gets a fresh integer tag from a
global, lock-protected counter, so nested differentiations always carry
strictly increasing tags from the outside in. Numbers built at the same
level share a tag; an operand with a lower tag is a constant for the
higher-tagged one.
"""
import itertools
import threading
from contextlib import contextmanager

_issue = itertools.count(1)
_issue_lock = threading.Lock()
_local = threading.local()


def new_tag():
    with _issue_lock:
        return next(_issue)


def _active():
    try:
        return _local.active
    except AttributeError:
        _local.active = []
        return _local.active


def active_tags():
    """Tags of the differentiations currently in progress on this thread."""
    return tuple(_active())


def depth():
    return len(_active())


@contextmanager
def differentiation():
    """Open a differentiation level; yields its fresh tag."""
    stack = _active()
    tag = new_tag()
    stack.append(tag)
    try:
        yield tag
    finally:
        stack.pop()


def tag_of(x):
    """Tag of an AD scalar; 0 for plain numbers."""
    return getattr(x, "tag", 0)


class Counters:
    """Pass/sweep/evaluation tallies, reset by the caller.

    Shared across threads; meant for single-threaded diagnostics and the
    benchmark harness, not for accounting under concurrency.
    """

    __slots__ = ("forward_passes", "recordings", "sweeps", "f_evals")

    def __init__(self):
        self.reset()

    def reset(self):
        self.forward_passes = 0
        self.recordings = 0
        self.sweeps = 0
        self.f_evals = 0

    def snapshot(self):
        return {k: getattr(self, k) for k in self.__slots__}


counters = Counters()
