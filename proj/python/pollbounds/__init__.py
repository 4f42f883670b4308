"""Election poll error budgets under partial knowledge of nonresponse.

The compiled core exposes the domain types (PollDesign, ResponseTally,
NoKnowledge/LevelBound/ShiftBound regimes, Stratum, StratifiedPoll), the
closed-form estimators (identification intervals, midpoint estimates,
worst-case variance/bias/MSE, total margin of error), the brute-force
oracle (grid maximization, minimax offset scan, Monte Carlo), sweeps, and
report emission.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__doc__ = _core_doc if _core_doc else __doc__
__version__ = "1.0.0"
