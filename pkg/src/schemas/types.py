from collections.abc import Callable
from enum import Enum

import numpy as np
import numpy.typing as npt


class PotentialKind(str, Enum):
    """Singular weights on (0, 1); values are the CLI names."""

    LERAY_QUARTER = "leray4"
    LERAY_NORMALIZED = "leray"
    SHIFTED_LERAY = "leray-shift"
    WANG_YE = "v1"
    TINTAREV = "v2"
    PSARADAKIS_SPECTOR = "v3"
    REMAINDER_2 = "rem2"
    REMAINDER_Q = "remq"
    ITERATED_LOG_SERIES = "iterlog"
    CONSTANT = "const"
    CUSTOM = "custom"


class GaugeTag(str, Enum):
    """Coordinate substitutions r <-> t with a gauge factor."""

    GAUGE_A = "gaugeA"
    GAUGE_B = "gaugeB"
    GAUGE_C = "gaugeC"
    IDENTITY = "id"


class Frame(str, Enum):
    """Coordinate in which a radial profile is carried."""

    U_FRAME = "u"
    W_FRAME = "w"


class Smoothness(str, Enum):
    """Shape classes of random profiles."""

    PIECEWISE_LINEAR = "piecewise-linear"
    SMOOTH_BUMP_SUM = "smooth-bump-sum"


class FamilyName(str, Enum):
    """Explicit trial and extremal families."""

    ZETA_T1 = "zeta-t1"
    MOSER = "moser"
    WKAPPA = "wkappa"
    PLATEAU = "plateau"
    CONCENTRATING = "conc"
    H0 = "h0"
    RANDOM = "random"


class RatioVariant(str, Enum):
    """Improved Hardy-type inequalities checked as LHS/RHS ratios.

    - ``REMAINDER_L2``: Leray deficit over the squared-log-log remainder weight.
    - ``REMAINDER_LQ``: Leray deficit over the L^q norm with the q-remainder weight.
    - ``REMAINDER_LQ_BALL``: same on the ball of radius 1/e.
    - ``ITERATED_LOG``: Dirichlet energy minus the shifted Leray term over the
      iterated-logarithm series weight.
    - ``LOG_GRADIENT``: log-weighted Dirichlet energy over its Hardy weight.
    """

    REMAINDER_L2 = "remainder-l2"
    REMAINDER_LQ = "remainder-lq"
    REMAINDER_LQ_BALL = "remainder-lq-ball"
    ITERATED_LOG = "iterated-log"
    LOG_GRADIENT = "log-gradient"


class RatioFlag(str, Enum):
    """Status of a ratio evaluation."""

    OK = "ok"
    NEAR_ZERO_DENOMINATOR = "near-zero-denominator"
    ZERO_DENOMINATOR = "zero-denominator"


class Verdict(str, Enum):
    """Growth classification of a functional along a family."""

    BOUNDED = "bounded"
    GROWING = "growing"


class PlateauRamp(str, Enum):
    """Rise of the off-center plateau family from 0 to its plateau."""

    LINEAR = "linear"
    FOUR_PIECE = "four-piece"


class SweepFamily(str, Enum):
    """Families usable by the critical exponent search."""

    MOSER = "moser"
    CONCENTRATING = "conc"


class MoserConvention(str, Enum):
    """How |u|^p is formed from w in the GaugeC frame.

    ``EXACT`` evaluates the integral of exp(alpha |u|^p) itself; ``GAUGE_POWER``
    raises the gauge factor to the full power p as in the Phi_0 functional.
    """

    EXACT = "exact"
    GAUGE_POWER = "gauge-power"


class HatChoice(str, Enum):
    """Which admissible node is taken as the freezing radius of the envelopes."""

    LEFTMOST = "leftmost"
    RIGHTMOST = "rightmost"


class Chart(str, Enum):
    """Variable y in which the densities of a measure pair are given.

    ``IDENTITY``: y = s. ``LOG``: s = exp(-y). ``LOGLOG``: s = exp(-exp(y)).
    """

    IDENTITY = "identity"
    LOG = "log"
    LOGLOG = "loglog"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class Command(str, Enum):
    """CLI subcommands."""

    POTENTIAL = "potential"
    FAMILY = "family"
    ENERGY = "energy"
    RATIO = "ratio"
    MAZYA_B = "mazya-b"
    LERAY_CONSTANT = "leray-constant"
    REMAINDER_CONSTANT = "remainder-constant"
    MOSER_SWEEP = "moser-sweep"
    CRITICAL_ALPHA = "critical-alpha"
    QUARTER_SWEEP = "quarter-sweep"
    NONRADIAL_DEMO = "nonradial-demo"
    REARRANGE = "rearrange"
    MODES = "modes"
    SELFTEST = "selftest"


type FloatArray = npt.NDArray[np.float64]
type ArrayLike = float | FloatArray
type RealFunction = Callable[[FloatArray], FloatArray]
