"""Reified constraints over bounded integers, compiled to MILPs and solved exactly."""

from .csp import (
    BinaryRelation,
    Codebook,
    CspConstraint,
    CspInstance,
    Domain,
    check_homomorphism,
    decode,
    encode_csp,
    neq_relation,
    worked_instance,
)
from .errors import ParseError, ReifMilpError, ValidationError
from .lp import LpOutcome, LpProblem, LpStatus, relax, solve_lp
from .mip import MipResult, MipStatus, enumerate_solutions, solve_mip
from .model import (
    LinearConstraint,
    Model,
    Objective,
    ObjectiveSense,
    Sense,
    Variable,
    VarKind,
    eval_constraint,
    eval_objective,
)
from .oracle import OracleReport, brute_force, property_oracle_sequence
from .reify import (
    Cardinality,
    CongruenceSpec,
    ReifiedTerm,
    cardinality,
    complement_pair,
    compute_big_m,
    maximize_weighted,
    reify_congruence,
    require,
)
from .sequence import (
    KernelApplication,
    Mode,
    SequenceSpec,
    apply_kernels,
    build_sequence,
    kernel_congruence,
    kernel_even,
    kernel_odd,
)

__version__ = "0.1.0"
