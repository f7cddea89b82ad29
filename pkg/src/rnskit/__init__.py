"""Residue number system toolkit.

Bit-efficient moduli-set generation around an even pivot, forward/reverse
conversion with carry-free channel arithmetic, and a microprogrammed
simulator of a reconfigurable residue datapath, plus a CLI that
regenerates the reference comparison tables.
"""

from .numbers import (
    NotCoprimeError,
    bit_length,
    ceil_nth_root,
    coprime_to_all,
    gcd,
    mod_inverse,
)
from .moduli import (
    CardinalityError,
    ExtraChoice,
    GenerationRequest,
    GenerationTrace,
    ModuliSet,
    RangeTooSmallError,
    SchemeId,
    ValidationReport,
    baseline,
    bit_cost,
    find_moduli,
    validate,
)
from .rns import (
    RnsContext,
    RnsError,
    RnsNumber,
    from_rns,
    rns_add,
    rns_mul,
    rns_pow,
    rns_sub,
    to_rns,
)
from .datapath import (
    DatapathState,
    Microprogram,
    ProgramParseError,
    RunFault,
    Source,
    Step,
    UnboundPlaceholderError,
    builtin_function1,
    builtin_function2,
    parse_program,
    render_program,
    run,
    step,
)
from .tables import (
    ComparisonRow,
    comparison_row,
    comparison_rows,
    rows_from_csv,
    rows_to_csv,
    rows_to_markdown,
)

__version__ = "0.1.0"
