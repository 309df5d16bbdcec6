"""qdcm: quasi-discrete closure models.

Closure and interior operators, paths and path compatibility, a spatial
logic with a set-based model checker, CM/CMC/CoPa bisimilarity by partition
refinement, quotient models, LTS export and image/maze ingestion.
"""

from .bisim import (
    BisimCheck,
    BisimKind,
    Partition,
    compute_bisimilarity,
    distinguishing_formula,
    is_bisimulation,
    is_reach_bisimulation,
    quotient,
    refine,
)
from .errors import (
    BudgetExceeded,
    FormulaSyntaxError,
    InvalidPathError,
    ModelFormatError,
    NotSymmetricError,
    PartitionError,
    PathMismatchError,
    QdcmError,
    UnknownPointError,
)
from .figures import bundled
from .ingest import GridSpec, from_image, generate_maze, render
from .logic import evaluate, logic_equivalent, parse, satisfies, to_text
from .lts import encode_lts, write_aut
from .paths import Path, compatible, concat, make_path, prefix, shift, zones
from .space import (
    ClosureModel,
    Direction,
    check_closure_axioms,
    closure,
    interior,
    load_model,
    membership_characterization,
    point_closure,
    point_interior,
    save_model,
)

__version__ = "0.1.0"
