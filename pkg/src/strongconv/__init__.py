"""strongconv: a numerical laboratory for random-matrix strong convergence.

Core pieces: a free *-polynomial algebra (:mod:`strongconv.ncpoly`), seeded
GUE/Haar samplers (:mod:`strongconv.ensembles`), dense and matrix-free
spectral solvers (:mod:`strongconv.spectral`), exact limit-moment oracles
(:mod:`strongconv.freeprob`), truncated tracial laws and microstates
(:mod:`strongconv.laws`), unitary-orbit distances (:mod:`strongconv.orbit`),
tensor-product operators on Hilbert-Schmidt space
(:mod:`strongconv.tensorops`), concentration diagnostics
(:mod:`strongconv.concentration`), and experiment scenarios with persisted
records (:mod:`strongconv.scenarios`, :mod:`strongconv.records`).
"""

from .ensembles import MatTuple, SeedSpec, sample_gue, sample_haar_unitary, sample_tuple
from .freeprob import (
    GeneratorSpec,
    LimitNorm,
    haar_unitary_moment,
    limit_norm,
    poly_moment,
    semicircular_moment,
    tensor_moment,
)
from .laws import Law, NeighborhoodSpec, empirical_law, is_microstate, law_distance, oracle_law
from .ncpoly import Letter, NcPoly, parse, parse_monomial
from .orbit import (
    EntropyProbe,
    OrbitResult,
    covering_number,
    dorb_exact_herm1,
    dorb_lower,
    dorb_upper,
)
from .records import MetricTable, RunRecord, emit, load_mat_tuple, save_mat_tuple
from .scenarios import ScenarioSpec, run_scenario
from .spectral import HermOpHandle, SpectrumSet, hausdorff, herm_eig, lanczos_extremes, op_norm, spectrum_set
from .tensorops import (
    TensorOp,
    eval_tensor_poly,
    haagerup_witness,
    nonamen_laplacian,
    norm_inf_one_lower,
    schatten_norm,
    sharp_apply,
    tensor_norm,
)

__version__ = "0.1.0"
