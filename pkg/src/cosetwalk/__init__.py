"""Random walks, coset growth and Stallings folding for finitely generated groups."""
from .cosets import CosetSpace, SubgroupOracle, coset_key, membership, schreier_ball
from .errors import CosetWalkError
from .groups import FreeAbelian, FreeGroup, MatrixGroupZ, ball_enumerate
from .growth import GrowthSeries, growth_fit, slc_verdict
from .norms import herz_lower, rd_witness_test, spectral_profile
from .stallings import classify_pair_free, fold, rank_index
from .verifiers import verify_named_example
from .walks import Measure, convolve_step, entropy_profile, walk

__all__ = [
    "CosetSpace", "SubgroupOracle", "coset_key", "membership", "schreier_ball",
    "CosetWalkError", "FreeAbelian", "FreeGroup", "MatrixGroupZ", "ball_enumerate",
    "GrowthSeries", "growth_fit", "slc_verdict", "herz_lower", "rd_witness_test",
    "spectral_profile", "classify_pair_free", "fold", "rank_index",
    "verify_named_example", "Measure", "convolve_step", "entropy_profile", "walk",
]
