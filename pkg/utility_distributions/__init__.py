from .distributions import (
    DistributionSpec,
    Family,
    PdfBounds,
    cdf,
    has_atom_at_one,
    mean,
    pdf_bounds,
    sample,
    sample_many,
)
from .mixtures import FamilyMixture, MixtureName, draw_item_spec
from .rng import SeededRng, derive_seed, make_rng
