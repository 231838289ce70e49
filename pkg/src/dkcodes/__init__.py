"""Capacity-approaching encoders and decoders for (d,k) run-length-limited sequences."""

from .analysis import (
    INFINITY,
    CapacityResult,
    Constraint,
    PhraseDistribution,
    RateProfile,
    SlidingConfig,
    binary_entropy,
    capacity,
    char_poly_eval,
    maxentropic_distribution,
    optimize_rate,
    rate_comparison_threshold,
    sliding_distribution,
    sliding_rate,
    solve_lambda,
    word_lengths,
)
from .bitstream import BitBuffer, BitCursor, pack, random_bits, unpack
from .container import EncodedContainer
from .harness import (
    RateReport,
    ValidationReport,
    appendix_identity_check,
    estimate_rate,
    phrase_histogram,
    reproduce_table4,
    validate_constraint,
)
from .interleaved import (
    Codebook,
    DtChain,
    FactorizationPlan,
    InterleavedCode,
    build_codebook,
    derive_biases,
    factorize,
    il_decode,
    il_encode,
)
from .sliding import ConstrainedStream, full_decode, full_encode, ss_decode, ss_encode
from .transformer import QuantizedBias, bias_inverse, bias_transform, biased_source

__version__ = "0.1.0"
