"""Monte-Carlo run of superposition coding with rate splitting and binning on tiny channels."""

from .codebooks import (GEN_AXES, MEMORY_CAP, GenLaw, LayeredCodebooks, SimConfig, build_codebooks,
                        gen_law, sample_cond, typical)
from .coding import (CSV_FIELDS, SimResult, decode_y, decode_z, dirty_xor_scheme, encode, lemma_margins,
                     results_csv, simulate, transmit)

__all__ = [
    "CSV_FIELDS", "GEN_AXES", "MEMORY_CAP", "GenLaw", "LayeredCodebooks", "SimConfig", "SimResult",
    "build_codebooks", "decode_y", "decode_z", "dirty_xor_scheme", "encode", "gen_law", "lemma_margins",
    "results_csv", "sample_cond", "simulate", "transmit", "typical",
]
