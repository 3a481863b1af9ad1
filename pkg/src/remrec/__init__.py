"""remrec: remainder-based reconstruction of undersampled multi-tone signals.

Library surface:

- ``numtheory``: exact gcd/lcm, CRT, generalized real modulo, rational lcm.
- ``remainder_model``: modulus sets, sources, noise, residue encoders.
- ``signal_harness``: waveform synthesis and spectral residue extraction.
- ``decoder_complex`` / ``decoder_real``: robust decoders with certified
  error bounds.
- ``design_tools``: rate-selection bounds, uniqueness scans, array checks.
- ``coprime_sim``: co-prime sampling autocorrelation simulation.
- ``montecarlo``: seeded verification experiments.
"""

__version__ = "0.1.0"

from .remainder_model import (  # noqa: F401
    ModulusSet,
    NoiseSpec,
    ResidueObservation,
    SourceSet,
    common_residue,
    encode_complex,
    encode_real,
)
from .decoder_complex import decode_complex  # noqa: F401
from .decoder_real import decode_real_multi, decode_real_single  # noqa: F401
