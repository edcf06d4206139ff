"""Multi-symbol range coder with ring-buffer adaptation and table decoding."""

from .coder import (
    CoderConfig, RangeDecoder, RangeEncoder, StreamHeader, all_configs,
    decode_sequence, encode_sequence)
from .datagen import (
    GeometricSpec, bitrate_error, entropy, gen_geometric, gen_uniform,
    geometric_pmf, k_of_K)
from .models import (
    FenwickModel, FrequencyModel, RingModel, new_uniform, ring_init,
    scale_static)
from .search import create_table, find_linear, find_log, find_table

__version__ = "0.1.0"
