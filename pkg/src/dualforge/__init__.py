"""dualforge: dual-task training data construction and math benchmark evaluation.

The pipeline: load <instruction, thought> corpora, build masked auxiliary
examples in both directions (hide reasoning steps / hide instruction
clauses), assemble multi-task training mixtures with exact response spans,
and run the program-first inference-and-scoring protocol against any
text-generation endpoint.
"""

from .corpus import (
    AnswerForm,
    BenchmarkItem,
    CorpusFormatError,
    CorpusManifest,
    Option,
    SourceRecord,
    ThoughtKind,
    load_benchmark,
    load_corpus,
    validate_record,
    write_benchmark,
    write_corpus,
)
from .masker import (
    MASK_TAG,
    MaskedExample,
    MaskingError,
    MaskPolicy,
    RecordSkipped,
    TaskKind,
    build_ir_example,
    build_irsp_example,
    select_mask_indices,
)
from .mixer import (
    SERIALIZATION_TEMPLATE,
    MixSpec,
    MixtureError,
    Task,
    TrainingExample,
    assemble_mixture,
    serialize_example,
    sweep_grid,
    write_training_file,
)
from .segmenter import (
    Segment,
    SegmentKind,
    detect_numerals,
    segment_cot_steps,
    segment_instruction_clauses,
    segment_pot_statements,
)

__version__ = "0.1.0"
