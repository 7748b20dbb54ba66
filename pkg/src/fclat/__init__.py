"""Concept lattice reconstruction from probabilistic incidence tensors."""

from .concepts import (
    FormalConcept,
    closure,
    enumerate_concepts,
    is_triadic_concept,
    leq,
)
from .context import FormalContext, TriadicContext
from .errors import CapExceededError, FclatError, ProviderError, ValidationError
from .evaluate import (
    EvalReport,
    GoldContext,
    LatticeComparison,
    compare_lattices,
    eval_concept_classification,
    eval_reconstruction,
)
from .lattice import ConceptLattice, build_lattice, export_dot
from .pipeline import (
    ConceptualEmbedding,
    PooledContext,
    TriadicTensor,
    binarize,
    embedding_rows,
    normalize_minmax_log,
    normalize_sigmoid,
    pool,
)
from .synth import (
    ConvergenceTable,
    GibbsResult,
    HttpProvider,
    JointTableProvider,
    Pattern,
    ProbabilityProvider,
    Sentence,
    SyntheticCorpus,
    context_distance,
    convergence_experiment,
    generate_corpus,
    gibbs_generate,
    learn_context,
    render_filling,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "ConceptLattice",
    "ConceptualEmbedding",
    "ConvergenceTable",
    "EvalReport",
    "FclatError",
    "FormalConcept",
    "FormalContext",
    "GibbsResult",
    "GoldContext",
    "HttpProvider",
    "JointTableProvider",
    "LatticeComparison",
    "Pattern",
    "PooledContext",
    "ProbabilityProvider",
    "ProviderError",
    "Sentence",
    "SyntheticCorpus",
    "TriadicContext",
    "TriadicTensor",
    "ValidationError",
    "binarize",
    "build_lattice",
    "closure",
    "compare_lattices",
    "context_distance",
    "convergence_experiment",
    "embedding_rows",
    "enumerate_concepts",
    "eval_concept_classification",
    "eval_reconstruction",
    "export_dot",
    "generate_corpus",
    "gibbs_generate",
    "is_triadic_concept",
    "learn_context",
    "leq",
    "normalize_minmax_log",
    "normalize_sigmoid",
    "pool",
    "render_filling",
]
