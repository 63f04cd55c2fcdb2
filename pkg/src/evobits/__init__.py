"""Evolutionary algorithms over bitstring genomes.

Building blocks: seeded random sources, bit genomes with variation operators
chosen by priority rate (:mod:`evobits.core`); steady-state and generational
population steps with fitness caching and terminators (:mod:`evobits.engine`);
bundled problems including a rectangle-stabbing arena (:mod:`evobits.problems`);
a deterministic island model with migration (:mod:`evobits.islands`); and a
CSV-reporting command line (:mod:`evobits.cli`).
"""

from .core import (
    BitFlip,
    BitGenome,
    NPointCrossover,
    OperatorSpec,
    RandomSource,
    bitflip,
    choose_operator,
    decode,
    hamming,
    n_point_crossover,
    random_genome,
)
from .engine import (
    EasyStepConfig,
    EvaluationError,
    FitnessFunction,
    Individual,
    MaxGenerations,
    RunStats,
    TargetFitness,
    Terminator,
    canonical_step,
    easy_step,
    evaluate_population,
    run,
    sort_by_fitness,
)
from .islands import (
    Archipelago,
    IslandConfig,
    MigrantMessage,
    MigrationPolicy,
    consensus_genome,
    integrate_migrant,
    run_archipelago,
    select_migrant,
)
from .problems import (
    DotProblemConfig,
    Rectangle,
    RectangleArena,
    dot_fitness,
    generate_random_arena,
    grid_oracle,
    load_arena,
    onemax,
    royal_road,
    save_arena,
)

__version__ = "0.1.0"
