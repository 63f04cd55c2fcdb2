"""Event-driven island model: per-island runs exchanging one migrant per step.

Islands never share mutable state; they interact only through ordered
mailboxes drained by a deterministic round-robin scheduler. After every
generation step an island posts one migrant to each of its peers; incoming
migrants replace the local worst individual.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .core import BitGenome, RandomSource, hamming, random_genome
from .engine import (
    EasyStepConfig,
    FitnessFunction,
    Individual,
    RunStats,
    StepFunction,
    Terminator,
    easy_step,
    evaluate_population,
    sort_by_fitness,
)

__all__ = [
    "Archipelago",
    "IslandConfig",
    "MigrantMessage",
    "MigrationPolicy",
    "consensus_genome",
    "integrate_migrant",
    "run_archipelago",
    "select_migrant",
]

logger = logging.getLogger(__name__)


class MigrationPolicy(Enum):
    """What an island sends to its peers."""

    BEST = "best"
    MOST_DIFFERENT = "mostdifferent"


@dataclass(frozen=True)
class MigrantMessage:
    """Envelope carrying one individual between island sessions."""

    source: str
    generation: int
    individual: Individual

    def __post_init__(self) -> None:
        if self.generation < 1:
            raise ValueError(f"generation must be at least 1, got {self.generation}")


@dataclass
class IslandConfig:
    """One island: its own population, random stream, step strategy, and peers."""

    alias: str
    peers: Sequence[str]
    fitness: FitnessFunction
    pop_size: int
    genome_length: int
    step_config: EasyStepConfig
    terminator: Terminator
    step: StepFunction = easy_step
    migration_policy: MigrationPolicy = MigrationPolicy.BEST
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.alias:
            raise ValueError("island alias must not be empty")
        if self.alias in self.peers:
            raise ValueError(f"island {self.alias!r} lists itself as a peer")
        if len(set(self.peers)) != len(self.peers):
            raise ValueError(f"island {self.alias!r} has duplicate peers")
        if self.pop_size < 2:
            raise ValueError(f"pop_size must be at least 2, got {self.pop_size}")
        if self.genome_length < 1:
            raise ValueError(
                f"genome_length must be positive, got {self.genome_length}"
            )


def consensus_genome(pop: Sequence[Individual]) -> BitGenome:
    """Per-locus majority-vote genome of the population; ties become 1."""
    if not pop:
        raise ValueError("population must not be empty")
    length = pop[0].genome.length
    half = len(pop)
    bits = []
    for locus in range(length):
        ones = sum(ind.genome.bits[locus] for ind in pop)
        bits.append(1 if 2 * ones >= half else 0)
    return BitGenome(tuple(bits))


def select_migrant(
    policy: MigrationPolicy,
    pop: Sequence[Individual],
    rng: RandomSource | None = None,
) -> Individual:
    """Independent copy of the individual the policy picks to emigrate.

    BEST picks the highest fitness; MOST_DIFFERENT picks the largest Hamming
    distance from the population's consensus genome. Ties go to the earliest
    individual, so selection is deterministic and ``rng`` is currently unused.
    """
    if not pop:
        raise ValueError("population must not be empty")
    if any(ind.fitness is None for ind in pop):
        raise ValueError("all individuals must be evaluated before migrant selection")
    if policy is MigrationPolicy.BEST:
        chosen = max(pop, key=lambda ind: ind.fitness)
    else:
        consensus = consensus_genome(pop)
        chosen = max(pop, key=lambda ind: hamming(ind.genome, consensus))
    return chosen.copy()


def integrate_migrant(
    pop: Sequence[Individual],
    migrant: Individual,
    f: FitnessFunction,
    stats: RunStats,
) -> list[Individual]:
    """Replace the current worst individual with the migrant, unconditionally.

    The migrant is evaluated first if its fitness is unset. A genome-length
    mismatch rejects the migrant with a logged error and leaves the
    population unchanged; the island keeps running either way.
    """
    if not pop:
        raise ValueError("population must not be empty")
    pop = list(pop)
    if migrant.genome.length != pop[0].genome.length:
        logger.error(
            "rejected migrant: genome length %d does not match local length %d",
            migrant.genome.length,
            pop[0].genome.length,
        )
        return pop
    evaluate_population([migrant], f, stats)
    # worst = lowest fitness, latest among ties (the slot a best-first sort
    # would place last)
    worst = min(range(len(pop)), key=lambda i: (pop[i].fitness, -i))
    pop[worst] = migrant
    return sort_by_fitness(pop)


class _IslandSession:
    """Mutable run state of one island."""

    def __init__(self, config: IslandConfig) -> None:
        self.config = config
        self.rng = RandomSource(config.seed)
        self.stats = RunStats()
        self.generation = 0
        self.start = time.perf_counter()
        self.pop = [
            Individual(random_genome(config.genome_length, self.rng))
            for _ in range(config.pop_size)
        ]
        evaluate_population(self.pop, config.fitness, self.stats)
        self.pop = sort_by_fitness(self.pop)
        self.finished = config.terminator.should_stop(0, self.pop[0].fitness)

    @property
    def best_fitness(self) -> float:
        return self.pop[0].fitness


class Archipelago:
    """Round-robin scheduler stepping islands one generation per round.

    Pending messages are always delivered before an island's step. Islands
    whose terminator has fired stop stepping and sending but keep draining
    (and discarding) their mailbox, so no message is ever lost. The ``log``
    holds one ``<round> <alias> <event> <detail>`` line per event.
    """

    def __init__(self, configs: Sequence[IslandConfig]) -> None:
        if not configs:
            raise ValueError("at least one island is required")
        aliases = [cfg.alias for cfg in configs]
        if len(set(aliases)) != len(aliases):
            raise ValueError("island aliases must be unique")
        for cfg in configs:
            for peer in cfg.peers:
                if peer not in aliases:
                    raise ValueError(
                        f"island {cfg.alias!r} references unknown peer {peer!r}"
                    )
        self._order = aliases
        self.sessions = {cfg.alias: _IslandSession(cfg) for cfg in configs}
        self.mailboxes: dict[str, deque[MigrantMessage]] = {
            alias: deque() for alias in aliases
        }
        self.log: list[str] = []
        self.messages_sent = 0
        self.messages_delivered = 0
        self.round = 0

    def _record(self, alias: str, event: str, detail: str) -> None:
        self.log.append(f"{self.round} {alias} {event} {detail}")

    def _drain_mailbox(self, session: _IslandSession) -> None:
        box = self.mailboxes[session.config.alias]
        while box:
            msg = box.popleft()
            self.messages_delivered += 1
            if session.finished:
                self._record(
                    session.config.alias,
                    "recv",
                    f"from={msg.source} gen={msg.generation} discarded",
                )
                continue
            self._record(
                session.config.alias, "recv", f"from={msg.source} gen={msg.generation}"
            )
            session.pop = integrate_migrant(
                session.pop, msg.individual, session.config.fitness, session.stats
            )

    def step_island(self, alias: str) -> None:
        """One turn for one island: drain mailbox, step, send to peers."""
        session = self.sessions[alias]
        self._drain_mailbox(session)
        if session.finished:
            return
        cfg = session.config
        session.pop = cfg.step(
            session.pop, cfg.step_config, cfg.fitness, session.rng, session.stats
        )
        session.generation += 1
        stats = session.stats
        stats.generations_executed = session.generation
        stats.best_per_generation.append((session.generation, session.best_fitness))
        stats.cumulative_evaluations.append(stats.evaluations)
        stats.elapsed_seconds.append(time.perf_counter() - session.start)
        self._record(
            alias,
            "step",
            f"gen={session.generation} size={len(session.pop)} "
            f"best={session.best_fitness:g}",
        )
        for peer in cfg.peers:
            migrant = select_migrant(cfg.migration_policy, session.pop, session.rng)
            self.mailboxes[peer].append(
                MigrantMessage(alias, session.generation, migrant)
            )
            self.messages_sent += 1
            self._record(alias, "send", f"to={peer} gen={session.generation}")
        if cfg.terminator.should_stop(session.generation, session.best_fitness):
            session.finished = True

    def run(self) -> dict[str, tuple[list[Individual], RunStats]]:
        """Step all islands until every terminator has fired."""
        while any(not s.finished for s in self.sessions.values()):
            self.round += 1
            for alias in self._order:
                self.step_island(alias)
        # last senders may leave mail behind: deliver (and discard) it all
        self.round += 1
        for alias in self._order:
            self._drain_mailbox(self.sessions[alias])
        results = {}
        for alias in self._order:
            session = self.sessions[alias]
            session.stats.wall_time = time.perf_counter() - session.start
            results[alias] = (session.pop, session.stats)
        return results


def run_archipelago(
    configs: Sequence[IslandConfig],
) -> dict[str, tuple[list[Individual], RunStats]]:
    """Run a whole archipelago to completion; see :class:`Archipelago`."""
    return Archipelago(configs).run()
