import os
from pathlib import Path

import pytest

from blogwatch.harness import WorldSpec, generate_world, mixed_200_spec
from blogwatch.pipeline import RunConfig

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def mixed_world():
    """The standard mixed-200 evaluation world (expensive; share it)."""
    return generate_world(mixed_200_spec(rng_seed=7))


@pytest.fixture(scope="session")
def small_world():
    """A quick world for integration tests."""
    spec = WorldSpec(rng_seed=3, n_blogs=30, topical_fraction=0.4,
                     spam_fraction=0.1, empty_fraction=0.1, media_fraction=0.1,
                     ping_cycles=3, decoy_hosts=2)
    return generate_world(spec)


def write_world_inputs(world, tmp_path: Path) -> RunConfig:
    """Materialize just the config inputs (registry/corpora) for in-memory
    runs against ``world``."""
    reg = tmp_path / "registry.txt"
    reg.write_text("".join(l + "\n" for l in world.registry_lines), encoding="utf-8")
    topic = tmp_path / "topic_corpus.txt"
    topic.write_text("".join(d + "\n" for d in world.topic_corpus), encoding="utf-8")
    background = tmp_path / "background_corpus.txt"
    background.write_text("".join(d + "\n" for d in world.background_corpus), encoding="utf-8")
    return RunConfig(
        registry_path=str(reg),
        topic_corpus_path=str(topic),
        background_corpus_path=str(background),
        fixture_path=str(tmp_path),  # satisfied; world passed in directly
        summary_workers=1,
        fetch_workers=1,
    )


@pytest.fixture
def world_config(small_world, tmp_path):
    return write_world_inputs(small_world, tmp_path)
