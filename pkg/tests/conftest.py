import random

import pytest

from thompsonf.words import Word, word


def random_word(rng: random.Random, max_len: int = 12, max_index: int = 5) -> Word:
    return word(
        [(rng.randrange(max_index + 1), rng.choice([1, -1]))
         for _ in range(rng.randrange(max_len + 1))]
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240814)
