"""Thread fan-out for campaigns made of independent work units."""

from __future__ import annotations

import asyncio
import logging
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

Item = TypeVar("Item")
Result = TypeVar("Result")


async def map_in_threads(
    fn: Callable[[Item], Result], items: Iterable[Item], threads: int = 1
) -> list[Result]:
    """Run ``fn`` over ``items`` on at most ``threads`` worker threads; results keep input order."""

    if threads < 1:
        raise ValueError("threads must be >= 1")
    semaphore = asyncio.Semaphore(threads)

    async def run(item: Item) -> Result:
        async with semaphore:
            return await asyncio.to_thread(fn, item)

    return list(await asyncio.gather(*(run(item) for item in items)))


__all__ = ["map_in_threads"]
