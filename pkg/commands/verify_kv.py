import json

import numpy as np
import typer
from typing_extensions import Annotated

from kvlab import random_configs, verify_equivalence
from logger import logger


def verify_kv(
    cases: Annotated[int, typer.Option(help="Number of random configurations.")] = 100,
    seed: Annotated[int, typer.Option(help="Seed for the configurations and projections.")] = 0,
    max_len: Annotated[int, typer.Option(help="Maximum sequence length.")] = 64,
    tolerance: Annotated[float, typer.Option(help="Maximum accepted relative error.")] = 1e-5,
    skip_rotation: Annotated[
        bool,
        typer.Option(help="Negative control: excise without re-rotating keys; every case is expected to fail."),
    ] = False,
    report: Annotated[str, typer.Option(help="Write per-case errors as JSON to this file.")] = "",
):
    """
    Check that removing a span from a rotary-embedded cache and re-rotating the
    later keys matches re-prefilling the pruned sequence.

    Example usage:
        python main.py verify-kv --cases 100
        python main.py verify-kv --skip-rotation
    """
    if cases < 1 or max_len < 3:
        logger.error("--cases must be at least 1 and --max-len at least 3")
        raise typer.Exit(code=1)

    rng = np.random.default_rng(seed + 1)
    results = [
        verify_equivalence(seq, span, params, tolerance=tolerance, rng=rng, rotate=not skip_rotation)
        for seq, span, params in random_configs(cases, seed=seed, max_len=max_len)
    ]
    passed = sum(r.passed for r in results)
    worst = max(r.max_rel_err for r in results)

    if report:
        with open(report, "w", encoding="utf-8") as f:
            json.dump(
                {"rotate": not skip_rotation, "tolerance": tolerance, "passed": passed, "cases": [r.to_dict() for r in results]},
                f,
                indent=2,
            )
        logger.info(f"Report saved to {report}")

    logger.info(f"{passed}/{cases} case(s) within tolerance; worst relative error {worst:.3e}")
    if skip_rotation:
        if passed:
            logger.error(f"Negative control: {passed} case(s) passed without rotation")
            raise typer.Exit(code=1)
        logger.info("Negative control failed on every case, as expected.")
    elif passed < cases:
        logger.error(f"{cases - passed} case(s) exceeded the tolerance")
        raise typer.Exit(code=1)
