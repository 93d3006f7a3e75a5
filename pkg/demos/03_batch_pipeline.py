#!/usr/bin/env python3
"""Run the streaming pipeline: batched collection + concurrent discovery.

The collector writes fixed-length CSV batches into a pool directory while
a separate worker process picks up each finalized batch, runs causal
discovery on it, and drops the graph, DOT rendering, and timing record
next to it. Collection never waits for discovery.
"""

import json
from pathlib import Path

from hrcausal import PipelineConfig, DiscoveryConfig, CITestConfig, WorldConfig
from hrcausal.pipeline import run_pipeline


def main():
    pool = Path("pool")
    cfg = PipelineConfig(
        source_kind="simulate",
        rate_hz=10.0,
        batch_len=1500,  # 150 s of data per batch
        pool_dir=str(pool),
        discovery=DiscoveryConfig(
            method="pcmci", citest=CITestConfig("parcorr", seed=0)
        ),
        duration_s=450.0,  # three batches
        world=WorldConfig(seed=2),
    )

    summary = run_pipeline(cfg)
    print(json.dumps(summary.to_dict(), indent=2))

    print("\npool contents:")
    for path in sorted(pool.iterdir()):
        print(f"  {path.name}")


# the discovery worker is a spawned process, so the entry point must be guarded
if __name__ == "__main__":
    main()
