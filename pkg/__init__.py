"""
spanforge - rule-based text analytics with offload planning.

Compiles extraction rules into operator graphs, partitions them between a
host runtime and an emulated streaming accelerator, runs corpora through the
batched dispatch runtime and estimates the speedup of each offload scenario.
"""

__version__ = "0.1.0"
