"""
Core engine for spanforge.

This package holds the rule compiler, the operator graph model, the
reference operators, the partitioner, the streaming accelerator model, the
batched dispatch runtime and the profiler/estimator.
"""
