"""Config ingestion, oracles, traces, audit and the CLI runner."""
