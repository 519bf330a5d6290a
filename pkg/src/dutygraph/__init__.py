"""dutygraph: risk-driven safety-duty management engine.

Domain model of duties (nodes, positions, boundaries), a weighted DAG over
them, a self-reminder scheduler, a scoring pipeline with supervisory
deductions, incident accountability tracing, simulated IoT alarm handling,
and an event-sourced service backbone with an HTTP API and CLI.
"""

__version__ = "0.1.0"
