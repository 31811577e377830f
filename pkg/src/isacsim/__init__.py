"""Desk-scale workbench for learned and model-based integrated sensing and communication.

A single uniform linear array transmits one message-bearing symbol per scene
through a precoding beam.  A monostatic radar receiver must decide whether a
target is present inside a known angular sector and estimate its angle, while
a single-antenna user in a second sector decodes the message.  The package
provides the simulated channels, a six-network autoencoder trained end to end
against them, classical model-based benchmarks, and the Monte-Carlo harness
that places both on the radar/communication trade-off plane.
"""

from isacsim.rng import Rng, stream_id

__all__ = ["Rng", "stream_id"]
__version__ = "0.1.0"
