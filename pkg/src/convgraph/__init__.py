"""Abuse detection in chat logs from the topology of conversational graphs.

Stages: :mod:`~convgraph.chatlog` (parsing), :mod:`~convgraph.netextract`
(graphs around a message), :mod:`~convgraph.graphcore` (measures),
:mod:`~convgraph.features` (75-value rows), :mod:`~convgraph.learn`
(SVM, calibration, importance), :mod:`~convgraph.evaluate` (protocol and
reports), :mod:`~convgraph.synth` (synthetic corpora) and
:mod:`~convgraph.cli`.
"""

__version__ = "0.1.0"
