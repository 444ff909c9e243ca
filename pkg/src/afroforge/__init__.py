"""afroforge: corpus engineering and evaluation for accented multi-speaker TTS.

Subpackages cover the full pipeline: manifest ingestion and statistics
(`corpus`), text normalization (`textnorm`), signal processing (`dsp`),
adapter-driven enhancement (`enhance`), speaker-embedding personas
(`speakers`), objective metrics (`metrics`), corpus splitting and
balancing (`splits`), and the listening-test backend (`service`). The
`cli` module wires them into `afroforge <subcommand>` runs.
"""

__version__ = "0.1.0"
