"""Streaming bilingual ASR + language identification on a neural transducer.

The package is a desk-scale, fully self-contained stack: a numpy neural
kernel with manual backpropagation, a transducer model with three language
conditioning injection sites, the alignment-lattice loss with a brute-force
oracle, a frame-synchronous beam decoder with a penalized language-tag
emission gate, a synthetic bilingual corpus generator, and an experiment
matrix runner that scores everything against monolingual and acoustic-LID
baselines.
"""

__version__ = "0.1.0"
