"""gclab: graph-composition laboratory.

Builds, composes, analyzes and exactly simulates query algorithms phrased
as subspace programs on resistor networks: electrical flows and effective
resistances, span programs with exact min-norm witnesses, graph composition,
circulation-space decompositions, classical-model converters, a construction
catalog for symmetric functions and string problems, and a dense state-vector
verification layer.
"""

__version__ = "0.1.0"
